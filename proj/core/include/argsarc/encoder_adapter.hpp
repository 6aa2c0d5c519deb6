#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "argsarc/autodiff.hpp"
#include "argsarc/corpus.hpp"
#include "argsarc/dual_encoder.hpp"
#include "argsarc/mtl.hpp"

namespace argsarc::encadapter {

inline constexpr const char* kClsToken = "[CLS]";
inline constexpr const char* kSepToken = "[SEP]";

// "[CLS] pt-tokens [SEP] ct-tokens [SEP]" with segment ids (0 covers the
// pt span including the leading markers, 1 the ct span) and an
// attention mask.
struct PairedInput {
    std::vector<std::string> tokens;
    std::vector<int> segment_ids;
    std::vector<int> attention_mask;
};

using Tokenizer = std::function<std::vector<std::string>(const std::string&)>;

Tokenizer word_tokenizer();  // the shared lowercase word tokenizer

// Over-length pairs lose tokens from the longer span first; on ties
// truncation alternates starting with pt. Markers are never truncated.
PairedInput format_pair(const corpus::TurnPair& pair, const Tokenizer& tokenizer,
                        int max_len);

// Pluggable pretrained-encoder contract. encode() builds onto the given
// graph; attention tensors are row-normalized (n x n per layer/head).
class EncoderBackend {
public:
    virtual ~EncoderBackend() = default;

    struct Encoded {
        nn::Node* pooled = nullptr;  // dim x 1
        // [layer][head] word-to-word attention, rows sum to 1
        std::vector<std::vector<nn::Matrix>> attention;
    };

    virtual Encoded encode(nn::Graph& g, const PairedInput& input, bool training) = 0;
    virtual int dim() const = 0;
    virtual int num_layers() const = 0;
    virtual int num_heads() const = 0;
    virtual nn::ParameterStore& params() = 0;
};

struct TinyBackendConfig {
    int dim = 16;
    int layers = 2;
    int heads = 2;
    int vocab_buckets = 257;
    int max_positions = 64;
    double dropout = 0.0;
    uint64_t seed = 0;
    bool force_uniform_attention = false;  // test hook
};

// Small randomly initialized transformer encoder so the suite runs
// without downloading pretrained weights. Full-scale runs plug in a
// real backend behind the same contract.
class TinyTransformerBackend : public EncoderBackend {
public:
    explicit TinyTransformerBackend(TinyBackendConfig config);

    Encoded encode(nn::Graph& g, const PairedInput& input, bool training) override;
    int dim() const override { return config_.dim; }
    int num_layers() const override { return config_.layers; }
    int num_heads() const override { return config_.heads; }
    nn::ParameterStore& params() override { return params_; }
    std::mt19937_64& rng() { return rng_; }

private:
    TinyBackendConfig config_;
    nn::ParameterStore params_;
    std::mt19937_64 rng_;
};

struct HeadConfig {
    int arg_classes = 3;
    int sarc_classes = 2;
    int epochs = 5;
    int batch_size = 16;
    double learning_rate = 3e-5;
    int max_len = 128;
    uint64_t seed = 0;
};

enum class EncoderMode { Single, Multitask };

// Backend plus the two classification heads and the uncertainty
// log-variances. The variants (single / mt_sum / mt_uncertainty / alt)
// differ only in loss composition and batch routing.
class EncoderAdapter {
public:
    EncoderAdapter(std::shared_ptr<EncoderBackend> backend, HeadConfig config);

    struct Forward {
        nn::Node* arg_logits = nullptr;
        nn::Node* sarc_logits = nullptr;
        EncoderBackend::Encoded encoded;
    };

    Forward forward(nn::Graph& g, const PairedInput& input, EncoderMode mode,
                    bool training = false);

    dualenc::PairPrediction predict(const corpus::TurnPair& pair, EncoderMode mode);

    EncoderBackend& backend() { return *backend_; }
    nn::ParameterStore& head_params() { return head_params_; }
    const HeadConfig& config() const { return config_; }
    Tokenizer& tokenizer() { return tokenizer_; }

    std::vector<std::pair<std::string, nn::Matrix>> snapshot() const;
    void restore(const std::vector<std::pair<std::string, nn::Matrix>>& snap);

private:
    std::shared_ptr<EncoderBackend> backend_;
    HeadConfig config_;
    nn::ParameterStore head_params_;
    Tokenizer tokenizer_ = word_tokenizer();
};

// Non-alternating fine-tuning (enc_orig / enc_mt / enc_mt_uncert).
dualenc::TrainHistory train_encoder(EncoderAdapter& adapter,
                                    const std::vector<corpus::TurnPair>& train,
                                    const std::vector<corpus::TurnPair>& dev,
                                    dualenc::LossMode loss_mode,
                                    std::vector<mtl::StepLogEntry>* step_log = nullptr);

// Alternating task-homogeneous fine-tuning (enc_alt): consumes the mtl
// BatchSchedule; each step updates the backend plus one head.
dualenc::TrainHistory train_alt(EncoderAdapter& adapter,
                                const std::vector<corpus::TurnPair>& arg_corpus,
                                const std::vector<corpus::TurnPair>& sarc_corpus,
                                const std::vector<corpus::TurnPair>& dev, uint64_t seed,
                                std::vector<mtl::StepLogEntry>* step_log = nullptr);

struct AttentionMatrices {
    std::vector<std::string> tokens;   // aligned to matrix axes
    std::vector<nn::Matrix> per_head;  // rows sum to 1 +- 1e-5
    int layer = 0;
};

AttentionMatrices extract_attention(EncoderAdapter& adapter, const corpus::TurnPair& pair,
                                    int layer);

// requested < 0 resolves to the default: layer 6 when the backend is
// deep enough, otherwise the middle layer.
int resolve_export_layer(int requested, int num_layers);

}  // namespace argsarc::encadapter
