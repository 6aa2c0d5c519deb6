#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "argsarc/autodiff.hpp"
#include "argsarc/corpus.hpp"
#include "argsarc/mtl.hpp"

namespace argsarc::dualenc {

// Token -> embedding row. Tokens seen fewer than min_frequency times in
// training map to the UNK row.
struct EmbeddingTable {
    std::unordered_map<std::string, int> vocabulary;
    nn::Matrix vectors;  // |V| x dim, last row is UNK
    int unk_row = 0;
    int dim = 0;

    int row_for(const std::string& token) const {
        auto it = vocabulary.find(token);
        return it == vocabulary.end() ? unk_row : it->second;
    }
};

// Pluggable pretrained-vector source; nullopt falls back to a
// deterministic per-token random draw (test mode).
using PretrainedLookup = std::function<std::optional<Eigen::VectorXd>(const std::string&)>;

struct EmbeddingOptions {
    int dim = 300;
    int min_frequency = 5;
    double unk_stddev = 0.17;
    uint64_t seed = 0;
};

EmbeddingTable build_embeddings(const std::vector<std::string>& train_texts,
                                const PretrainedLookup& pretrained,
                                const EmbeddingOptions& opts);

// FastText-format text file: "token v1 v2 ... vdim" lines.
PretrainedLookup load_pretrained_vectors(const std::string& path, int dim);

struct EncoderConfig {
    int embed_dim = 300;
    int hidden_size = 300;
    double dropout = 0.5;
    int epochs = 50;
    int batch_size = 16;
    double learning_rate = 0.01;
    uint64_t seed = 0;
    int max_tokens_per_sentence = 50;
    int max_sentences_per_turn = 20;
    int attention_dim = 0;  // 0 -> hidden_size

    void validate() const;
};

struct AttentionWeights {
    std::vector<std::vector<double>> word_level;  // per sentence
    std::vector<double> sentence_level;
};

struct DualEncoderOutput {
    Eigen::VectorXd v_pt, v_ct;
    AttentionWeights attention_pt, attention_ct;
};

enum class TaskMode { Single, Multitask };
enum class LossMode { Single, MtSum, MtUncertainty };

// u_i = tanh(W h_i + b); alpha = softmax(u_i . context); out = sum alpha_i h_i.
// states: hidden vectors as columns of a d x n node.
struct AttendResult {
    nn::Node* output;   // d x 1
    nn::Node* weights;  // n x 1 simplex point
};

AttendResult attend(nn::Graph& g, nn::Node* states, nn::Node* context,
                    nn::Node* projection, nn::Node* projection_bias);

class DualEncoder {
public:
    DualEncoder(EncoderConfig config, EmbeddingTable embeddings);

    struct Forward {
        nn::Node* arg_logits = nullptr;   // 3 x 1
        nn::Node* sarc_logits = nullptr;  // 2 x 1 (multitask only)
        DualEncoderOutput output;
    };

    // Builds the full graph for one pair. The graph must outlive the
    // returned nodes.
    Forward forward(nn::Graph& g, const corpus::TurnPair& pair, TaskMode mode,
                    bool training = false);

    struct TurnEncoding {
        nn::Node* vector;  // hidden x 1
        AttentionWeights attention;
    };
    TurnEncoding encode_turn(nn::Graph& g, const std::string& turn_text,
                             const std::string& side);

    nn::ParameterStore& params() { return params_; }
    const EncoderConfig& config() const { return config_; }
    const EmbeddingTable& embeddings() const { return embeddings_; }
    std::mt19937_64& rng() { return rng_; }

    // Frozen snapshot of the parameter values (for best-dev keeping).
    std::vector<std::pair<std::string, nn::Matrix>> snapshot() const;
    void restore(const std::vector<std::pair<std::string, nn::Matrix>>& snap);

private:
    nn::Node* lstm_sequence(nn::Graph& g, const std::vector<nn::Node*>& inputs,
                            const std::string& prefix);

    EncoderConfig config_;
    EmbeddingTable embeddings_;
    nn::ParameterStore params_;
    std::mt19937_64 rng_;
    bool training_pass_ = false;
};

struct EpochRecord {
    int epoch;
    double train_loss;
    double dev_micro_f1;
    double log_var_arg;
    double log_var_sarc;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;
    double best_dev_f1 = -1.0;
    bool diverged = false;
};

// Full-corpus training with Adam at the configured hyperparameters.
// mt modes compose losses through the mtl module; a NaN loss aborts and
// restores the last good snapshot. Per-step audit records are appended
// to step_log when given.
TrainHistory train_dual(DualEncoder& model, const std::vector<corpus::TurnPair>& train,
                        const std::vector<corpus::TurnPair>& dev, LossMode loss_mode,
                        std::vector<mtl::StepLogEntry>* step_log = nullptr);

// Argmax argumentative prediction (and sarcasm in multitask mode).
struct PairPrediction {
    corpus::ArgLabel arg;
    std::optional<corpus::SarcLabel> sarc;
};
PairPrediction predict(DualEncoder& model, const corpus::TurnPair& pair, TaskMode mode);

int arg_label_index(corpus::ArgLabel l);
int sarc_label_index(corpus::SarcLabel l);
corpus::ArgLabel arg_label_from_index(int i);
corpus::SarcLabel sarc_label_from_index(int i);

}  // namespace argsarc::dualenc
