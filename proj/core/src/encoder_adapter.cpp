#include "argsarc/encoder_adapter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "argsarc/text.hpp"

namespace argsarc::encadapter {

using nn::Graph;
using nn::Matrix;
using nn::Node;

Tokenizer word_tokenizer() {
    return [](const std::string& s) { return text::tokenize(s); };
}

PairedInput format_pair(const corpus::TurnPair& pair, const Tokenizer& tokenizer,
                        int max_len) {
    std::vector<std::string> pt_toks = tokenizer(pair.prior_turn);
    std::vector<std::string> ct_toks = tokenizer(pair.current_turn);
    if (pt_toks.empty() || ct_toks.empty()) {
        throw std::runtime_error("pair '" + pair.id + "': empty turn after tokenization");
    }
    const int markers = 3;
    if (max_len <= markers) throw std::runtime_error("max_len leaves no room for tokens");
    int budget = max_len - markers;
    bool drop_pt_next = true;  // tie-break starts with pt
    while (static_cast<int>(pt_toks.size() + ct_toks.size()) > budget) {
        if (pt_toks.size() > ct_toks.size()) {
            pt_toks.pop_back();
        } else if (ct_toks.size() > pt_toks.size()) {
            ct_toks.pop_back();
        } else {
            if (drop_pt_next) pt_toks.pop_back();
            else ct_toks.pop_back();
            drop_pt_next = !drop_pt_next;
        }
    }
    PairedInput input;
    input.tokens.push_back(kClsToken);
    input.segment_ids.push_back(0);
    for (auto& t : pt_toks) {
        input.tokens.push_back(std::move(t));
        input.segment_ids.push_back(0);
    }
    input.tokens.push_back(kSepToken);
    input.segment_ids.push_back(0);
    for (auto& t : ct_toks) {
        input.tokens.push_back(std::move(t));
        input.segment_ids.push_back(1);
    }
    input.tokens.push_back(kSepToken);
    input.segment_ids.push_back(1);
    input.attention_mask.assign(input.tokens.size(), 1);
    return input;
}

TinyTransformerBackend::TinyTransformerBackend(TinyBackendConfig config)
    : config_(config), rng_(config.seed) {
    if (config_.dim % config_.heads != 0) {
        throw std::runtime_error("backend dim must be divisible by head count");
    }
    const int d = config_.dim;
    params_.add("emb", nn::gaussian(config_.vocab_buckets, d, 0.1, rng_));
    params_.add("seg", nn::gaussian(2, d, 0.1, rng_));
    params_.add("pos", nn::gaussian(config_.max_positions, d, 0.1, rng_));
    for (int l = 0; l < config_.layers; ++l) {
        std::string p = "layer" + std::to_string(l);
        for (int h = 0; h < config_.heads; ++h) {
            std::string hp = p + ".head" + std::to_string(h);
            int dk = d / config_.heads;
            params_.add(hp + ".Wq", nn::glorot_uniform(dk, d, rng_));
            params_.add(hp + ".Wk", nn::glorot_uniform(dk, d, rng_));
            params_.add(hp + ".Wv", nn::glorot_uniform(dk, d, rng_));
        }
        params_.add(p + ".Wo", nn::glorot_uniform(d, d, rng_));
        params_.add(p + ".ff.W1", nn::glorot_uniform(2 * d, d, rng_));
        params_.add(p + ".ff.b1", Matrix::Zero(2 * d, 1));
        params_.add(p + ".ff.W2", nn::glorot_uniform(d, 2 * d, rng_));
        params_.add(p + ".ff.b2", Matrix::Zero(d, 1));
    }
    params_.add("pool.W", nn::glorot_uniform(d, d, rng_));
    params_.add("pool.b", Matrix::Zero(d, 1));
}

TinyTransformerBackend::Encoded TinyTransformerBackend::encode(Graph& g,
                                                               const PairedInput& input,
                                                               bool training) {
    const int n = static_cast<int>(input.tokens.size());
    if (n == 0) throw std::runtime_error("empty paired input");
    if (n > config_.max_positions) {
        throw std::runtime_error("paired input exceeds backend max positions");
    }
    const int d = config_.dim;
    const int dk = d / config_.heads;
    Node* emb = g.param(params_.get("emb"));
    Node* seg = g.param(params_.get("seg"));
    Node* pos = g.param(params_.get("pos"));
    std::vector<Node*> cols;
    cols.reserve(n);
    for (int i = 0; i < n; ++i) {
        int bucket = static_cast<int>(text::fnv1a(input.tokens[i]) % config_.vocab_buckets);
        Node* e = g.transpose(g.slice_rows(emb, bucket, 1));
        Node* s = g.transpose(g.slice_rows(seg, input.segment_ids[i], 1));
        Node* p = g.transpose(g.slice_rows(pos, i, 1));
        cols.push_back(g.add(g.add(e, s), p));
    }
    Node* x = g.concat_cols(cols);  // d x n

    Encoded enc;
    for (int l = 0; l < config_.layers; ++l) {
        std::string lp = "layer" + std::to_string(l);
        std::vector<Matrix> layer_attention;
        std::vector<Node*> token_outputs(n, nullptr);
        std::vector<std::vector<Node*>> per_token_heads(n);
        for (int h = 0; h < config_.heads; ++h) {
            std::string hp = lp + ".head" + std::to_string(h);
            Node* q = g.matmul(g.param(params_.get(hp + ".Wq")), x);
            Node* k = g.matmul(g.param(params_.get(hp + ".Wk")), x);
            Node* v = g.matmul(g.param(params_.get(hp + ".Wv")), x);
            Node* scores = g.scale(g.matmul(g.transpose(q), k), 1.0 / std::sqrt(double(dk)));
            Matrix attn_matrix(n, n);
            for (int i = 0; i < n; ++i) {
                Node* alpha;
                if (config_.force_uniform_attention) {
                    alpha = g.constant(Matrix::Constant(n, 1, 1.0 / n));
                } else {
                    alpha = g.softmax_col(g.transpose(g.slice_rows(scores, i, 1)));
                }
                attn_matrix.row(i) = alpha->value.col(0).transpose();
                per_token_heads[i].push_back(g.matmul(v, alpha));  // dk x 1
            }
            layer_attention.push_back(std::move(attn_matrix));
        }
        for (int i = 0; i < n; ++i) {
            token_outputs[i] = g.concat_rows(per_token_heads[i]);  // d x 1
        }
        Node* attn_out = g.matmul(g.param(params_.get(lp + ".Wo")), g.concat_cols(token_outputs));
        if (training && config_.dropout > 0.0) {
            attn_out = g.dropout(attn_out, config_.dropout, rng_, true);
        }
        x = g.add(x, attn_out);
        Node* hidden = g.tanh(g.add_broadcast_col(
            g.matmul(g.param(params_.get(lp + ".ff.W1")), x), g.param(params_.get(lp + ".ff.b1"))));
        Node* ff = g.add_broadcast_col(g.matmul(g.param(params_.get(lp + ".ff.W2")), hidden),
                                       g.param(params_.get(lp + ".ff.b2")));
        x = g.add(x, ff);
        enc.attention.push_back(std::move(layer_attention));
    }
    Node* cls = g.slice_rows(g.transpose(x), 0, 1);  // 1 x d
    enc.pooled = g.tanh(g.add(g.matmul(g.param(params_.get("pool.W")), g.transpose(cls)),
                              g.param(params_.get("pool.b"))));
    return enc;
}

EncoderAdapter::EncoderAdapter(std::shared_ptr<EncoderBackend> backend, HeadConfig config)
    : backend_(std::move(backend)), config_(config) {
    std::mt19937_64 rng(config_.seed);
    const int d = backend_->dim();
    head_params_.add("head.arg.W", nn::glorot_uniform(config_.arg_classes, d, rng));
    head_params_.add("head.arg.b", Matrix::Zero(config_.arg_classes, 1));
    head_params_.add("head.sarc.W", nn::glorot_uniform(config_.sarc_classes, d, rng));
    head_params_.add("head.sarc.b", Matrix::Zero(config_.sarc_classes, 1));
    head_params_.add("mtl.log_var_arg", Matrix::Zero(1, 1));
    head_params_.add("mtl.log_var_sarc", Matrix::Zero(1, 1));
}

EncoderAdapter::Forward EncoderAdapter::forward(Graph& g, const PairedInput& input,
                                                EncoderMode mode, bool training) {
    Forward fwd;
    fwd.encoded = backend_->encode(g, input, training);
    Node* pooled = fwd.encoded.pooled;
    fwd.arg_logits = g.add(g.matmul(g.param(head_params_.get("head.arg.W")), pooled),
                           g.param(head_params_.get("head.arg.b")));
    if (mode == EncoderMode::Multitask) {
        fwd.sarc_logits = g.add(g.matmul(g.param(head_params_.get("head.sarc.W")), pooled),
                                g.param(head_params_.get("head.sarc.b")));
    }
    return fwd;
}

dualenc::PairPrediction EncoderAdapter::predict(const corpus::TurnPair& pair,
                                                EncoderMode mode) {
    Graph g;
    PairedInput input = format_pair(pair, tokenizer_, config_.max_len);
    auto fwd = forward(g, input, mode, /*training=*/false);
    dualenc::PairPrediction pred{};
    int idx = 0;
    fwd.arg_logits->value.col(0).maxCoeff(&idx);
    pred.arg = dualenc::arg_label_from_index(idx);
    if (fwd.sarc_logits) {
        fwd.sarc_logits->value.col(0).maxCoeff(&idx);
        pred.sarc = dualenc::sarc_label_from_index(idx);
    }
    return pred;
}

std::vector<std::pair<std::string, Matrix>> EncoderAdapter::snapshot() const {
    std::vector<std::pair<std::string, Matrix>> snap;
    for (const auto* p : const_cast<EncoderAdapter*>(this)->backend_->params().all()) {
        snap.emplace_back("backend." + p->name, p->value);
    }
    for (const auto* p : head_params_.all()) snap.emplace_back("head." + p->name, p->value);
    return snap;
}

void EncoderAdapter::restore(const std::vector<std::pair<std::string, Matrix>>& snap) {
    for (const auto& [name, value] : snap) {
        if (name.rfind("backend.", 0) == 0) {
            backend_->params().get(name.substr(8)).value = value;
        } else {
            head_params_.get(name.substr(5)).value = value;
        }
    }
}

namespace {

double dev_micro_f1(EncoderAdapter& adapter, const std::vector<corpus::TurnPair>& dev,
                    EncoderMode mode) {
    int correct = 0, total = 0;
    for (const auto& pair : dev) {
        if (!pair.arg_label) continue;
        if (adapter.predict(pair, mode).arg == *pair.arg_label) ++correct;
        ++total;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

}  // namespace

dualenc::TrainHistory train_encoder(EncoderAdapter& adapter,
                                    const std::vector<corpus::TurnPair>& train,
                                    const std::vector<corpus::TurnPair>& dev,
                                    dualenc::LossMode loss_mode,
                                    std::vector<mtl::StepLogEntry>* step_log) {
    EncoderMode mode = loss_mode == dualenc::LossMode::Single ? EncoderMode::Single
                                                              : EncoderMode::Multitask;
    std::vector<size_t> usable;
    for (size_t i = 0; i < train.size(); ++i) {
        if (!train[i].arg_label) continue;
        if (mode == EncoderMode::Multitask && !train[i].sarc_label) continue;
        usable.push_back(i);
    }
    if (usable.empty()) throw std::runtime_error("no trainable pairs");

    const auto& cfg = adapter.config();
    nn::AdamOptions adam_opts;
    adam_opts.learning_rate = cfg.learning_rate;
    nn::AdamOptimizer optimizer(adam_opts);
    std::mt19937_64 shuffle_rng(cfg.seed);
    std::vector<nn::ParameterStore*> stores{&adapter.backend().params(),
                                            &adapter.head_params()};

    dualenc::TrainHistory history;
    auto best = adapter.snapshot();
    auto last_good = best;
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(usable.begin(), usable.end(), shuffle_rng);
        double epoch_loss = 0.0;
        int batches = 0;
        bool aborted = false;
        for (size_t start = 0; start < usable.size(); start += cfg.batch_size) {
            size_t end = std::min(usable.size(), start + cfg.batch_size);
            Graph g;
            Node* arg_loss = nullptr;
            Node* sarc_loss = nullptr;
            int count = 0;
            for (size_t k = start; k < end; ++k) {
                const auto& pair = train[usable[k]];
                PairedInput input = format_pair(pair, adapter.tokenizer(), cfg.max_len);
                auto fwd = adapter.forward(g, input, mode, /*training=*/true);
                Node* ce = g.cross_entropy(fwd.arg_logits,
                                           dualenc::arg_label_index(*pair.arg_label));
                arg_loss = arg_loss ? g.add(arg_loss, ce) : ce;
                if (mode == EncoderMode::Multitask) {
                    Node* sce = g.cross_entropy(fwd.sarc_logits,
                                                dualenc::sarc_label_index(*pair.sarc_label));
                    sarc_loss = sarc_loss ? g.add(sarc_loss, sce) : sce;
                }
                ++count;
            }
            arg_loss = g.scale(arg_loss, 1.0 / count);
            if (sarc_loss) sarc_loss = g.scale(sarc_loss, 1.0 / count);
            Node* total = arg_loss;
            if (loss_mode == dualenc::LossMode::MtSum) {
                total = g.add(arg_loss, sarc_loss);
            } else if (loss_mode == dualenc::LossMode::MtUncertainty) {
                total = mtl::uncertainty_loss_node(
                    g, {arg_loss, sarc_loss},
                    {g.param(adapter.head_params().get("mtl.log_var_arg")),
                     g.param(adapter.head_params().get("mtl.log_var_sarc"))});
            }
            double loss_value = total->value(0, 0);
            if (!std::isfinite(loss_value)) {
                adapter.restore(last_good);
                history.diverged = true;
                aborted = true;
                break;
            }
            adapter.backend().params().zero_grad();
            adapter.head_params().zero_grad();
            g.backward(total);
            optimizer.step(stores);
            last_good = adapter.snapshot();
            epoch_loss += loss_value;
            ++batches;
            ++step;
            if (step_log) {
                step_log->push_back({step, mtl::TaskId::Arg, loss_value,
                                     adapter.head_params().get("mtl.log_var_arg").value(0, 0),
                                     adapter.head_params().get("mtl.log_var_sarc").value(0, 0)});
            }
        }
        if (aborted) break;
        dualenc::EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = batches > 0 ? epoch_loss / batches : 0.0;
        rec.dev_micro_f1 = dev_micro_f1(adapter, dev, mode);
        rec.log_var_arg = adapter.head_params().get("mtl.log_var_arg").value(0, 0);
        rec.log_var_sarc = adapter.head_params().get("mtl.log_var_sarc").value(0, 0);
        history.epochs.push_back(rec);
        if (rec.dev_micro_f1 >= history.best_dev_f1) {  // ties keep the later epoch
            history.best_dev_f1 = rec.dev_micro_f1;
            history.best_epoch = epoch;
            best = adapter.snapshot();
        }
    }
    if (!history.diverged) adapter.restore(best);
    return history;
}

dualenc::TrainHistory train_alt(EncoderAdapter& adapter,
                                const std::vector<corpus::TurnPair>& arg_corpus,
                                const std::vector<corpus::TurnPair>& sarc_corpus,
                                const std::vector<corpus::TurnPair>& dev, uint64_t seed,
                                std::vector<mtl::StepLogEntry>* step_log) {
    std::vector<size_t> arg_idx, sarc_idx;
    for (size_t i = 0; i < arg_corpus.size(); ++i) {
        if (arg_corpus[i].arg_label) arg_idx.push_back(i);
    }
    for (size_t i = 0; i < sarc_corpus.size(); ++i) {
        if (sarc_corpus[i].sarc_label) sarc_idx.push_back(i);
    }
    const auto& cfg = adapter.config();
    auto to_batches = [&](const std::vector<size_t>& idx) {
        std::vector<std::vector<size_t>> batches;
        for (size_t start = 0; start < idx.size(); start += cfg.batch_size) {
            size_t end = std::min(idx.size(), start + cfg.batch_size);
            batches.emplace_back(idx.begin() + start, idx.begin() + end);
        }
        return batches;
    };

    nn::AdamOptions adam_opts;
    adam_opts.learning_rate = cfg.learning_rate;
    nn::AdamOptimizer optimizer(adam_opts);
    std::mt19937_64 shuffle_rng(seed);
    std::vector<nn::ParameterStore*> stores{&adapter.backend().params(),
                                            &adapter.head_params()};

    dualenc::TrainHistory history;
    auto best = adapter.snapshot();
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(arg_idx.begin(), arg_idx.end(), shuffle_rng);
        std::shuffle(sarc_idx.begin(), sarc_idx.end(), shuffle_rng);
        auto arg_batches = to_batches(arg_idx);
        auto sarc_batches = to_batches(sarc_idx);
        mtl::BatchSchedule schedule = mtl::build_alternating_schedule(
            static_cast<int>(arg_batches.size()), static_cast<int>(sarc_batches.size()),
            seed + epoch);
        double epoch_loss = 0.0;
        for (const auto& entry : schedule.entries) {
            bool is_arg = entry.task == mtl::TaskId::Arg;
            const auto& batch = is_arg ? arg_batches[entry.batch_index]
                                       : sarc_batches[entry.batch_index];
            const auto& source = is_arg ? arg_corpus : sarc_corpus;
            mtl::check_dispatch(entry, is_arg ? mtl::TaskId::Arg : mtl::TaskId::Sarc);
            Graph g;
            Node* loss = nullptr;
            for (size_t k : batch) {
                const auto& pair = source[k];
                PairedInput input = format_pair(pair, adapter.tokenizer(), cfg.max_len);
                auto fwd = adapter.forward(g, input, EncoderMode::Multitask, true);
                Node* ce = is_arg
                               ? g.cross_entropy(fwd.arg_logits,
                                                 dualenc::arg_label_index(*pair.arg_label))
                               : g.cross_entropy(fwd.sarc_logits,
                                                 dualenc::sarc_label_index(*pair.sarc_label));
                loss = loss ? g.add(loss, ce) : ce;
            }
            loss = g.scale(loss, 1.0 / batch.size());
            double loss_value = loss->value(0, 0);
            if (!std::isfinite(loss_value)) {
                history.diverged = true;
                break;
            }
            adapter.backend().params().zero_grad();
            adapter.head_params().zero_grad();
            g.backward(loss);
            optimizer.step(stores);
            epoch_loss += loss_value;
            ++step;
            if (step_log) {
                step_log->push_back({step, entry.task, loss_value,
                                     adapter.head_params().get("mtl.log_var_arg").value(0, 0),
                                     adapter.head_params().get("mtl.log_var_sarc").value(0, 0)});
            }
        }
        if (history.diverged) break;
        dualenc::EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = schedule.entries.empty() ? 0.0 : epoch_loss / schedule.entries.size();
        // model selection on the original task's dev set
        rec.dev_micro_f1 = dev_micro_f1(adapter, dev, EncoderMode::Multitask);
        rec.log_var_arg = adapter.head_params().get("mtl.log_var_arg").value(0, 0);
        rec.log_var_sarc = adapter.head_params().get("mtl.log_var_sarc").value(0, 0);
        history.epochs.push_back(rec);
        if (rec.dev_micro_f1 >= history.best_dev_f1) {  // ties keep the later epoch
            history.best_dev_f1 = rec.dev_micro_f1;
            history.best_epoch = epoch;
            best = adapter.snapshot();
        }
    }
    if (!history.diverged) adapter.restore(best);
    return history;
}

AttentionMatrices extract_attention(EncoderAdapter& adapter, const corpus::TurnPair& pair,
                                    int layer) {
    if (layer < 0 || layer >= adapter.backend().num_layers()) {
        throw std::runtime_error("attention layer " + std::to_string(layer) +
                                 " out of range [0, " +
                                 std::to_string(adapter.backend().num_layers()) + ")");
    }
    Graph g;
    PairedInput input = format_pair(pair, adapter.tokenizer(), adapter.config().max_len);
    auto encoded = adapter.backend().encode(g, input, /*training=*/false);
    AttentionMatrices out;
    out.tokens = input.tokens;
    out.layer = layer;
    out.per_head = encoded.attention.at(layer);
    return out;
}

int resolve_export_layer(int requested, int num_layers) {
    if (requested >= 0) {
        if (requested >= num_layers) {
            throw std::runtime_error("attention layer " + std::to_string(requested) +
                                     " out of range [0, " + std::to_string(num_layers) + ")");
        }
        return requested;
    }
    return num_layers > 6 ? 6 : num_layers / 2;
}

}  // namespace argsarc::encadapter
