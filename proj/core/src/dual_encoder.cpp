#include "argsarc/dual_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "argsarc/text.hpp"

namespace argsarc::dualenc {

using nn::Graph;
using nn::Matrix;
using nn::Node;

int arg_label_index(corpus::ArgLabel l) {
    switch (l) {
        case corpus::ArgLabel::Agree: return 0;
        case corpus::ArgLabel::Disagree: return 1;
        case corpus::ArgLabel::None: return 2;
    }
    return -1;
}

int sarc_label_index(corpus::SarcLabel l) {
    return l == corpus::SarcLabel::Sarcastic ? 0 : 1;
}

corpus::ArgLabel arg_label_from_index(int i) {
    switch (i) {
        case 0: return corpus::ArgLabel::Agree;
        case 1: return corpus::ArgLabel::Disagree;
        case 2: return corpus::ArgLabel::None;
    }
    throw std::runtime_error("bad arg label index");
}

corpus::SarcLabel sarc_label_from_index(int i) {
    return i == 0 ? corpus::SarcLabel::Sarcastic : corpus::SarcLabel::NotSarcastic;
}

void EncoderConfig::validate() const {
    if (hidden_size <= 0 || embed_dim <= 0 || batch_size <= 0 || epochs <= 0) {
        throw std::runtime_error("encoder sizes must be positive");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw std::runtime_error("dropout must be in [0, 1)");
    }
}

EmbeddingTable build_embeddings(const std::vector<std::string>& train_texts,
                                const PretrainedLookup& pretrained,
                                const EmbeddingOptions& opts) {
    std::unordered_map<std::string, int> counts;
    for (const auto& t : train_texts) {
        for (const auto& tok : text::tokenize(t)) counts[tok]++;
    }
    std::vector<std::string> kept;
    for (const auto& [tok, n] : counts) {
        if (n >= opts.min_frequency) kept.push_back(tok);
    }
    std::sort(kept.begin(), kept.end());

    EmbeddingTable table;
    table.dim = opts.dim;
    table.vectors.resize(kept.size() + 1, opts.dim);
    std::mt19937_64 unk_rng(opts.seed);
    for (size_t i = 0; i < kept.size(); ++i) {
        table.vocabulary[kept[i]] = static_cast<int>(i);
        std::optional<Eigen::VectorXd> vec = pretrained ? pretrained(kept[i]) : std::nullopt;
        if (vec) {
            if (vec->size() != opts.dim) {
                throw std::runtime_error("pretrained vector dimension mismatch for '" +
                                         kept[i] + "'");
            }
            table.vectors.row(i) = vec->transpose();
        } else {
            // deterministic per-token fallback
            std::mt19937_64 tok_rng(opts.seed ^ text::fnv1a(kept[i]));
            table.vectors.row(i) = nn::gaussian(1, opts.dim, 0.1, tok_rng);
        }
    }
    table.unk_row = static_cast<int>(kept.size());
    table.vectors.row(table.unk_row) = nn::gaussian(1, opts.dim, opts.unk_stddev, unk_rng);
    return table;
}

PretrainedLookup load_pretrained_vectors(const std::string& path, int dim) {
    auto table = std::make_shared<std::unordered_map<std::string, Eigen::VectorXd>>();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream is(line);
        std::string tok;
        is >> tok;
        Eigen::VectorXd v(dim);
        bool ok = true;
        for (int i = 0; i < dim; ++i) {
            if (!(is >> v[i])) { ok = false; break; }
        }
        if (ok) (*table)[tok] = std::move(v);
    }
    return [table](const std::string& token) -> std::optional<Eigen::VectorXd> {
        auto it = table->find(token);
        if (it == table->end()) return std::nullopt;
        return it->second;
    };
}

AttendResult attend(Graph& g, Node* states, Node* context, Node* projection,
                    Node* projection_bias) {
    if (states->value.cols() < 1) throw std::runtime_error("attend: empty state sequence");
    Node* u = g.tanh(g.add_broadcast_col(g.matmul(projection, states), projection_bias));
    Node* scores = g.matmul(g.transpose(u), context);  // n x 1
    Node* weights = g.softmax_col(scores);
    Node* output = g.matmul(states, weights);
    return {output, weights};
}

DualEncoder::DualEncoder(EncoderConfig config, EmbeddingTable embeddings)
    : config_(std::move(config)), embeddings_(std::move(embeddings)), rng_(config_.seed) {
    config_.validate();
    if (config_.attention_dim == 0) config_.attention_dim = config_.hidden_size;
    const int h = config_.hidden_size;
    const int d = config_.embed_dim;
    const int k = config_.attention_dim;
    auto add_lstm = [&](const std::string& prefix, int input_dim) {
        params_.add(prefix + ".Wx", nn::glorot_uniform(4 * h, input_dim, rng_));
        params_.add(prefix + ".Wh", nn::glorot_uniform(4 * h, h, rng_));
        params_.add(prefix + ".b", Matrix::Zero(4 * h, 1));
    };
    auto add_attn = [&](const std::string& prefix) {
        params_.add(prefix + ".W", nn::glorot_uniform(k, h, rng_));
        params_.add(prefix + ".b", Matrix::Zero(k, 1));
        params_.add(prefix + ".context", nn::glorot_uniform(k, 1, rng_));
    };
    for (const std::string side : {"pt", "ct"}) {
        add_lstm(side + ".word_lstm", d);
        add_attn(side + ".word_attn");
        add_lstm(side + ".sent_lstm", h);
        add_attn(side + ".sent_attn");
    }
    params_.add("head.arg.W", nn::glorot_uniform(3, 2 * h, rng_));
    params_.add("head.arg.b", Matrix::Zero(3, 1));
    params_.add("head.sarc.W", nn::glorot_uniform(2, 2 * h, rng_));
    params_.add("head.sarc.b", Matrix::Zero(2, 1));
    params_.add("mtl.log_var_arg", Matrix::Zero(1, 1));
    params_.add("mtl.log_var_sarc", Matrix::Zero(1, 1));
}

Node* DualEncoder::lstm_sequence(Graph& g, const std::vector<Node*>& inputs,
                                 const std::string& prefix) {
    const int h = config_.hidden_size;
    Node* Wx = g.param(params_.get(prefix + ".Wx"));
    Node* Wh = g.param(params_.get(prefix + ".Wh"));
    Node* b = g.param(params_.get(prefix + ".b"));
    Node* hidden = g.constant(Matrix::Zero(h, 1));
    Node* cell = g.constant(Matrix::Zero(h, 1));
    std::vector<Node*> states;
    states.reserve(inputs.size());
    for (Node* x : inputs) {
        Node* gates = g.add(g.add(g.matmul(Wx, x), g.matmul(Wh, hidden)), b);
        Node* in_gate = g.sigmoid(g.slice_rows(gates, 0, h));
        Node* forget_gate = g.sigmoid(g.slice_rows(gates, h, h));
        Node* out_gate = g.sigmoid(g.slice_rows(gates, 2 * h, h));
        Node* candidate = g.tanh(g.slice_rows(gates, 3 * h, h));
        cell = g.add(g.cwise_mul(forget_gate, cell), g.cwise_mul(in_gate, candidate));
        hidden = g.cwise_mul(out_gate, g.tanh(cell));
        states.push_back(hidden);
    }
    return g.concat_cols(states);
}

DualEncoder::TurnEncoding DualEncoder::encode_turn(Graph& g, const std::string& turn_text,
                                                   const std::string& side) {
    auto sentences = text::split_sentences(turn_text);
    if (sentences.size() > static_cast<size_t>(config_.max_sentences_per_turn)) {
        sentences.resize(config_.max_sentences_per_turn);
    }
    TurnEncoding enc;
    std::vector<Node*> sentence_vectors;
    Node* word_W = g.param(params_.get(side + ".word_attn.W"));
    Node* word_b = g.param(params_.get(side + ".word_attn.b"));
    Node* word_ctx = g.param(params_.get(side + ".word_attn.context"));
    for (const auto& sentence : sentences) {
        auto tokens = text::tokenize(sentence);
        if (tokens.size() > static_cast<size_t>(config_.max_tokens_per_sentence)) {
            tokens.resize(config_.max_tokens_per_sentence);
        }
        if (tokens.empty()) continue;
        std::vector<Node*> embedded;
        embedded.reserve(tokens.size());
        for (const auto& tok : tokens) {
            embedded.push_back(
                g.constant(embeddings_.vectors.row(embeddings_.row_for(tok)).transpose()));
        }
        Node* states = lstm_sequence(g, embedded, side + ".word_lstm");
        AttendResult att = attend(g, states, word_ctx, word_W, word_b);
        sentence_vectors.push_back(att.output);
        const auto& w = att.weights->value;
        enc.attention.word_level.emplace_back(w.data(), w.data() + w.size());
    }
    if (sentence_vectors.empty()) {
        throw std::runtime_error("empty turn cannot be encoded");
    }
    Node* sent_states = lstm_sequence(g, sentence_vectors, side + ".sent_lstm");
    AttendResult att = attend(g, sent_states, g.param(params_.get(side + ".sent_attn.context")),
                              g.param(params_.get(side + ".sent_attn.W")),
                              g.param(params_.get(side + ".sent_attn.b")));
    enc.vector = att.output;
    const auto& w = att.weights->value;
    enc.attention.sentence_level.assign(w.data(), w.data() + w.size());
    return enc;
}

DualEncoder::Forward DualEncoder::forward(Graph& g, const corpus::TurnPair& pair,
                                          TaskMode mode, bool training) {
    Forward fwd;
    TurnEncoding pt = encode_turn(g, pair.prior_turn, "pt");
    TurnEncoding ct = encode_turn(g, pair.current_turn, "ct");
    fwd.output.v_pt = pt.vector->value.col(0);
    fwd.output.v_ct = ct.vector->value.col(0);
    fwd.output.attention_pt = std::move(pt.attention);
    fwd.output.attention_ct = std::move(ct.attention);
    Node* joint = g.concat_rows({pt.vector, ct.vector});
    joint = g.dropout(joint, config_.dropout, rng_, training);
    fwd.arg_logits = g.add(g.matmul(g.param(params_.get("head.arg.W")), joint),
                           g.param(params_.get("head.arg.b")));
    if (mode == TaskMode::Multitask) {
        fwd.sarc_logits = g.add(g.matmul(g.param(params_.get("head.sarc.W")), joint),
                                g.param(params_.get("head.sarc.b")));
    }
    return fwd;
}

std::vector<std::pair<std::string, Matrix>> DualEncoder::snapshot() const {
    std::vector<std::pair<std::string, Matrix>> snap;
    for (const auto* p : params_.all()) snap.emplace_back(p->name, p->value);
    return snap;
}

void DualEncoder::restore(const std::vector<std::pair<std::string, Matrix>>& snap) {
    for (const auto& [name, value] : snap) params_.get(name).value = value;
}

PairPrediction predict(DualEncoder& model, const corpus::TurnPair& pair, TaskMode mode) {
    Graph g;
    auto fwd = model.forward(g, pair, mode, /*training=*/false);
    PairPrediction pred{};
    int arg_idx = 0;
    fwd.arg_logits->value.col(0).maxCoeff(&arg_idx);
    pred.arg = arg_label_from_index(arg_idx);
    if (fwd.sarc_logits) {
        int sarc_idx = 0;
        fwd.sarc_logits->value.col(0).maxCoeff(&sarc_idx);
        pred.sarc = sarc_label_from_index(sarc_idx);
    }
    return pred;
}

namespace {

double dev_micro_f1(DualEncoder& model, const std::vector<corpus::TurnPair>& dev,
                    TaskMode mode) {
    int correct = 0, total = 0;
    for (const auto& pair : dev) {
        if (!pair.arg_label) continue;
        auto pred = predict(model, pair, mode);
        if (pred.arg == *pair.arg_label) ++correct;
        ++total;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

}  // namespace

TrainHistory train_dual(DualEncoder& model, const std::vector<corpus::TurnPair>& train,
                        const std::vector<corpus::TurnPair>& dev, LossMode loss_mode,
                        std::vector<mtl::StepLogEntry>* step_log) {
    TaskMode mode = loss_mode == LossMode::Single ? TaskMode::Single : TaskMode::Multitask;
    std::vector<size_t> usable;
    for (size_t i = 0; i < train.size(); ++i) {
        const auto& p = train[i];
        if (!p.arg_label) continue;
        if (mode == TaskMode::Multitask && !p.sarc_label) continue;
        usable.push_back(i);
    }
    if (usable.empty()) throw std::runtime_error("no trainable pairs");

    const auto& cfg = model.config();
    nn::AdamOptions adam_opts;
    adam_opts.learning_rate = cfg.learning_rate;
    nn::AdamOptimizer optimizer(adam_opts);

    TrainHistory history;
    auto best = model.snapshot();
    auto last_good = best;
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(usable.begin(), usable.end(), model.rng());
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
                auto fwd = model.forward(g, pair, mode, /*training=*/true);
                Node* ce = g.cross_entropy(fwd.arg_logits, arg_label_index(*pair.arg_label));
                arg_loss = arg_loss ? g.add(arg_loss, ce) : ce;
                if (mode == TaskMode::Multitask) {
                    Node* sce = g.cross_entropy(fwd.sarc_logits,
                                                sarc_label_index(*pair.sarc_label));
                    sarc_loss = sarc_loss ? g.add(sarc_loss, sce) : sce;
                }
                ++count;
            }
            arg_loss = g.scale(arg_loss, 1.0 / count);
            if (sarc_loss) sarc_loss = g.scale(sarc_loss, 1.0 / count);
            Node* total = arg_loss;
            if (loss_mode == LossMode::MtSum) {
                total = g.add(arg_loss, sarc_loss);
            } else if (loss_mode == LossMode::MtUncertainty) {
                Node* lv_arg = g.param(model.params().get("mtl.log_var_arg"));
                Node* lv_sarc = g.param(model.params().get("mtl.log_var_sarc"));
                total = mtl::uncertainty_loss_node(g, {arg_loss, sarc_loss},
                                                   {lv_arg, lv_sarc});
            }
            double loss_value = total->value(0, 0);
            if (!std::isfinite(loss_value)) {
                model.restore(last_good);
                history.diverged = true;
                aborted = true;
                break;
            }
            model.params().zero_grad();
            g.backward(total);
            optimizer.step(model.params());
            last_good = model.snapshot();
            epoch_loss += loss_value;
            ++batches;
            ++step;
            if (step_log) {
                step_log->push_back({step, mtl::TaskId::Arg, loss_value,
                                     model.params().get("mtl.log_var_arg").value(0, 0),
                                     model.params().get("mtl.log_var_sarc").value(0, 0)});
            }
        }
        if (aborted) break;
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = batches > 0 ? epoch_loss / batches : 0.0;
        rec.dev_micro_f1 = dev_micro_f1(model, dev, mode);
        rec.log_var_arg = model.params().get("mtl.log_var_arg").value(0, 0);
        rec.log_var_sarc = model.params().get("mtl.log_var_sarc").value(0, 0);
        history.epochs.push_back(rec);
        if (rec.dev_micro_f1 >= history.best_dev_f1) {  // ties keep the later epoch
            history.best_dev_f1 = rec.dev_micro_f1;
            history.best_epoch = epoch;
            best = model.snapshot();
        }
    }
    if (!history.diverged) model.restore(best);
    return history;
}

}  // namespace argsarc::dualenc
