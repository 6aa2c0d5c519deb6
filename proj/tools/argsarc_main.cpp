// argsarc command-line surface: prepare, train-lr, train-dual,
// train-encoder, eval, attn-export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "argsarc/checkpoint.hpp"
#include "argsarc/corpus.hpp"
#include "argsarc/dual_encoder.hpp"
#include "argsarc/encoder_adapter.hpp"
#include "argsarc/eval.hpp"
#include "argsarc/features.hpp"
#include "argsarc/linear_model.hpp"
#include "argsarc/mtl.hpp"
#include "argsarc/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace argsarc;

namespace {

const std::vector<std::string> kVariants = {
    "lr_argf", "lr_argf_sarcf", "lstm_attn",   "lstm_mt",    "lstm_mt_uncert",
    "enc_orig", "enc_mt",       "enc_mt_uncert", "enc_alt"};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string hash_hex(const std::string& data) {
    std::ostringstream os;
    os << std::hex << text::fnv1a(data);
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

// Shared per-command state: config file + flag overrides, resolved
// settings echoed into the run manifest.
struct RunContext {
    std::string command;
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    std::string variant;
    json settings = json::object();
    std::vector<std::string> input_files;

    json load_config(const std::set<std::string>& allowed_keys) {
        json cfg = json::object();
        if (!config_path.empty()) {
            cfg = json::parse(read_file(config_path));
            if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
            for (auto it = cfg.begin(); it != cfg.end(); ++it) {
                if (!allowed_keys.count(it.key())) {
                    throw std::runtime_error("unknown config key '" + it.key() +
                                             "' for " + command);
                }
            }
        }
        return cfg;
    }

    void write_manifest() const {
        json m;
        m["command"] = command;
        if (!variant.empty()) m["variant"] = variant;
        m["seed"] = seed;
        m["config_file"] = config_path.empty() ? json() : json(config_path);
        m["config_hash"] = config_path.empty() ? json() : json(hash_hex(read_file(config_path)));
        m["inputs"] = json::object();
        for (const auto& f : input_files) m["inputs"][f] = hash_hex(read_file(f));
        m["settings"] = settings;
        m["out_dir"] = out_dir;
        fs::create_directories(out_dir);
        write_file((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
    }
};

struct SplitCorpus {
    std::vector<corpus::TurnPair> train, dev, test;
};

SplitCorpus load_splits(const std::string& path) {
    auto report = corpus::load_corpus(path);
    for (const auto& e : report.errors) {
        std::cerr << "warning: " << path << ":" << e.line << ": " << e.message << "\n";
    }
    SplitCorpus out;
    for (auto& p : report.pairs) {
        if (!p.split) throw std::runtime_error("pair '" + p.id + "' has no split tag; run prepare first");
        switch (*p.split) {
            case corpus::Split::Train: out.train.push_back(std::move(p)); break;
            case corpus::Split::Dev: out.dev.push_back(std::move(p)); break;
            case corpus::Split::Test: out.test.push_back(std::move(p)); break;
        }
    }
    return out;
}

std::string arg_label_name(corpus::ArgLabel l) { return corpus::to_string(l); }

// ---- prepare ---------------------------------------------------------

int cmd_prepare(RunContext& ctx, const std::string& in_path, const std::string& aux_path) {
    auto cfg = ctx.load_config({"train_ratio", "dev_ratio", "test_ratio", "seed"});
    corpus::SplitSpec spec;
    spec.train_ratio = cfg.value("train_ratio", spec.train_ratio);
    spec.dev_ratio = cfg.value("dev_ratio", spec.dev_ratio);
    spec.test_ratio = cfg.value("test_ratio", spec.test_ratio);
    spec.seed = cfg.value("seed", ctx.seed);
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("split ratio config: ") + e.what());
    }

    auto report = corpus::load_corpus(in_path);
    for (const auto& e : report.errors) {
        std::cerr << "warning: " << in_path << ":" << e.line << ": " << e.message << "\n";
    }
    ctx.input_files.push_back(in_path);

    std::vector<corpus::TurnPair> merged;
    if (report.pairs.empty()) {
        std::cerr << "warning: empty corpus, writing empty splits\n";
    } else {
        auto split = corpus::stratified_split(report.pairs, spec);
        for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";
        merged = split.train;
        merged.insert(merged.end(), split.dev.begin(), split.dev.end());
        merged.insert(merged.end(), split.test.begin(), split.test.end());
    }

    if (!aux_path.empty()) {
        auto aux_report = corpus::load_corpus(aux_path);
        for (const auto& e : aux_report.errors) {
            std::cerr << "warning: " << aux_path << ":" << e.line << ": " << e.message << "\n";
        }
        auto result = corpus::merge_auxiliary_sarcasm(merged, aux_report.pairs);
        for (const auto& d : result.diagnostics) std::cerr << "warning: " << d << "\n";
        // auxiliary pairs train only
        for (size_t i = merged.size(); i < result.merged.size(); ++i) {
            result.merged[i].split = corpus::Split::Train;
        }
        std::cerr << "merged " << result.merged.size() - merged.size()
                  << " auxiliary pairs, dropped " << result.duplicates_dropped
                  << " duplicates\n";
        merged = std::move(result.merged);
        ctx.input_files.push_back(aux_path);
    }

    fs::create_directories(ctx.out_dir);
    corpus::save_corpus(merged, (fs::path(ctx.out_dir) / "splits.jsonl").string());
    auto stats = corpus::compute_stats(merged);
    write_file((fs::path(ctx.out_dir) / "stats.txt").string(), corpus::render_stats(stats));

    ctx.settings = {{"train_ratio", spec.train_ratio},
                    {"dev_ratio", spec.dev_ratio},
                    {"test_ratio", spec.test_ratio},
                    {"seed", spec.seed},
                    {"aux", aux_path}};
    ctx.write_manifest();
    std::cout << corpus::render_stats(stats);
    return 0;
}

// ---- train-lr --------------------------------------------------------

int cmd_train_lr(RunContext& ctx, const std::string& in_path) {
    auto cfg = ctx.load_config({"c", "grid_search", "ngram_orders", "features",
                                "class_weighting", "category_lexicon"});
    if (ctx.variant != "lr_argf" && ctx.variant != "lr_argf_sarcf") {
        throw std::runtime_error("unknown variant '" + ctx.variant + "' for train-lr");
    }
    features::FeatureMode mode = ctx.variant == "lr_argf"
                                     ? features::FeatureMode::ArgF
                                     : features::FeatureMode::ArgFSarcF;
    if (cfg.contains("features")) {
        std::string requested = cfg["features"].get<std::string>();
        if (requested != "argf" && requested != "argf_sarcf") {
            throw std::runtime_error("config key 'features' must be argf or argf_sarcf");
        }
        if (ctx.variant == "lr_argf" && requested == "argf_sarcf") {
            throw std::runtime_error(
                "variant lr_argf refuses sarcf features; use lr_argf_sarcf");
        }
        mode = requested == "argf" ? features::FeatureMode::ArgF
                                   : features::FeatureMode::ArgFSarcF;
    }

    auto splits = load_splits(in_path);
    ctx.input_files.push_back(in_path);
    auto labeled = [](const std::vector<corpus::TurnPair>& v) {
        std::vector<corpus::TurnPair> out;
        for (const auto& p : v) {
            if (p.arg_label) out.push_back(p);
        }
        return out;
    };
    auto train_pairs = labeled(splits.train);
    auto dev_pairs = labeled(splits.dev);
    auto test_pairs = labeled(splits.test);
    if (train_pairs.empty()) throw std::runtime_error("no labeled training pairs");

    features::Extractor extractor;
    if (cfg.contains("ngram_orders")) {
        extractor.ngram_orders.clear();
        for (int n : cfg["ngram_orders"].get<std::vector<int>>()) {
            extractor.ngram_orders.insert(n);
        }
    }
    if (cfg.contains("category_lexicon")) {
        extractor.lexicons.category_lexicon =
            features::load_category_lexicon(cfg["category_lexicon"].get<std::string>());
    }
    std::vector<std::string> train_texts;
    for (const auto& p : train_pairs) train_texts.push_back(p.current_turn);
    extractor.vocabulary =
        features::build_ngram_vocabulary(train_texts, extractor.ngram_orders);

    std::vector<std::string> warnings;
    auto featurize = [&](const std::vector<corpus::TurnPair>& pairs) {
        std::vector<features::FeatureVector> out;
        for (const auto& p : pairs) out.push_back(extractor.compose(p, mode, &warnings));
        return out;
    };
    auto train_fv = featurize(train_pairs);
    auto dev_fv = featurize(dev_pairs);
    auto test_fv = featurize(test_pairs);
    if (mode == features::FeatureMode::ArgF) {
        for (const auto& fv : train_fv) {
            for (const auto& [name, v] : fv.entries) {
                if (name.rfind("argf:", 0) != 0) {
                    throw std::runtime_error("namespace guard: non-argf feature '" + name +
                                             "' in an argf-only run");
                }
            }
        }
    }

    std::vector<std::string> label_set = {"A", "D", "N"};
    auto to_label = [&](corpus::ArgLabel l) {
        return static_cast<int>(std::find(label_set.begin(), label_set.end(),
                                          arg_label_name(l)) -
                                label_set.begin());
    };
    auto labels_of = [&](const std::vector<corpus::TurnPair>& pairs) {
        std::vector<int> out;
        for (const auto& p : pairs) out.push_back(to_label(*p.arg_label));
        return out;
    };
    auto y_train = labels_of(train_pairs);
    auto y_dev = labels_of(dev_pairs);
    auto y_test = labels_of(test_pairs);

    auto index = linear::build_feature_index(train_fv);
    auto X_train = linear::vectorize(train_fv, index);
    auto X_dev = linear::vectorize(dev_fv, index);
    auto X_test = linear::vectorize(test_fv, index);

    linear::TrainOptions opts;
    opts.seed = ctx.seed;
    if (cfg.contains("class_weighting")) {
        std::string w = cfg["class_weighting"].get<std::string>();
        if (w == "none") opts.weighting = linear::ClassWeighting::None;
        else if (w == "inverse") opts.weighting = linear::ClassWeighting::InverseProportional;
        else if (w == "proportional") opts.weighting = linear::ClassWeighting::Proportional;
        else throw std::runtime_error("config key 'class_weighting' must be none, inverse, or proportional");
    }
    json metrics;
    if (cfg.contains("c")) {
        opts.c = cfg["c"].get<double>();
    } else if (cfg.value("grid_search", true) && !dev_pairs.empty()) {
        auto grid = linear::grid_search_c(X_train, y_train, X_dev, y_dev, label_set,
                                          index, linear::default_c_grid(), opts);
        opts.c = grid.chosen_c;
        metrics["grid"] = {{"tried_c", grid.tried_c},
                           {"dev_scores", grid.dev_scores},
                           {"chosen_c", grid.chosen_c}};
    }
    auto model = linear::train(X_train, y_train, label_set, index, opts);

    auto evaluate_split = [&](const std::vector<corpus::TurnPair>& pairs,
                              const linear::DesignMatrix& X, const std::vector<int>& y,
                              const std::string& name) {
        if (pairs.empty()) return;
        std::vector<int> preds;
        std::vector<eval::PredictionRecord> records;
        for (size_t i = 0; i < X.rows.size(); ++i) {
            auto pred = linear::predict_row(model, X.rows[i]);
            preds.push_back(pred.label);
            std::vector<double> probs(pred.probabilities.data(),
                                      pred.probabilities.data() + pred.probabilities.size());
            records.push_back({pairs[i].id, label_set[y[i]], label_set[pred.label], probs});
        }
        auto report = eval::evaluate(y, preds, label_set);
        metrics[name] = json::parse(report.to_json());
        eval::save_predictions(records,
                               (fs::path(ctx.out_dir) / ("preds_" + name + ".jsonl")).string());
        std::cout << name << ":\n" << report.render_text();
    };

    fs::create_directories(ctx.out_dir);
    evaluate_split(dev_pairs, X_dev, y_dev, "dev");
    evaluate_split(test_pairs, X_test, y_test, "test");

    metrics["top_features"] = json::object();
    auto top = linear::top_features(model, 10);
    for (size_t c = 0; c < label_set.size(); ++c) {
        metrics["top_features"][label_set[c]] = top[c];
    }
    write_file((fs::path(ctx.out_dir) / "model.json").string(), model.to_json());
    write_file((fs::path(ctx.out_dir) / "metrics.json").string(), metrics.dump(2) + "\n");
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    ctx.settings = {{"variant", ctx.variant},
                    {"features", mode == features::FeatureMode::ArgF ? "argf" : "argf_sarcf"},
                    {"c", opts.c},
                    {"seed", ctx.seed}};
    ctx.write_manifest();
    return 0;
}

// ---- train-dual ------------------------------------------------------

dualenc::EncoderConfig dual_config_from(const json& cfg, uint64_t seed) {
    dualenc::EncoderConfig c;
    c.embed_dim = cfg.value("embed_dim", c.embed_dim);
    c.hidden_size = cfg.value("hidden_size", c.hidden_size);
    c.dropout = cfg.value("dropout", c.dropout);
    c.epochs = cfg.value("epochs", c.epochs);
    c.batch_size = cfg.value("batch_size", c.batch_size);
    c.learning_rate = cfg.value("learning_rate", c.learning_rate);
    c.max_tokens_per_sentence = cfg.value("max_tokens_per_sentence", c.max_tokens_per_sentence);
    c.max_sentences_per_turn = cfg.value("max_sentences_per_turn", c.max_sentences_per_turn);
    c.seed = seed;
    c.validate();
    return c;
}

json dual_config_to_json(const dualenc::EncoderConfig& c) {
    return {{"embed_dim", c.embed_dim},
            {"hidden_size", c.hidden_size},
            {"dropout", c.dropout},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"max_tokens_per_sentence", c.max_tokens_per_sentence},
            {"max_sentences_per_turn", c.max_sentences_per_turn},
            {"seed", c.seed}};
}

void save_dual_model(const std::string& out_dir, const std::string& variant,
                     const dualenc::DualEncoder& model) {
    json doc;
    doc["kind"] = "dual";
    doc["variant"] = variant;
    doc["config"] = dual_config_to_json(model.config());
    const auto& emb = model.embeddings();
    doc["embeddings"] = {{"dim", emb.dim}, {"unk_row", emb.unk_row}};
    doc["embeddings"]["vocabulary"] = json::object();
    for (const auto& [tok, row] : emb.vocabulary) {
        doc["embeddings"]["vocabulary"][tok] = row;
    }
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < emb.vectors.rows(); ++r) {
        rows.emplace_back(emb.vectors.row(r).data(),
                          emb.vectors.row(r).data() + emb.vectors.cols());
    }
    doc["embeddings"]["vectors"] = rows;
    write_file((fs::path(out_dir) / "model.json").string(), doc.dump() + "\n");
}

dualenc::DualEncoder load_dual_model(const std::string& model_dir, std::string* variant) {
    json doc = json::parse(read_file((fs::path(model_dir) / "model.json").string()));
    if (doc.at("kind") != "dual") throw std::runtime_error("model is not a dual encoder");
    if (variant) *variant = doc.at("variant").get<std::string>();
    dualenc::EncoderConfig cfg = dual_config_from(doc.at("config"),
                                                  doc.at("config").at("seed").get<uint64_t>());
    dualenc::EmbeddingTable table;
    const auto& emb = doc.at("embeddings");
    table.dim = emb.at("dim").get<int>();
    table.unk_row = emb.at("unk_row").get<int>();
    for (auto it = emb.at("vocabulary").begin(); it != emb.at("vocabulary").end(); ++it) {
        table.vocabulary[it.key()] = it.value().get<int>();
    }
    auto rows = emb.at("vectors").get<std::vector<std::vector<double>>>();
    table.vectors.resize(static_cast<int>(rows.size()), table.dim);
    for (size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < table.dim; ++c) table.vectors(static_cast<int>(r), c) = rows[r][c];
    }
    dualenc::DualEncoder model(cfg, std::move(table));
    checkpoint::load_weights(model.params(),
                             (fs::path(model_dir) / "weights.bin").string());
    return model;
}

void write_step_log(const std::string& path, const std::vector<mtl::StepLogEntry>& log) {
    std::ofstream out(path);
    for (const auto& e : log) out << mtl::step_log_to_json_line(e) << "\n";
}

void write_epoch_log(const std::string& path, const dualenc::TrainHistory& history) {
    std::ofstream out(path);
    for (const auto& e : history.epochs) {
        json j = {{"epoch", e.epoch},
                  {"train_loss", e.train_loss},
                  {"dev_micro_f1", e.dev_micro_f1},
                  {"log_var_arg", e.log_var_arg},
                  {"log_var_sarc", e.log_var_sarc}};
        out << j.dump() << "\n";
    }
    json tail = {{"best_epoch", history.best_epoch},
                 {"best_dev_f1", history.best_dev_f1},
                 {"diverged", history.diverged}};
    out << tail.dump() << "\n";
}

template <typename Predict>
void write_pair_predictions(const std::string& path,
                            const std::vector<corpus::TurnPair>& pairs,
                            const Predict& predict_fn, bool sarc_task) {
    std::vector<eval::PredictionRecord> records;
    for (const auto& p : pairs) {
        auto pred = predict_fn(p);
        if (sarc_task) {
            if (!p.sarc_label || !pred.sarc) continue;
            records.push_back({p.id, corpus::to_string(*p.sarc_label),
                               corpus::to_string(*pred.sarc), {}});
        } else {
            if (!p.arg_label) continue;
            records.push_back({p.id, corpus::to_string(*p.arg_label),
                               corpus::to_string(pred.arg), {}});
        }
    }
    eval::save_predictions(records, path);
}

int cmd_train_dual(RunContext& ctx, const std::string& in_path) {
    auto cfg = ctx.load_config({"embed_dim", "hidden_size", "dropout", "epochs",
                                "batch_size", "learning_rate", "min_frequency",
                                "max_tokens_per_sentence", "max_sentences_per_turn",
                                "pretrained_vectors"});
    dualenc::LossMode loss_mode;
    if (ctx.variant == "lstm_attn") loss_mode = dualenc::LossMode::Single;
    else if (ctx.variant == "lstm_mt") loss_mode = dualenc::LossMode::MtSum;
    else if (ctx.variant == "lstm_mt_uncert") loss_mode = dualenc::LossMode::MtUncertainty;
    else throw std::runtime_error("unknown variant '" + ctx.variant + "' for train-dual");

    auto splits = load_splits(in_path);
    ctx.input_files.push_back(in_path);
    auto config = dual_config_from(cfg, ctx.seed);

    std::vector<std::string> train_texts;
    for (const auto& p : splits.train) {
        train_texts.push_back(p.prior_turn);
        train_texts.push_back(p.current_turn);
    }
    dualenc::EmbeddingOptions eopts;
    eopts.dim = config.embed_dim;
    eopts.min_frequency = cfg.value("min_frequency", eopts.min_frequency);
    eopts.seed = ctx.seed;
    dualenc::PretrainedLookup lookup = nullptr;
    if (cfg.contains("pretrained_vectors")) {
        lookup = dualenc::load_pretrained_vectors(
            cfg["pretrained_vectors"].get<std::string>(), eopts.dim);
    }
    auto embeddings = dualenc::build_embeddings(train_texts, lookup, eopts);

    dualenc::DualEncoder model(config, std::move(embeddings));
    std::vector<mtl::StepLogEntry> step_log;
    auto history = dualenc::train_dual(model, splits.train, splits.dev, loss_mode, &step_log);
    if (history.diverged) std::cerr << "warning: training diverged; best snapshot restored\n";

    fs::create_directories(ctx.out_dir);
    save_dual_model(ctx.out_dir, ctx.variant, model);
    checkpoint::save_weights(model.params(),
                             (fs::path(ctx.out_dir) / "weights.bin").string());
    write_epoch_log((fs::path(ctx.out_dir) / "metrics.jsonl").string(), history);
    write_step_log((fs::path(ctx.out_dir) / "step_log.jsonl").string(), step_log);

    dualenc::TaskMode task_mode = loss_mode == dualenc::LossMode::Single
                                      ? dualenc::TaskMode::Single
                                      : dualenc::TaskMode::Multitask;
    auto predict_fn = [&](const corpus::TurnPair& p) {
        return dualenc::predict(model, p, task_mode);
    };
    write_pair_predictions((fs::path(ctx.out_dir) / "preds_test.jsonl").string(),
                           splits.test, predict_fn, /*sarc_task=*/false);
    if (task_mode == dualenc::TaskMode::Multitask) {
        write_pair_predictions((fs::path(ctx.out_dir) / "preds_sarc_test.jsonl").string(),
                               splits.test, predict_fn, /*sarc_task=*/true);
    }

    ctx.settings = dual_config_to_json(config);
    ctx.settings["variant"] = ctx.variant;
    ctx.settings["min_frequency"] = eopts.min_frequency;
    ctx.write_manifest();
    std::cout << "best dev micro-F1 " << history.best_dev_f1 << " at epoch "
              << history.best_epoch << "\n";
    return 0;
}

// ---- train-encoder ---------------------------------------------------

json backend_config_to_json(const encadapter::TinyBackendConfig& c) {
    return {{"dim", c.dim},          {"layers", c.layers},
            {"heads", c.heads},      {"vocab_buckets", c.vocab_buckets},
            {"max_positions", c.max_positions}, {"dropout", c.dropout},
            {"seed", c.seed},        {"force_uniform_attention", c.force_uniform_attention}};
}

encadapter::TinyBackendConfig backend_config_from(const json& j) {
    encadapter::TinyBackendConfig c;
    c.dim = j.value("dim", c.dim);
    c.layers = j.value("layers", c.layers);
    c.heads = j.value("heads", c.heads);
    c.vocab_buckets = j.value("vocab_buckets", c.vocab_buckets);
    c.max_positions = j.value("max_positions", c.max_positions);
    c.dropout = j.value("dropout", c.dropout);
    c.seed = j.value("seed", c.seed);
    c.force_uniform_attention = j.value("force_uniform_attention", c.force_uniform_attention);
    return c;
}

json head_config_to_json(const encadapter::HeadConfig& c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"max_len", c.max_len},
            {"seed", c.seed}};
}

encadapter::HeadConfig head_config_from(const json& j) {
    encadapter::HeadConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_len = j.value("max_len", c.max_len);
    c.seed = j.value("seed", c.seed);
    return c;
}

void save_encoder_model(const std::string& out_dir, const std::string& variant,
                        encadapter::EncoderAdapter& adapter,
                        const encadapter::TinyBackendConfig& backend_cfg) {
    json doc;
    doc["kind"] = "encoder";
    doc["variant"] = variant;
    doc["backend"] = backend_config_to_json(backend_cfg);
    doc["head"] = head_config_to_json(adapter.config());
    write_file((fs::path(out_dir) / "model.json").string(), doc.dump(2) + "\n");
    nn::ParameterStore store;
    for (const auto& [name, value] : adapter.snapshot()) store.add(name, value);
    checkpoint::save_weights(store, (fs::path(out_dir) / "weights.bin").string());
}

std::unique_ptr<encadapter::EncoderAdapter> load_encoder_model(const std::string& model_dir,
                                                               std::string* variant) {
    json doc = json::parse(read_file((fs::path(model_dir) / "model.json").string()));
    if (doc.at("kind") != "encoder") throw std::runtime_error("model is not an encoder adapter");
    if (variant) *variant = doc.at("variant").get<std::string>();
    auto backend = std::make_shared<encadapter::TinyTransformerBackend>(
        backend_config_from(doc.at("backend")));
    auto adapter = std::make_unique<encadapter::EncoderAdapter>(
        backend, head_config_from(doc.at("head")));
    nn::ParameterStore store;
    for (const auto& [name, value] : adapter->snapshot()) store.add(name, value);
    checkpoint::load_weights(store, (fs::path(model_dir) / "weights.bin").string());
    std::vector<std::pair<std::string, nn::Matrix>> snap;
    for (const nn::Parameter* p : store.all()) snap.emplace_back(p->name, p->value);
    adapter->restore(snap);
    return adapter;
}

int cmd_train_encoder(RunContext& ctx, const std::string& in_path) {
    auto cfg = ctx.load_config({"dim", "layers", "heads", "vocab_buckets",
                                "max_positions", "dropout", "force_uniform_attention",
                                "epochs", "batch_size", "learning_rate", "max_len"});
    bool alt = ctx.variant == "enc_alt";
    dualenc::LossMode loss_mode = dualenc::LossMode::Single;
    if (ctx.variant == "enc_orig") loss_mode = dualenc::LossMode::Single;
    else if (ctx.variant == "enc_mt") loss_mode = dualenc::LossMode::MtSum;
    else if (ctx.variant == "enc_mt_uncert") loss_mode = dualenc::LossMode::MtUncertainty;
    else if (!alt) throw std::runtime_error("unknown variant '" + ctx.variant + "' for train-encoder");

    auto splits = load_splits(in_path);
    ctx.input_files.push_back(in_path);

    encadapter::TinyBackendConfig backend_cfg = backend_config_from(cfg);
    backend_cfg.seed = ctx.seed;
    auto backend = std::make_shared<encadapter::TinyTransformerBackend>(backend_cfg);
    encadapter::HeadConfig head_cfg = head_config_from(cfg);
    head_cfg.seed = ctx.seed;
    encadapter::EncoderAdapter adapter(backend, head_cfg);

    std::vector<mtl::StepLogEntry> step_log;
    dualenc::TrainHistory history;
    if (alt) {
        std::vector<corpus::TurnPair> arg_corpus, sarc_corpus;
        for (const auto& p : splits.train) {
            if (p.arg_label) arg_corpus.push_back(p);
            if (p.sarc_label) sarc_corpus.push_back(p);
        }
        history = encadapter::train_alt(adapter, arg_corpus, sarc_corpus, splits.dev,
                                        ctx.seed, &step_log);
    } else {
        history = encadapter::train_encoder(adapter, splits.train, splits.dev,
                                            loss_mode, &step_log);
    }
    if (history.diverged) std::cerr << "warning: training diverged; best snapshot restored\n";

    fs::create_directories(ctx.out_dir);
    save_encoder_model(ctx.out_dir, ctx.variant, adapter, backend_cfg);
    write_epoch_log((fs::path(ctx.out_dir) / "metrics.jsonl").string(), history);
    write_step_log((fs::path(ctx.out_dir) / "step_log.jsonl").string(), step_log);

    bool multitask = alt || loss_mode != dualenc::LossMode::Single;
    auto mode = multitask ? encadapter::EncoderMode::Multitask
                          : encadapter::EncoderMode::Single;
    auto predict_fn = [&](const corpus::TurnPair& p) { return adapter.predict(p, mode); };
    write_pair_predictions((fs::path(ctx.out_dir) / "preds_test.jsonl").string(),
                           splits.test, predict_fn, /*sarc_task=*/false);
    if (multitask) {
        write_pair_predictions((fs::path(ctx.out_dir) / "preds_sarc_test.jsonl").string(),
                               splits.test, predict_fn, /*sarc_task=*/true);
    }

    ctx.settings = {{"variant", ctx.variant},
                    {"backend", backend_config_to_json(backend_cfg)},
                    {"head", head_config_to_json(head_cfg)}};
    ctx.write_manifest();
    std::cout << "best dev micro-F1 " << history.best_dev_f1 << " at epoch "
              << history.best_epoch << "\n";
    return 0;
}

// ---- eval ------------------------------------------------------------

int cmd_eval(RunContext& ctx, const std::string& preds_path, const std::string& baseline_path,
             const std::string& task) {
    ctx.load_config({});
    std::vector<std::string> labels;
    if (task == "arg") labels = {"A", "D", "N"};
    else if (task == "sarc") labels = {"S", "NS"};
    else throw std::runtime_error("task must be arg or sarc");

    auto records = eval::load_predictions(preds_path);
    ctx.input_files.push_back(preds_path);
    auto label_index = [&](const std::string& l) {
        auto it = std::find(labels.begin(), labels.end(), l);
        if (it == labels.end()) throw std::runtime_error("unknown label '" + l + "'");
        return static_cast<int>(it - labels.begin());
    };
    std::vector<int> gold, pred;
    for (const auto& r : records) {
        gold.push_back(label_index(r.gold));
        pred.push_back(label_index(r.pred));
    }
    auto report = eval::evaluate(gold, pred, labels);
    std::cout << report.render_text();

    json out = json::parse(report.to_json());
    if (!baseline_path.empty()) {
        auto base = eval::load_predictions(baseline_path);
        ctx.input_files.push_back(baseline_path);
        if (base.size() != records.size()) {
            throw std::runtime_error("baseline instance count differs");
        }
        std::vector<int> base_pred;
        for (size_t i = 0; i < base.size(); ++i) {
            if (base[i].id != records[i].id) {
                throw std::runtime_error("id misalignment at row " + std::to_string(i) +
                                         " ('" + records[i].id + "' vs '" + base[i].id + "')");
            }
            base_pred.push_back(label_index(base[i].pred));
        }
        auto sig = eval::mcnemar(gold, pred, base_pred);
        out["mcnemar_vs_baseline"] = {{"b", sig.b},
                                      {"c", sig.c},
                                      {"p_value", sig.p_value},
                                      {"significant_at_0_05", sig.significant_at_0_05},
                                      {"no_discordance", sig.no_discordance},
                                      {"method", sig.method}};
        std::cout << "McNemar vs baseline: b=" << sig.b << " c=" << sig.c
                  << " p=" << sig.p_value << (sig.significant_at_0_05 ? " *" : "") << "\n";
    }
    if (!ctx.out_dir.empty()) {
        fs::create_directories(ctx.out_dir);
        write_file((fs::path(ctx.out_dir) / "report.json").string(), out.dump(2) + "\n");
        ctx.settings = {{"task", task}};
        ctx.write_manifest();
    }
    return 0;
}

// ---- attn-export -----------------------------------------------------

std::string css_color(double weight) {
    int alpha = static_cast<int>(std::min(1.0, std::max(0.0, weight)) * 255);
    std::ostringstream os;
    os << "rgba(178,24,43," << alpha / 255.0 << ")";
    return os.str();
}

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string dual_heatmap_html(const json& trace) {
    std::ostringstream os;
    os << "<!DOCTYPE html><html><head><meta charset=\"utf-8\">"
       << "<title>attention " << html_escape(trace.at("id").get<std::string>())
       << "</title><style>body{font-family:monospace}"
       << ".tok{display:inline-block;padding:2px 4px;margin:1px}"
       << ".sent{margin:4px 0}</style></head><body>";
    os << "<h2>pair " << html_escape(trace.at("id").get<std::string>()) << "</h2>";
    for (const char* side : {"pt", "ct"}) {
        os << "<h3>" << side << "</h3>";
        const auto& turn = trace.at(side);
        const auto& sent_w = turn.at("sentence_weights");
        const auto& sentences = turn.at("sentences");
        for (size_t s = 0; s < sentences.size(); ++s) {
            double sw = sent_w[s].get<double>();
            os << "<div class=\"sent\" style=\"border-left:6px solid " << css_color(sw)
               << "\">";
            const auto& toks = sentences[s].at("tokens");
            const auto& weights = sentences[s].at("word_weights");
            for (size_t t = 0; t < toks.size(); ++t) {
                os << "<span class=\"tok\" style=\"background:"
                   << css_color(weights[t].get<double>()) << "\">"
                   << html_escape(toks[t].get<std::string>()) << "</span>";
            }
            os << "</div>";
        }
    }
    os << "</body></html>\n";
    return os.str();
}

std::string encoder_heatmap_html(const json& trace) {
    std::ostringstream os;
    os << "<!DOCTYPE html><html><head><meta charset=\"utf-8\">"
       << "<title>attention " << html_escape(trace.at("id").get<std::string>())
       << "</title><style>body{font-family:monospace}"
       << "td{width:18px;height:18px}th{font-weight:normal;padding:1px}"
       << "table{border-collapse:collapse;margin:12px 0}</style></head><body>";
    os << "<h2>pair " << html_escape(trace.at("id").get<std::string>()) << ", layer "
       << trace.at("layer").get<int>() << "</h2>";
    const auto& tokens = trace.at("tokens");
    const auto& heads = trace.at("heads");
    for (size_t h = 0; h < heads.size(); ++h) {
        os << "<h3>head " << h << "</h3><table><tr><th></th>";
        for (const auto& t : tokens) {
            os << "<th>" << html_escape(t.get<std::string>()) << "</th>";
        }
        os << "</tr>";
        const auto& matrix = heads[h];
        for (size_t r = 0; r < matrix.size(); ++r) {
            os << "<tr><th>" << html_escape(tokens[r].get<std::string>()) << "</th>";
            for (const auto& cell : matrix[r]) {
                os << "<td style=\"background:" << css_color(cell.get<double>())
                   << "\" title=\"" << cell.get<double>() << "\"></td>";
            }
            os << "</tr>";
        }
        os << "</table>";
    }
    os << "</body></html>\n";
    return os.str();
}

int cmd_attn_export(RunContext& ctx, const std::string& model_dir,
                    const std::string& in_path, const std::string& pair_id, int layer) {
    ctx.load_config({});
    auto report = corpus::load_corpus(in_path);
    ctx.input_files.push_back(in_path);
    const corpus::TurnPair* pair = nullptr;
    for (const auto& p : report.pairs) {
        if (p.id == pair_id) { pair = &p; break; }
    }
    if (!pair) throw std::runtime_error("unknown pair id '" + pair_id + "'");

    json model_doc = json::parse(read_file((fs::path(model_dir) / "model.json").string()));
    std::string kind = model_doc.at("kind").get<std::string>();
    json trace;
    trace["id"] = pair->id;
    if (pair->arg_label) trace["gold_arg"] = corpus::to_string(*pair->arg_label);
    if (pair->sarc_label) trace["gold_sarc"] = corpus::to_string(*pair->sarc_label);
    std::string html;

    if (kind == "dual") {
        std::string variant;
        auto model = load_dual_model(model_dir, &variant);
        bool multitask = variant != "lstm_attn";
        auto task_mode = multitask ? dualenc::TaskMode::Multitask
                                   : dualenc::TaskMode::Single;
        nn::Graph g;
        auto fwd = model.forward(g, *pair, task_mode);
        auto pred = dualenc::predict(model, *pair, task_mode);
        trace["pred_arg"] = corpus::to_string(pred.arg);
        if (pred.sarc) trace["pred_sarc"] = corpus::to_string(*pred.sarc);
        trace["model_kind"] = "dual";
        auto turn_json = [&](const std::string& turn_text,
                             const dualenc::AttentionWeights& attn) {
            json t;
            t["sentence_weights"] = attn.sentence_level;
            t["sentences"] = json::array();
            auto sentences = text::split_sentences(turn_text);
            const auto& cfg = model.config();
            if (sentences.size() > static_cast<size_t>(cfg.max_sentences_per_turn)) {
                sentences.resize(cfg.max_sentences_per_turn);
            }
            size_t used = 0;
            for (const auto& sentence : sentences) {
                auto tokens = text::tokenize(sentence);
                if (tokens.size() > static_cast<size_t>(cfg.max_tokens_per_sentence)) {
                    tokens.resize(cfg.max_tokens_per_sentence);
                }
                if (tokens.empty()) continue;
                json s;
                s["tokens"] = tokens;
                s["word_weights"] = attn.word_level.at(used);
                t["sentences"].push_back(std::move(s));
                ++used;
            }
            return t;
        };
        trace["pt"] = turn_json(pair->prior_turn, fwd.output.attention_pt);
        trace["ct"] = turn_json(pair->current_turn, fwd.output.attention_ct);
        html = dual_heatmap_html(trace);
    } else if (kind == "encoder") {
        auto adapter = load_encoder_model(model_dir, nullptr);
        int resolved = encadapter::resolve_export_layer(
            layer, adapter->backend().num_layers());
        auto attn = encadapter::extract_attention(*adapter, *pair, resolved);
        trace["model_kind"] = "encoder";
        trace["layer"] = attn.layer;
        trace["tokens"] = attn.tokens;
        trace["heads"] = json::array();
        for (const auto& head : attn.per_head) {
            json m = json::array();
            for (int r = 0; r < head.rows(); ++r) {
                std::vector<double> row(head.row(r).data(),
                                        head.row(r).data() + head.cols());
                m.push_back(row);
            }
            trace["heads"].push_back(std::move(m));
        }
        html = encoder_heatmap_html(trace);
    } else {
        throw std::runtime_error("unknown model kind '" + kind + "'");
    }

    fs::create_directories(ctx.out_dir);
    write_file((fs::path(ctx.out_dir) / ("trace_" + pair_id + ".json")).string(),
               trace.dump(2) + "\n");
    write_file((fs::path(ctx.out_dir) / ("heatmap_" + pair_id + ".html")).string(), html);
    ctx.settings = {{"model", model_dir}, {"pair_id", pair_id}, {"layer", layer}};
    ctx.write_manifest();
    std::cout << "wrote trace and heatmap for " << pair_id << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"argumentative relation + sarcasm toolkit"};
    app.require_subcommand(0, 1);
    bool list_variants = false;
    app.add_flag("--list-variants", list_variants, "print the model variants and exit");

    RunContext ctx;
    std::string in_path, aux_path, model_dir, baseline_path, pair_id, task = "arg";
    int layer = -1;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", ctx.config_path, "JSON config file");
        cmd->add_option("--seed", ctx.seed, "random seed")->envname("ARGSARC_SEED");
        auto* out = cmd->add_option("--out", ctx.out_dir, "output directory")
                        ->envname("ARGSARC_OUT");
        if (needs_out) out->required();
    };

    auto* prepare = app.add_subcommand("prepare", "split and tag a corpus");
    prepare->add_option("--in", in_path, "corpus JSONL")->required();
    prepare->add_option("--aux", aux_path, "auxiliary sarcasm corpus JSONL");
    add_common(prepare, true);

    auto* train_lr = app.add_subcommand("train-lr", "train the linear baseline");
    train_lr->add_option("--in", in_path, "split-tagged corpus")->required();
    train_lr->add_option("--variant", ctx.variant, "lr_argf | lr_argf_sarcf")->required();
    add_common(train_lr, true);

    auto* train_dual = app.add_subcommand("train-dual", "train the dual LSTM encoder");
    train_dual->add_option("--in", in_path, "split-tagged corpus")->required();
    train_dual->add_option("--variant", ctx.variant,
                           "lstm_attn | lstm_mt | lstm_mt_uncert")->required();
    add_common(train_dual, true);

    auto* train_enc = app.add_subcommand("train-encoder", "fine-tune the encoder adapter");
    train_enc->add_option("--in", in_path, "split-tagged corpus")->required();
    train_enc->add_option("--variant", ctx.variant,
                          "enc_orig | enc_mt | enc_mt_uncert | enc_alt")->required();
    add_common(train_enc, true);

    auto* eval_cmd = app.add_subcommand("eval", "score a prediction file");
    eval_cmd->add_option("--preds", in_path, "prediction JSONL")->required();
    eval_cmd->add_option("--baseline", baseline_path, "baseline prediction JSONL");
    eval_cmd->add_option("--task", task, "arg | sarc");
    add_common(eval_cmd, false);

    auto* attn = app.add_subcommand("attn-export", "export attention traces");
    attn->add_option("--model", model_dir, "model directory")->required();
    attn->add_option("--in", in_path, "corpus JSONL with the pair")->required();
    attn->add_option("--id", pair_id, "pair id")->required();
    attn->add_option("--layer", layer, "encoder layer (default: model-dependent)");
    add_common(attn, true);

    CLI11_PARSE(app, argc, argv);

    if (list_variants) {
        for (const auto& v : kVariants) std::cout << v << "\n";
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 0;
    }

    try {
        if (prepare->parsed()) {
            ctx.command = "prepare";
            return cmd_prepare(ctx, in_path, aux_path);
        }
        if (train_lr->parsed()) {
            ctx.command = "train-lr";
            return cmd_train_lr(ctx, in_path);
        }
        if (train_dual->parsed()) {
            ctx.command = "train-dual";
            return cmd_train_dual(ctx, in_path);
        }
        if (train_enc->parsed()) {
            ctx.command = "train-encoder";
            return cmd_train_encoder(ctx, in_path);
        }
        if (eval_cmd->parsed()) {
            ctx.command = "eval";
            return cmd_eval(ctx, in_path, baseline_path, task);
        }
        if (attn->parsed()) {
            ctx.command = "attn-export";
            return cmd_attn_export(ctx, model_dir, in_path, pair_id, layer);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
