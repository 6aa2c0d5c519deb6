#include "argsarc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace argsarc::eval {

using nlohmann::json;

Eigen::MatrixXi confusion_matrix(const std::vector<int>& gold, const std::vector<int>& pred,
                                 int n_labels) {
    if (gold.size() != pred.size()) {
        throw std::runtime_error("gold/pred length mismatch");
    }
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n_labels, n_labels);
    for (size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] < 0 || gold[i] >= n_labels || pred[i] < 0 || pred[i] >= n_labels) {
            throw std::runtime_error("label index out of range at instance " +
                                     std::to_string(i));
        }
        m(gold[i], pred[i])++;
    }
    return m;
}

std::vector<PerClassMetrics> per_class_f1(const Eigen::MatrixXi& confusion) {
    const int k = static_cast<int>(confusion.rows());
    std::vector<PerClassMetrics> out(k);
    for (int c = 0; c < k; ++c) {
        double tp = confusion(c, c);
        double fp = confusion.col(c).sum() - tp;
        double fn = confusion.row(c).sum() - tp;
        out[c].precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
        out[c].recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
        double pr = out[c].precision + out[c].recall;
        out[c].f1 = pr > 0 ? 2.0 * out[c].precision * out[c].recall / pr : 0.0;
    }
    return out;
}

double micro_f1(const Eigen::MatrixXi& confusion) {
    long n = confusion.sum();
    if (n == 0) throw std::runtime_error("micro_f1 on an empty matrix");
    // pooled TP over pooled TP+FP (== TP+FN): reduces to trace/n
    return static_cast<double>(confusion.trace()) / static_cast<double>(n);
}

EvalReport evaluate(const std::vector<int>& gold, const std::vector<int>& pred,
                    const std::vector<std::string>& labels) {
    EvalReport report;
    report.labels = labels;
    report.confusion = confusion_matrix(gold, pred, static_cast<int>(labels.size()));
    report.per_class = per_class_f1(report.confusion);
    report.micro_f1 = micro_f1(report.confusion);
    report.n = static_cast<int>(gold.size());
    return report;
}

namespace {

// log C(n, k)
double log_binom(long n, long k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double exact_binomial_p(long b, long c) {
    long n = b + c;
    long m = std::min(b, c);
    double tail = 0.0;
    for (long k = 0; k <= m; ++k) {
        tail += std::exp(log_binom(n, k) - n * std::log(2.0));
    }
    return std::min(1.0, 2.0 * tail);
}

double chi_square_p(long b, long c) {
    double num = std::abs(static_cast<double>(b - c)) - 1.0;
    if (num < 0) num = 0;
    double chi2 = num * num / static_cast<double>(b + c);
    // survival of chi-square with 1 dof
    return std::erfc(std::sqrt(chi2 / 2.0));
}

}  // namespace

SignificanceResult mcnemar_from_counts(long b, long c, McNemarMethod method) {
    if (b < 0 || c < 0) throw std::runtime_error("negative discordance counts");
    SignificanceResult r;
    r.b = b;
    r.c = c;
    if (b + c == 0) {
        r.p_value = 1.0;
        r.no_discordance = true;
        r.method = "exact";
        return r;
    }
    if (method == McNemarMethod::Exact) {
        r.p_value = exact_binomial_p(b, c);
        r.method = "exact";
    } else {
        r.p_value = chi_square_p(b, c);
        r.method = "chi2";
    }
    r.significant_at_0_05 = r.p_value <= 0.05;
    return r;
}

SignificanceResult mcnemar(const std::vector<int>& gold, const std::vector<int>& pred_a,
                           const std::vector<int>& pred_b, McNemarMethod method) {
    if (gold.size() != pred_a.size() || gold.size() != pred_b.size()) {
        throw std::runtime_error("mcnemar: prediction lengths differ from gold");
    }
    long b = 0, c = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        bool a_ok = pred_a[i] == gold[i];
        bool b_ok = pred_b[i] == gold[i];
        if (a_ok && !b_ok) ++b;
        if (!a_ok && b_ok) ++c;
    }
    return mcnemar_from_counts(b, c, method);
}

std::string EvalReport::to_json() const {
    json j;
    j["labels"] = labels;
    j["n"] = n;
    j["micro_f1"] = micro_f1;
    j["confusion"] = json::array();
    for (int r = 0; r < confusion.rows(); ++r) {
        std::vector<int> row(confusion.cols());
        for (int c = 0; c < confusion.cols(); ++c) row[c] = confusion(r, c);
        j["confusion"].push_back(row);
    }
    j["per_class"] = json::object();
    for (size_t i = 0; i < labels.size(); ++i) {
        j["per_class"][labels[i]] = {{"precision", per_class[i].precision},
                                     {"recall", per_class[i].recall},
                                     {"f1", per_class[i].f1}};
    }
    return j.dump(2);
}

std::string EvalReport::render_text() const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << "n=" << n << "  micro-F1=" << micro_f1 * 100 << "\n";
    os << "label  P      R      F1\n";
    for (size_t i = 0; i < labels.size(); ++i) {
        os << labels[i];
        for (size_t pad = labels[i].size(); pad < 7; ++pad) os << ' ';
        os << per_class[i].precision * 100 << "   " << per_class[i].recall * 100 << "   "
           << per_class[i].f1 * 100 << "\n";
    }
    return os.str();
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prediction file: " + path);
    std::vector<PredictionRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        PredictionRecord rec;
        rec.id = j.at("id").get<std::string>();
        rec.gold = j.at("gold").get<std::string>();
        rec.pred = j.at("pred").get<std::string>();
        if (j.contains("probs")) rec.probs = j["probs"].get<std::vector<double>>();
        out.push_back(std::move(rec));
    }
    return out;
}

void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write prediction file: " + path);
    for (const auto& rec : records) {
        json j;
        j["id"] = rec.id;
        j["gold"] = rec.gold;
        j["pred"] = rec.pred;
        if (!rec.probs.empty()) j["probs"] = rec.probs;
        out << j.dump() << "\n";
    }
}

namespace {

int label_index(const std::vector<std::string>& labels, const std::string& l) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw std::runtime_error("unknown label '" + l + "'");
    return static_cast<int>(it - labels.begin());
}

}  // namespace

ComparisonTable compare_models(const std::vector<std::pair<std::string, std::string>>& model_files,
                               const std::string& baseline_model,
                               const std::vector<std::string>& labels) {
    ComparisonTable table;
    table.baseline = baseline_model;
    std::map<std::string, std::vector<PredictionRecord>> loaded;
    for (const auto& [model, path] : model_files) {
        loaded[model] = load_predictions(path);
    }
    auto base_it = loaded.find(baseline_model);
    if (base_it == loaded.end()) {
        throw std::runtime_error("baseline model '" + baseline_model + "' not among inputs");
    }
    const auto& base = base_it->second;
    for (const auto& [model, path] : model_files) {
        const auto& recs = loaded[model];
        if (recs.size() != base.size()) {
            throw std::runtime_error("model '" + model + "': instance count differs from baseline");
        }
        std::vector<int> gold, pred, base_pred;
        for (size_t i = 0; i < recs.size(); ++i) {
            if (recs[i].id != base[i].id) {
                throw std::runtime_error("model '" + model + "': id misalignment at row " +
                                         std::to_string(i) + " ('" + recs[i].id + "' vs '" +
                                         base[i].id + "')");
            }
            gold.push_back(label_index(labels, recs[i].gold));
            pred.push_back(label_index(labels, recs[i].pred));
            base_pred.push_back(label_index(labels, base[i].pred));
        }
        ComparisonRow row;
        row.model = model;
        row.report = evaluate(gold, pred, labels);
        if (model != baseline_model) {
            row.vs_baseline = mcnemar(gold, pred, base_pred);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string ComparisonTable::render_text() const {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << "Model";
    for (size_t pad = 5; pad < 24; ++pad) os << ' ';
    os << "F1_micro";
    if (!rows.empty()) {
        for (const auto& l : rows.front().report.labels) os << "  " << l << "   ";
    }
    os << "  sig\n";
    for (const auto& row : rows) {
        os << row.model;
        for (size_t pad = row.model.size(); pad < 24; ++pad) os << ' ';
        os << row.report.micro_f1 * 100 << "    ";
        for (const auto& pc : row.report.per_class) os << pc.f1 * 100 << "  ";
        if (row.model == baseline) {
            os << "  (baseline)";
        } else if (row.vs_baseline) {
            os << "  p=" << std::setprecision(3) << row.vs_baseline->p_value
               << (row.vs_baseline->significant_at_0_05 ? " *" : "");
            os << std::setprecision(1);
        }
        os << "\n";
    }
    return os.str();
}

std::string ComparisonTable::to_json() const {
    json j;
    j["baseline"] = baseline;
    j["rows"] = json::array();
    for (const auto& row : rows) {
        json r;
        r["model"] = row.model;
        r["micro_f1"] = row.report.micro_f1;
        r["per_class_f1"] = json::object();
        for (size_t i = 0; i < row.report.labels.size(); ++i) {
            r["per_class_f1"][row.report.labels[i]] = row.report.per_class[i].f1;
        }
        if (row.vs_baseline && row.model != baseline) {
            r["mcnemar"] = {{"b", row.vs_baseline->b},
                            {"c", row.vs_baseline->c},
                            {"p_value", row.vs_baseline->p_value},
                            {"significant_at_0_05", row.vs_baseline->significant_at_0_05}};
        }
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2);
}

}  // namespace argsarc::eval
