#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace argsarc::eval {

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::vector<std::string> labels;
    Eigen::MatrixXi confusion;  // gold rows, predicted columns
    std::vector<PerClassMetrics> per_class;
    double micro_f1 = 0.0;
    int n = 0;

    std::string to_json() const;
    std::string render_text() const;
};

Eigen::MatrixXi confusion_matrix(const std::vector<int>& gold, const std::vector<int>& pred,
                                 int n_labels);

// 0/0 precision or recall is defined as 0.
std::vector<PerClassMetrics> per_class_f1(const Eigen::MatrixXi& confusion);

// Micro-averaged F1; equals accuracy (trace/n) in single-label
// multiclass.
double micro_f1(const Eigen::MatrixXi& confusion);

EvalReport evaluate(const std::vector<int>& gold, const std::vector<int>& pred,
                    const std::vector<std::string>& labels);

struct SignificanceResult {
    long b = 0;  // model-A-correct / model-B-wrong
    long c = 0;  // model-A-wrong / model-B-correct
    double p_value = 1.0;
    bool significant_at_0_05 = false;
    bool no_discordance = false;
    std::string method;  // "exact" or "chi2"
};

enum class McNemarMethod { Exact, ChiSquare };

// Exact binomial by default: p = 2 * sum_{k<=min(b,c)} C(b+c, k) * 0.5^(b+c),
// capped at 1. The continuity-corrected chi-square variant is selectable.
SignificanceResult mcnemar(const std::vector<int>& gold, const std::vector<int>& pred_a,
                           const std::vector<int>& pred_b,
                           McNemarMethod method = McNemarMethod::Exact);

SignificanceResult mcnemar_from_counts(long b, long c,
                                       McNemarMethod method = McNemarMethod::Exact);

// JSON-lines prediction file: {"id", "gold", "pred", optional "probs"}.
struct PredictionRecord {
    std::string id;
    std::string gold;
    std::string pred;
    std::vector<double> probs;
};

std::vector<PredictionRecord> load_predictions(const std::string& path);
void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path);

struct ComparisonRow {
    std::string model;
    EvalReport report;
    std::optional<SignificanceResult> vs_baseline;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::string baseline;

    std::string render_text() const;
    std::string to_json() const;
};

// Model-by-model report against aligned prediction files; instance ids
// must match across files.
ComparisonTable compare_models(const std::vector<std::pair<std::string, std::string>>& model_files,
                               const std::string& baseline_model,
                               const std::vector<std::string>& labels);

}  // namespace argsarc::eval
