#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "argsarc/features.hpp"

namespace argsarc::linear {

// Frozen name -> column bijection, built from the training split only.
struct FeatureIndex {
    std::map<std::string, int> name_to_col;
    std::vector<std::string> names;

    int dim() const { return static_cast<int>(names.size()); }
};

FeatureIndex build_feature_index(const std::vector<features::FeatureVector>& train_vectors);

// Sparse row-major design matrix. Columns absent from the index
// (dev/test-only features) are dropped.
struct DesignMatrix {
    int cols = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
};

DesignMatrix vectorize(const std::vector<features::FeatureVector>& vectors,
                       const FeatureIndex& index);

enum class ClassWeighting {
    None,
    // standard n/(k*n_c) reweighting (default)
    InverseProportional,
    // weights proportional to class frequency
    Proportional,
};

struct TrainOptions {
    double c = 1.0;  // inverse regularization strength
    ClassWeighting weighting = ClassWeighting::InverseProportional;
    double gradient_tolerance = 1e-6;
    int max_iterations = 1000;
    uint64_t seed = 0;
};

struct LinearModel {
    std::vector<std::string> label_set;
    FeatureIndex feature_index;
    Eigen::MatrixXd weights;  // |labels| x dim
    Eigen::VectorXd bias;     // |labels|
    double c = 1.0;

    std::string to_json() const;
    static LinearModel from_json(const std::string& doc);
};

// L2-regularized multinomial logistic regression, minimized with an
// L-BFGS quasi-Newton loop to the stated gradient tolerance.
LinearModel train(const DesignMatrix& matrix, const std::vector<int>& labels,
                  const std::vector<std::string>& label_set, const FeatureIndex& index,
                  const TrainOptions& opts);

struct Prediction {
    int label = 0;
    Eigen::VectorXd probabilities;  // sums to 1
};

Prediction predict(const LinearModel& model, const features::FeatureVector& fv);
Prediction predict_row(const LinearModel& model,
                       const std::vector<std::pair<int, double>>& row);

// k highest-weight feature names per class (Table-3-shaped report).
std::vector<std::vector<std::string>> top_features(const LinearModel& model, int k);

struct GridSearchResult {
    std::vector<double> tried_c;
    std::vector<double> dev_scores;  // micro-F1 per C
    double chosen_c = 1.0;
};

// The default appendix grid.
std::vector<double> default_c_grid();

GridSearchResult grid_search_c(const DesignMatrix& train_matrix,
                               const std::vector<int>& train_labels,
                               const DesignMatrix& dev_matrix,
                               const std::vector<int>& dev_labels,
                               const std::vector<std::string>& label_set,
                               const FeatureIndex& index,
                               const std::vector<double>& c_grid,
                               const TrainOptions& base_opts = {});

}  // namespace argsarc::linear
