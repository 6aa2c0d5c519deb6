#include "argsarc/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace argsarc::linear {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

FeatureIndex build_feature_index(const std::vector<features::FeatureVector>& train_vectors) {
    if (train_vectors.empty()) {
        throw std::runtime_error("cannot build a feature index from an empty training set");
    }
    FeatureIndex index;
    for (const auto& fv : train_vectors) {
        for (const auto& [name, value] : fv.entries) {
            if (index.name_to_col.emplace(name, static_cast<int>(index.names.size())).second) {
                index.names.push_back(name);
            }
        }
    }
    return index;
}

DesignMatrix vectorize(const std::vector<features::FeatureVector>& vectors,
                       const FeatureIndex& index) {
    DesignMatrix m;
    m.cols = index.dim();
    m.rows.reserve(vectors.size());
    for (const auto& fv : vectors) {
        std::vector<std::pair<int, double>> row;
        for (const auto& [name, value] : fv.entries) {
            auto it = index.name_to_col.find(name);
            if (it != index.name_to_col.end() && value != 0.0) {
                row.emplace_back(it->second, value);
            }
        }
        std::sort(row.begin(), row.end());
        m.rows.push_back(std::move(row));
    }
    return m;
}

namespace {

// L-BFGS with two-loop recursion and Armijo backtracking.
void lbfgs_minimize(const std::function<double(const VectorXd&, VectorXd&)>& value_and_grad,
                    VectorXd& x, double grad_tol, int max_iter) {
    const int memory = 10;
    std::deque<VectorXd> s_hist, y_hist;
    VectorXd grad(x.size()), grad_prev(x.size());
    double fx = value_and_grad(x, grad);
    if (!std::isfinite(fx)) {
        throw std::runtime_error("non-finite loss at initialization");
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        if (grad.norm() <= grad_tol) break;
        // two-loop recursion
        VectorXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            double rho = 1.0 / y_hist[i].dot(s_hist[i]);
            alpha[i] = rho * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const VectorXd& s = s_hist.back();
            const VectorXd& y = y_hist.back();
            q *= s.dot(y) / y.dot(y);
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            double rho = 1.0 / y_hist[i].dot(s_hist[i]);
            double beta = rho * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        VectorXd direction = -q;
        double dir_deriv = grad.dot(direction);
        if (dir_deriv >= 0) {
            direction = -grad;
            dir_deriv = -grad.squaredNorm();
        }
        // Armijo backtracking
        double step = 1.0;
        VectorXd x_new;
        VectorXd grad_new(x.size());
        double fx_new = fx;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            x_new = x + step * direction;
            fx_new = value_and_grad(x_new, grad_new);
            if (std::isfinite(fx_new) && fx_new <= fx + 1e-4 * step * dir_deriv) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        VectorXd s = x_new - x;
        VectorXd y = grad_new - grad;
        if (s.dot(y) > 1e-12) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
            }
        }
        x = std::move(x_new);
        grad = grad_new;
        fx = fx_new;
        if (!std::isfinite(fx)) {
            throw std::runtime_error("non-finite loss during optimization");
        }
    }
}

VectorXd instance_weights(const std::vector<int>& labels, int n_labels,
                          ClassWeighting weighting) {
    VectorXd counts = VectorXd::Zero(n_labels);
    for (int l : labels) counts[l] += 1.0;
    VectorXd class_weight = VectorXd::Ones(n_labels);
    double n = static_cast<double>(labels.size());
    switch (weighting) {
        case ClassWeighting::None:
            break;
        case ClassWeighting::InverseProportional:
            for (int c = 0; c < n_labels; ++c) {
                class_weight[c] = counts[c] > 0 ? n / (n_labels * counts[c]) : 0.0;
            }
            break;
        case ClassWeighting::Proportional:
            for (int c = 0; c < n_labels; ++c) {
                class_weight[c] = counts[c] / n * n_labels;
            }
            break;
    }
    VectorXd w(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) w[i] = class_weight[labels[i]];
    return w;
}

}  // namespace

LinearModel train(const DesignMatrix& matrix, const std::vector<int>& labels,
                  const std::vector<std::string>& label_set, const FeatureIndex& index,
                  const TrainOptions& opts) {
    if (matrix.rows.empty()) throw std::runtime_error("empty training matrix");
    if (matrix.rows.size() != labels.size()) {
        throw std::runtime_error("label / matrix row count mismatch");
    }
    if (opts.c <= 0) throw std::runtime_error("regularization C must be positive");
    const int n_labels = static_cast<int>(label_set.size());
    const int dim = matrix.cols;
    const int n = static_cast<int>(matrix.rows.size());
    VectorXd sample_weight = instance_weights(labels, n_labels, opts.weighting);

    // parameters flattened as [weights row-major | bias]
    auto value_and_grad = [&](const VectorXd& theta, VectorXd& grad) -> double {
        Eigen::Map<const MatrixXd> W(theta.data(), n_labels, dim);
        Eigen::Map<const VectorXd> b(theta.data() + n_labels * dim, n_labels);
        grad.setZero();
        Eigen::Map<MatrixXd> gW(grad.data(), n_labels, dim);
        Eigen::Map<VectorXd> gb(grad.data() + n_labels * dim, n_labels);
        double loss = 0.0;
        VectorXd logits(n_labels), probs(n_labels);
        for (int i = 0; i < n; ++i) {
            logits = b;
            for (const auto& [col, val] : matrix.rows[i]) {
                logits += W.col(col) * val;
            }
            double max_logit = logits.maxCoeff();
            probs = (logits.array() - max_logit).exp();
            double z = probs.sum();
            probs /= z;
            double w_i = sample_weight[i];
            loss -= w_i * (logits[labels[i]] - max_logit - std::log(z));
            VectorXd delta = probs;
            delta[labels[i]] -= 1.0;
            delta *= w_i;
            for (const auto& [col, val] : matrix.rows[i]) {
                gW.col(col) += delta * val;
            }
            gb += delta;
        }
        double reg = 0.5 / opts.c * W.squaredNorm();
        gW += (1.0 / opts.c) * W;
        return loss + reg;
    };

    VectorXd theta = VectorXd::Zero(n_labels * dim + n_labels);
    lbfgs_minimize(value_and_grad, theta, opts.gradient_tolerance, opts.max_iterations);

    LinearModel model;
    model.label_set = label_set;
    model.feature_index = index;
    model.weights = Eigen::Map<const MatrixXd>(theta.data(), n_labels, dim);
    model.bias = theta.tail(n_labels);
    model.c = opts.c;
    return model;
}

Prediction predict_row(const LinearModel& model,
                       const std::vector<std::pair<int, double>>& row) {
    VectorXd logits = model.bias;
    for (const auto& [col, val] : row) {
        if (col >= 0 && col < model.weights.cols()) {
            logits += model.weights.col(col) * val;
        }
    }
    Prediction pred;
    double max_logit = logits.maxCoeff();
    pred.probabilities = (logits.array() - max_logit).exp();
    pred.probabilities /= pred.probabilities.sum();
    pred.probabilities.maxCoeff(&pred.label);
    return pred;
}

Prediction predict(const LinearModel& model, const features::FeatureVector& fv) {
    std::vector<std::pair<int, double>> row;
    for (const auto& [name, value] : fv.entries) {
        auto it = model.feature_index.name_to_col.find(name);
        if (it != model.feature_index.name_to_col.end()) {
            row.emplace_back(it->second, value);
        }
    }
    return predict_row(model, row);
}

std::vector<std::vector<std::string>> top_features(const LinearModel& model, int k) {
    const int dim = static_cast<int>(model.weights.cols());
    k = std::min(k, dim);
    std::vector<std::vector<std::string>> out;
    for (int c = 0; c < model.weights.rows(); ++c) {
        std::vector<int> cols(dim);
        std::iota(cols.begin(), cols.end(), 0);
        std::partial_sort(cols.begin(), cols.begin() + k, cols.end(),
                          [&](int a, int b) { return model.weights(c, a) > model.weights(c, b); });
        std::vector<std::string> names;
        for (int i = 0; i < k; ++i) names.push_back(model.feature_index.names[cols[i]]);
        out.push_back(std::move(names));
    }
    return out;
}

std::vector<double> default_c_grid() {
    return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0, 10000.0};
}

GridSearchResult grid_search_c(const DesignMatrix& train_matrix,
                               const std::vector<int>& train_labels,
                               const DesignMatrix& dev_matrix,
                               const std::vector<int>& dev_labels,
                               const std::vector<std::string>& label_set,
                               const FeatureIndex& index,
                               const std::vector<double>& c_grid,
                               const TrainOptions& base_opts) {
    if (c_grid.empty()) throw std::runtime_error("empty C grid");
    GridSearchResult result;
    double best_score = -1.0;
    for (double c : c_grid) {
        TrainOptions opts = base_opts;
        opts.c = c;
        LinearModel model = train(train_matrix, train_labels, label_set, index, opts);
        int correct = 0;
        for (size_t i = 0; i < dev_matrix.rows.size(); ++i) {
            if (predict_row(model, dev_matrix.rows[i]).label == dev_labels[i]) ++correct;
        }
        double score = dev_matrix.rows.empty()
                           ? 0.0
                           : static_cast<double>(correct) / dev_matrix.rows.size();
        result.tried_c.push_back(c);
        result.dev_scores.push_back(score);
        // ties break toward smaller C regardless of grid order
        if (score > best_score || (score == best_score && c < result.chosen_c)) {
            best_score = score;
            result.chosen_c = c;
        }
    }
    return result;
}

std::string LinearModel::to_json() const {
    json j;
    j["label_set"] = label_set;
    j["feature_index"] = feature_index.names;
    j["c"] = c;
    j["bias"] = std::vector<double>(bias.data(), bias.data() + bias.size());
    j["weights"] = json::array();
    for (int r = 0; r < weights.rows(); ++r) {
        std::vector<double> row(weights.cols());
        for (int col = 0; col < weights.cols(); ++col) row[col] = weights(r, col);
        j["weights"].push_back(row);
    }
    return j.dump();
}

LinearModel LinearModel::from_json(const std::string& doc) {
    json j = json::parse(doc);
    LinearModel model;
    model.label_set = j.at("label_set").get<std::vector<std::string>>();
    auto names = j.at("feature_index").get<std::vector<std::string>>();
    model.feature_index.names = names;
    for (size_t i = 0; i < names.size(); ++i) {
        model.feature_index.name_to_col[names[i]] = static_cast<int>(i);
    }
    model.c = j.at("c").get<double>();
    auto bias = j.at("bias").get<std::vector<double>>();
    model.bias = Eigen::Map<const VectorXd>(bias.data(), bias.size());
    auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    model.weights.resize(rows.size(), names.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t col = 0; col < rows[r].size(); ++col) {
            model.weights(r, col) = rows[r][col];
        }
    }
    return model;
}

}  // namespace argsarc::linear
