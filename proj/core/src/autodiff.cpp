#include "argsarc/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace argsarc::nn {

Parameter& ParameterStore::add(const std::string& name, Matrix value) {
    if (by_name_.count(name)) {
        throw std::runtime_error("duplicate parameter name: " + name);
    }
    params_.push_back(std::make_unique<Parameter>(name, std::move(value)));
    by_name_[name] = params_.back().get();
    return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::runtime_error("unknown parameter: " + name);
    return *it->second;
}

const Parameter& ParameterStore::get(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::runtime_error("unknown parameter: " + name);
    return *it->second;
}

bool ParameterStore::has(const std::string& name) const { return by_name_.count(name) > 0; }

std::vector<Parameter*> ParameterStore::all() {
    std::vector<Parameter*> out;
    for (auto& p : params_) out.push_back(p.get());
    return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
    std::vector<const Parameter*> out;
    for (const auto& p : params_) out.push_back(p.get());
    return out;
}

void ParameterStore::zero_grad() {
    for (auto& p : params_) p->grad.setZero();
}

Node* Graph::make(Matrix value) {
    nodes_.push_back(std::make_unique<Node>());
    Node* n = nodes_.back().get();
    n->grad = Matrix::Zero(value.rows(), value.cols());
    n->value = std::move(value);
    return n;
}

Node* Graph::constant(Matrix value) { return make(std::move(value)); }

Node* Graph::param(Parameter& p) {
    Node* n = make(p.value);
    Parameter* pp = &p;
    n->backward = [n, pp] { pp->grad += n->grad; };
    return n;
}

Node* Graph::matmul(Node* a, Node* b) {
    Node* n = make(a->value * b->value);
    n->backward = [n, a, b] {
        a->grad += n->grad * b->value.transpose();
        b->grad += a->value.transpose() * n->grad;
    };
    return n;
}

Node* Graph::transpose(Node* a) {
    Node* n = make(a->value.transpose());
    n->backward = [n, a] { a->grad += n->grad.transpose(); };
    return n;
}

Node* Graph::add(Node* a, Node* b) {
    Node* n = make(a->value + b->value);
    n->backward = [n, a, b] {
        a->grad += n->grad;
        b->grad += n->grad;
    };
    return n;
}

Node* Graph::add_broadcast_col(Node* m, Node* col) {
    Node* n = make(m->value.colwise() + Eigen::VectorXd(col->value.col(0)));
    n->backward = [n, m, col] {
        m->grad += n->grad;
        col->grad += n->grad.rowwise().sum();
    };
    return n;
}

Node* Graph::sub(Node* a, Node* b) {
    Node* n = make(a->value - b->value);
    n->backward = [n, a, b] {
        a->grad += n->grad;
        b->grad -= n->grad;
    };
    return n;
}

Node* Graph::cwise_mul(Node* a, Node* b) {
    Node* n = make(a->value.cwiseProduct(b->value));
    n->backward = [n, a, b] {
        a->grad += n->grad.cwiseProduct(b->value);
        b->grad += n->grad.cwiseProduct(a->value);
    };
    return n;
}

Node* Graph::scale(Node* a, double k) {
    Node* n = make(a->value * k);
    n->backward = [n, a, k] { a->grad += n->grad * k; };
    return n;
}

Node* Graph::add_const(Node* a, double k) {
    Node* n = make(a->value.array() + k);
    n->backward = [n, a] { a->grad += n->grad; };
    return n;
}

Node* Graph::tanh(Node* a) {
    Node* n = make(a->value.array().tanh());
    n->backward = [n, a] {
        a->grad.array() += n->grad.array() * (1.0 - n->value.array().square());
    };
    return n;
}

Node* Graph::sigmoid(Node* a) {
    Node* n = make((1.0 / (1.0 + (-a->value.array()).exp())));
    n->backward = [n, a] {
        a->grad.array() += n->grad.array() * n->value.array() * (1.0 - n->value.array());
    };
    return n;
}

Node* Graph::exp(Node* a) {
    Node* n = make(a->value.array().exp());
    n->backward = [n, a] { a->grad.array() += n->grad.array() * n->value.array(); };
    return n;
}

Node* Graph::log(Node* a) {
    Node* n = make(a->value.array().log());
    n->backward = [n, a] { a->grad.array() += n->grad.array() / a->value.array(); };
    return n;
}

Node* Graph::softmax_col(Node* v) {
    if (v->value.cols() != 1) throw std::runtime_error("softmax_col expects a column vector");
    Eigen::ArrayXd shifted = v->value.col(0).array() - v->value.col(0).maxCoeff();
    Eigen::ArrayXd e = shifted.exp();
    Matrix out = (e / e.sum()).matrix();
    Node* n = make(out);
    n->backward = [n, v] {
        const Eigen::ArrayXd p = n->value.col(0).array();
        const Eigen::ArrayXd g = n->grad.col(0).array();
        double dot = (p * g).sum();
        v->grad.col(0).array() += p * (g - dot);
    };
    return n;
}

Node* Graph::concat_cols(const std::vector<Node*>& cols) {
    if (cols.empty()) throw std::runtime_error("concat_cols on empty list");
    int rows = static_cast<int>(cols[0]->value.rows());
    int total = 0;
    for (Node* c : cols) total += static_cast<int>(c->value.cols());
    Matrix out(rows, total);
    int at = 0;
    for (Node* c : cols) {
        out.middleCols(at, c->value.cols()) = c->value;
        at += static_cast<int>(c->value.cols());
    }
    Node* n = make(std::move(out));
    std::vector<Node*> parts = cols;
    n->backward = [n, parts] {
        int at = 0;
        for (Node* c : parts) {
            c->grad += n->grad.middleCols(at, c->value.cols());
            at += static_cast<int>(c->value.cols());
        }
    };
    return n;
}

Node* Graph::concat_rows(const std::vector<Node*>& parts) {
    if (parts.empty()) throw std::runtime_error("concat_rows on empty list");
    int cols = static_cast<int>(parts[0]->value.cols());
    int total = 0;
    for (Node* p : parts) total += static_cast<int>(p->value.rows());
    Matrix out(total, cols);
    int at = 0;
    for (Node* p : parts) {
        out.middleRows(at, p->value.rows()) = p->value;
        at += static_cast<int>(p->value.rows());
    }
    Node* n = make(std::move(out));
    std::vector<Node*> copy = parts;
    n->backward = [n, copy] {
        int at = 0;
        for (Node* p : copy) {
            p->grad += n->grad.middleRows(at, p->value.rows());
            at += static_cast<int>(p->value.rows());
        }
    };
    return n;
}

Node* Graph::slice_rows(Node* a, int start, int len) {
    Node* n = make(a->value.middleRows(start, len));
    n->backward = [n, a, start, len] { a->grad.middleRows(start, len) += n->grad; };
    return n;
}

Node* Graph::sum(Node* a) {
    Matrix out(1, 1);
    out(0, 0) = a->value.sum();
    Node* n = make(std::move(out));
    n->backward = [n, a] { a->grad.array() += n->grad(0, 0); };
    return n;
}

Node* Graph::dropout(Node* a, double p, std::mt19937_64& rng, bool training) {
    if (!training || p <= 0.0) return a;
    std::bernoulli_distribution keep(1.0 - p);
    Matrix mask(a->value.rows(), a->value.cols());
    for (int i = 0; i < mask.rows(); ++i) {
        for (int j = 0; j < mask.cols(); ++j) {
            mask(i, j) = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
        }
    }
    return cwise_mul(a, constant(std::move(mask)));
}

Node* Graph::cross_entropy(Node* logits, int label) {
    if (logits->value.cols() != 1) throw std::runtime_error("cross_entropy expects a column vector");
    if (label < 0 || label >= logits->value.rows()) {
        throw std::runtime_error("cross_entropy label out of range");
    }
    Eigen::ArrayXd shifted = logits->value.col(0).array() - logits->value.col(0).maxCoeff();
    double logz = std::log(shifted.exp().sum());
    Matrix out(1, 1);
    out(0, 0) = logz - shifted(label);
    Node* n = make(std::move(out));
    Eigen::VectorXd probs = (shifted - logz).exp().matrix();
    n->backward = [n, logits, label, probs] {
        Eigen::VectorXd delta = probs;
        delta[label] -= 1.0;
        logits->grad.col(0) += n->grad(0, 0) * delta;
    };
    return n;
}

void Graph::backward(Node* root) {
    if (root->value.size() != 1) throw std::runtime_error("backward expects a scalar root");
    for (auto& n : nodes_) n->grad.setZero();
    root->grad(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        if ((*it)->backward) (*it)->backward();
    }
}

void AdamOptimizer::step(ParameterStore& params) { step(std::vector<ParameterStore*>{&params}); }

void AdamOptimizer::step(const std::vector<ParameterStore*>& stores) {
    ++t_;
    double bc1 = 1.0 - std::pow(opts_.beta1, t_);
    double bc2 = 1.0 - std::pow(opts_.beta2, t_);
    std::vector<Parameter*> all;
    for (ParameterStore* s : stores) {
        for (Parameter* p : s->all()) all.push_back(p);
    }
    for (Parameter* p : all) {
        p->adam_m = opts_.beta1 * p->adam_m + (1.0 - opts_.beta1) * p->grad;
        p->adam_v = opts_.beta2 * p->adam_v.array().matrix() +
                    (1.0 - opts_.beta2) * p->grad.cwiseProduct(p->grad);
        Matrix m_hat = p->adam_m / bc1;
        Matrix v_hat = p->adam_v / bc2;
        p->value.array() -=
            opts_.learning_rate * m_hat.array() / (v_hat.array().sqrt() + opts_.epsilon);
    }
}

Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
    double limit = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

Matrix gaussian(int rows, int cols, double stddev, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

}  // namespace argsarc::nn
