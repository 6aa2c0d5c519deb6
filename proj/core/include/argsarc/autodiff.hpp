#pragma once

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace argsarc::nn {

using Matrix = Eigen::MatrixXd;

// One node of the dynamic computation graph built per forward pass.
struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> backward;  // empty for leaves
};

// Named trainable tensor with Adam state.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix adam_m, adam_v;

    explicit Parameter(std::string n, Matrix v)
        : name(std::move(n)), value(std::move(v)) {
        grad = Matrix::Zero(value.rows(), value.cols());
        adam_m = grad;
        adam_v = grad;
    }
};

class ParameterStore {
public:
    Parameter& add(const std::string& name, Matrix value);
    Parameter& get(const std::string& name);
    const Parameter& get(const std::string& name) const;
    bool has(const std::string& name) const;
    std::vector<Parameter*> all();
    std::vector<const Parameter*> all() const;
    void zero_grad();

private:
    std::vector<std::unique_ptr<Parameter>> params_;
    std::map<std::string, Parameter*> by_name_;
};

// Per-forward-pass tape. Nodes are owned by the graph and valid until
// the graph is destroyed; backward() walks the tape in reverse.
class Graph {
public:
    Node* constant(Matrix value);
    Node* param(Parameter& p);  // gradient flows back into p.grad

    Node* matmul(Node* a, Node* b);
    Node* transpose(Node* a);
    Node* add(Node* a, Node* b);            // same shape
    Node* add_broadcast_col(Node* m, Node* col);  // col added to every column
    Node* sub(Node* a, Node* b);
    Node* cwise_mul(Node* a, Node* b);
    Node* scale(Node* a, double k);
    Node* add_const(Node* a, double k);
    Node* tanh(Node* a);
    Node* sigmoid(Node* a);
    Node* exp(Node* a);
    Node* log(Node* a);
    Node* softmax_col(Node* v);  // n x 1 -> simplex point
    Node* concat_cols(const std::vector<Node*>& cols);
    Node* concat_rows(const std::vector<Node*>& parts);  // vertical stack
    Node* slice_rows(Node* a, int start, int len);
    Node* sum(Node* a);  // 1 x 1
    Node* dropout(Node* a, double p, std::mt19937_64& rng, bool training);

    // -log softmax(logits)[label]; logits n x 1
    Node* cross_entropy(Node* logits, int label);

    // Seeds grads with d(root)=1 and runs the tape backwards.
    void backward(Node* root);

private:
    Node* make(Matrix value);
    std::vector<std::unique_ptr<Node>> nodes_;
};

struct AdamOptions {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamOptions opts = {}) : opts_(opts) {}
    void step(ParameterStore& params);
    // One update over several stores, counted as a single step.
    void step(const std::vector<ParameterStore*>& stores);
    int steps_taken() const { return t_; }

private:
    AdamOptions opts_;
    int t_ = 0;
};

// Uniform in [-limit, limit] with limit = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng);
Matrix gaussian(int rows, int cols, double stddev, std::mt19937_64& rng);

}  // namespace argsarc::nn
