#include <doctest.h>

#include <cmath>
#include <random>

#include "argsarc/autodiff.hpp"

using namespace argsarc::nn;

namespace {

// Central-difference gradient check of a scalar-valued graph builder.
// builder must construct a fresh graph over the store and return the
// 1x1 root node.
void check_gradients(ParameterStore& store,
                     const std::function<Node*(Graph&)>& builder,
                     double h = 1e-6, double tol = 1e-5) {
    Graph g;
    Node* root = builder(g);
    REQUIRE(root->value.size() == 1);
    store.zero_grad();
    g.backward(root);

    for (Parameter* p : store.all()) {
        Matrix analytic = p->grad;
        for (int r = 0; r < p->value.rows(); ++r) {
            for (int c = 0; c < p->value.cols(); ++c) {
                double saved = p->value(r, c);
                p->value(r, c) = saved + h;
                Graph gp;
                double up = builder(gp)->value(0, 0);
                p->value(r, c) = saved - h;
                Graph gm;
                double down = builder(gm)->value(0, 0);
                p->value(r, c) = saved;
                double numeric = (up - down) / (2 * h);
                INFO(p->name << "(" << r << "," << c << ")");
                CHECK(analytic(r, c) == doctest::Approx(numeric).epsilon(tol).scale(1.0));
            }
        }
    }
}

}  // namespace

TEST_CASE("gradients of a dense tanh composition match finite differences") {
    std::mt19937_64 rng(3);
    ParameterStore store;
    store.add("W", glorot_uniform(3, 4, rng));
    store.add("b", gaussian(3, 1, 0.5, rng));
    store.add("x", gaussian(4, 1, 1.0, rng));
    check_gradients(store, [&](Graph& g) {
        Node* h = g.tanh(g.add_broadcast_col(
            g.matmul(g.param(store.get("W")), g.param(store.get("x"))),
            g.param(store.get("b"))));
        return g.sum(g.cwise_mul(h, h));
    });
}

TEST_CASE("gradients of sigmoid, exp, log, scale chains") {
    std::mt19937_64 rng(5);
    ParameterStore store;
    store.add("v", gaussian(4, 1, 0.3, rng));
    check_gradients(store, [&](Graph& g) {
        Node* v = g.param(store.get("v"));
        Node* s = g.sigmoid(g.scale(v, 2.0));
        Node* e = g.exp(g.scale(v, -1.0));
        Node* l = g.log(g.add_const(g.cwise_mul(v, v), 1.0));
        return g.sum(g.add(g.add(s, e), l));
    });
}

TEST_CASE("softmax column backward carries the full Jacobian") {
    std::mt19937_64 rng(11);
    ParameterStore store;
    store.add("z", gaussian(5, 1, 1.0, rng));
    store.add("w", gaussian(5, 1, 1.0, rng));
    check_gradients(store, [&](Graph& g) {
        Node* p = g.softmax_col(g.param(store.get("z")));
        return g.sum(g.cwise_mul(p, g.param(store.get("w"))));
    });
}

TEST_CASE("softmax output lies on the simplex") {
    std::mt19937_64 rng(13);
    ParameterStore store;
    store.add("z", gaussian(7, 1, 3.0, rng));
    Graph g;
    Node* p = g.softmax_col(g.param(store.get("z")));
    CHECK(p->value.sum() == doctest::Approx(1.0));
    CHECK(p->value.minCoeff() >= 0.0);
}

TEST_CASE("cross entropy gradient is softmax minus one-hot") {
    std::mt19937_64 rng(17);
    ParameterStore store;
    store.add("z", gaussian(3, 1, 1.0, rng));
    check_gradients(store, [&](Graph& g) {
        return g.cross_entropy(g.param(store.get("z")), 1);
    });
    // closed-form check too
    Graph g;
    Node* z = g.param(store.get("z"));
    Node* loss = g.cross_entropy(z, 1);
    store.zero_grad();
    g.backward(loss);
    Eigen::VectorXd soft = store.get("z").value.col(0);
    soft = (soft.array() - soft.maxCoeff()).exp();
    soft /= soft.sum();
    soft(1) -= 1.0;
    CHECK(store.get("z").grad.col(0).isApprox(soft, 1e-9));
}

TEST_CASE("concat and slice are exact inverses in forward and backward") {
    std::mt19937_64 rng(19);
    ParameterStore store;
    store.add("a", gaussian(2, 1, 1.0, rng));
    store.add("b", gaussian(3, 1, 1.0, rng));
    check_gradients(store, [&](Graph& g) {
        Node* stacked = g.concat_rows({g.param(store.get("a")), g.param(store.get("b"))});
        Node* top = g.slice_rows(stacked, 0, 2);
        Node* bottom = g.slice_rows(stacked, 2, 3);
        return g.add(g.sum(g.cwise_mul(top, top)), g.sum(g.exp(bottom)));
    });
    Graph g;
    Node* stacked = g.concat_rows({g.param(store.get("a")), g.param(store.get("b"))});
    CHECK(stacked->value.rows() == 5);
    CHECK(g.slice_rows(stacked, 2, 3)->value.isApprox(store.get("b").value));
}

TEST_CASE("concat_cols gradient splits back to its sources") {
    std::mt19937_64 rng(23);
    ParameterStore store;
    store.add("c1", gaussian(3, 1, 1.0, rng));
    store.add("c2", gaussian(3, 1, 1.0, rng));
    check_gradients(store, [&](Graph& g) {
        Node* m = g.concat_cols({g.param(store.get("c1")), g.param(store.get("c2"))});
        return g.sum(g.tanh(m));
    });
}

TEST_CASE("matmul transpose sub gradients") {
    std::mt19937_64 rng(29);
    ParameterStore store;
    store.add("A", gaussian(3, 2, 1.0, rng));
    store.add("B", gaussian(3, 2, 1.0, rng));
    check_gradients(store, [&](Graph& g) {
        Node* d = g.sub(g.param(store.get("A")), g.param(store.get("B")));
        Node* gram = g.matmul(g.transpose(d), d);
        return g.sum(gram);
    });
}

TEST_CASE("gradients accumulate when a node is reused") {
    ParameterStore store;
    store.add("x", Matrix::Constant(1, 1, 2.0));
    Graph g;
    Node* x = g.param(store.get("x"));
    Node* y = g.add(g.cwise_mul(x, x), x);  // x^2 + x, dy/dx = 2x + 1 = 5
    store.zero_grad();
    g.backward(y);
    CHECK(store.get("x").grad(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("dropout keeps expectation in training and is identity in eval") {
    std::mt19937_64 rng(31);
    ParameterStore store;
    store.add("x", Matrix::Constant(1000, 1, 1.0));
    Graph g;
    Node* x = g.param(store.get("x"));
    Node* eval_out = g.dropout(x, 0.5, rng, /*training=*/false);
    CHECK(eval_out->value.isApprox(x->value));
    Node* train_out = g.dropout(x, 0.5, rng, /*training=*/true);
    // inverted scaling: surviving entries are 2, mean stays near 1
    double mean = train_out->value.mean();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.1));
    for (int i = 0; i < 1000; ++i) {
        double v = train_out->value(i, 0);
        CHECK((v == 0.0 || v == doctest::Approx(2.0)));
    }
}

TEST_CASE("adam minimizes a simple quadratic") {
    ParameterStore store;
    store.add("x", Matrix::Constant(1, 1, 5.0));
    AdamOptions opts;
    opts.learning_rate = 0.1;
    AdamOptimizer adam(opts);
    for (int i = 0; i < 500; ++i) {
        Graph g;
        Node* x = g.param(store.get("x"));
        Node* loss = g.sum(g.cwise_mul(x, x));
        store.zero_grad();
        g.backward(loss);
        adam.step(store);
    }
    CHECK(std::abs(store.get("x").value(0, 0)) < 1e-2);
    CHECK(adam.steps_taken() == 500);
}

TEST_CASE("multi-store adam counts one step per update") {
    ParameterStore a, b;
    a.add("x", Matrix::Constant(1, 1, 1.0));
    b.add("y", Matrix::Constant(1, 1, 1.0));
    a.get("x").grad.setConstant(1.0);
    b.get("y").grad.setConstant(1.0);
    AdamOptimizer adam;
    adam.step({&a, &b});
    CHECK(adam.steps_taken() == 1);
    // both stores moved
    CHECK(a.get("x").value(0, 0) < 1.0);
    CHECK(b.get("y").value(0, 0) < 1.0);
}

TEST_CASE("glorot init respects its bound") {
    std::mt19937_64 rng(37);
    auto W = glorot_uniform(20, 30, rng);
    double limit = std::sqrt(6.0 / 50.0);
    CHECK(W.maxCoeff() <= limit);
    CHECK(W.minCoeff() >= -limit);
    CHECK(W.cwiseAbs().maxCoeff() > 0.0);
}
