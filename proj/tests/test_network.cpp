#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "quatnn/data.hpp"
#include "quatnn/gradcheck.hpp"
#include "quatnn/network.hpp"
#include "quatnn/rng.hpp"

using namespace quatnn;

namespace {

double dist(const Quaternion& a, const Quaternion& b) { return norm(a - b); }

Network random_network(const std::vector<std::size_t>& shape, Activation act,
                       std::uint64_t seed, bool random_bias = true) {
    Network net = make_teacher(shape, act, seed);
    if (random_bias) {
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        for (DenseLayer& layer : net.layers) {
            for (Quaternion& b : layer.bias) b = rng.quaternion_box(-0.5, 0.5);
        }
    }
    return net;
}

QVector random_qvector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    QVector v(n);
    for (Quaternion& q : v) q = rng.quaternion_box(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("forward through identity-like layers") {
    Network net;
    DenseLayer layer;
    layer.weights = QMatrix(2, 2);
    layer.weights(0, 0) = Quaternion::one();
    layer.weights(1, 1) = Quaternion::one();
    layer.bias = QVector(2, Quaternion::zero());
    net.layers.push_back(layer);

    const QVector in{{1, 2, 3, 4}, {-1, 0.5, 0, 2}};
    const ForwardTrace trace = forward(net, in);
    CHECK(trace.output() == in);
    CHECK(trace.pre_activations[0] == in);

    // W = 0 with a constant bias pins the output to the bias.
    Network constant;
    DenseLayer c;
    c.weights = QMatrix(2, 2);
    c.bias = QVector{{0.5, 0, 1, 0}, {2, -1, 0, 0}};
    constant.layers.push_back(c);
    CHECK(forward(constant, in).output() == c.bias);

    CHECK_THROWS_AS(forward(net, QVector{Quaternion::one()}), std::invalid_argument);
}

TEST_CASE("forward applies the split activation") {
    Network net;
    DenseLayer layer;
    layer.weights = QMatrix(1, 1);
    layer.weights(0, 0) = Quaternion{0.3, -1.2, 0.7, 2.0};
    layer.bias = QVector{{0.1, 0.2, -0.3, 0.4}};
    layer.activation = Activation::Tanhshrink;
    Network wrapped;
    wrapped.layers.push_back(layer);
    // An output layer must stay Identity, so test via a two-layer stack.
    DenseLayer out;
    out.weights = QMatrix(1, 1);
    out.weights(0, 0) = Quaternion::one();
    out.bias = QVector{Quaternion::zero()};
    wrapped.layers.push_back(out);

    const Quaternion q{1, -0.5, 0.25, 0.75};
    const ForwardTrace trace = forward(wrapped, {q});
    const Quaternion z = layer.weights(0, 0) * q + layer.bias[0];
    Quaternion expect;
    for (int a = 0; a < 4; ++a) expect[a] = z[a] - std::tanh(z[a]);
    CHECK(dist(trace.activations[0][0], expect) == 0.0);
    CHECK(dist(trace.output()[0], expect) == 0.0);
}

TEST_CASE("network validation") {
    Network bad;
    DenseLayer l1;
    l1.weights = QMatrix(2, 3);
    l1.bias = QVector(2);
    DenseLayer l2;
    l2.weights = QMatrix(2, 3);  // expects 3 inputs, previous produced 2
    l2.bias = QVector(2);
    bad.layers = {l1, l2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    Network final_act;
    DenseLayer l3;
    l3.weights = QMatrix(1, 1);
    l3.bias = QVector(1);
    l3.activation = Activation::Tanhshrink;
    final_act.layers = {l3};
    CHECK_THROWS_AS(final_act.validate(), std::invalid_argument);
}

TEST_CASE("loss values") {
    const QVector a{{1, 2, 3, 4}};
    CHECK(loss(a, a) == 0.0);
    CHECK(loss(QVector{Quaternion::zero()}, QVector{{1, 1, 1, 1}}) == 4.0);
    CHECK(loss(QVector{Quaternion::zero()}, QVector{{1, 2, 3, 4}}) == 30.0);
    CHECK_THROWS_AS(loss(a, QVector(2)), std::invalid_argument);

    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        const QVector x = random_qvector(3, rng);
        const QVector y = random_qvector(3, rng);
        CHECK(loss(x, y) >= 0.0);
        CHECK(loss(x, x) == 0.0);
    }
}

TEST_CASE("output layer backward closed forms") {
    DenseLayer layer;
    layer.weights = QMatrix(1, 1);
    layer.weights(0, 0) = Quaternion{0.5, 0.5, 0, 0};
    layer.bias = QVector{Quaternion::zero()};

    const QVector input{Quaternion::one()};
    const QVector output{layer.weights(0, 0)};  // w * 1
    SUBCASE("zero error means zero gradients") {
        const LayerBackward lb = backward_output_layer(layer, input, output, output);
        CHECK(lb.grads.dw(0, 0) == Quaternion::zero());
        CHECK(lb.grads.db[0] == Quaternion::zero());
        CHECK(lb.p_out[0] == Quaternion::zero());
    }
    SUBCASE("unit activation with real error") {
        const QVector target{output[0] + Quaternion{2, 0, 0, 0}};  // e = (2,0,0,0)
        const LayerBackward lb = backward_output_layer(layer, input, output, target);
        CHECK(lb.grads.dw(0, 0) == Quaternion{-1, 0, 0, 0});
        CHECK(lb.grads.db[0] == Quaternion{-1, 0, 0, 0});
        // p = -1/2 e* w
        CHECK(dist(lb.p_out[0], -0.5 * (conj(Quaternion{2, 0, 0, 0}) *
                                        layer.weights(0, 0))) == 0.0);
    }
}

TEST_CASE("hidden layer backward closed forms") {
    DenseLayer layer;
    layer.weights = QMatrix(2, 2);
    layer.weights(0, 0) = {0.2, -0.4, 0.6, 0.1};
    layer.weights(0, 1) = {1.0, 0.0, -0.5, 0.25};
    layer.weights(1, 0) = {-0.3, 0.8, 0.0, 0.5};
    layer.weights(1, 1) = {0.7, 0.2, 0.9, -0.1};
    layer.bias = QVector(2, Quaternion::zero());

    Rng rng(37);
    const QVector a_prev = {rng.quaternion_box(-1, 1), rng.quaternion_box(-1, 1)};
    const QVector z = {rng.quaternion_box(-1, 1), rng.quaternion_box(-1, 1)};

    SUBCASE("zero incoming signal") {
        const BackpropSignal p(2, Quaternion::zero());
        const LayerBackward lb = backward_hidden_layer(layer, a_prev, z, p);
        for (const Quaternion& g : lb.grads.dw.entries()) CHECK(g == Quaternion::zero());
        for (const Quaternion& g : lb.grads.db) CHECK(g == Quaternion::zero());
        for (const Quaternion& g : lb.p_out) CHECK(g == Quaternion::zero());
    }
    SUBCASE("identity activation passes p straight through") {
        const BackpropSignal p = {rng.quaternion_box(-1, 1), rng.quaternion_box(-1, 1)};
        const LayerBackward lb = backward_hidden_layer(layer, a_prev, z, p);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(dist(lb.grads.db[i], conj(p[i])) == 0.0);
            for (std::size_t j = 0; j < 2; ++j) {
                CHECK(dist(lb.grads.dw(i, j), conj(p[i]) * conj(a_prev[j])) == 0.0);
            }
        }
        for (std::size_t j = 0; j < 2; ++j) {
            Quaternion want = Quaternion::zero();
            for (std::size_t i = 0; i < 2; ++i) want += p[i] * layer.weights(i, j);
            CHECK(dist(lb.p_out[j], want) == 0.0);
        }
    }
}

TEST_CASE("analytic gradients agree with the numeric conjugate gradients") {
    struct Case {
        std::vector<std::size_t> shape;
        Activation act;
    };
    const Case cases[] = {
        {{1, 1}, Activation::Identity},
        {{2, 2}, Activation::Identity},
        {{3, 3, 2, 2}, Activation::Identity},
        {{3, 3, 2, 2}, Activation::Tanhshrink},
    };
    std::uint64_t seed = 1000;
    for (const Case& c : cases) {
        Rng rng(++seed);
        const Network net = random_network(c.shape, c.act, seed);
        const QVector input = random_qvector(c.shape.front(), rng);
        const QVector target = random_qvector(c.shape.back(), rng);
        const GradCheckReport report = gradient_check(net, input, target, 1e-5);
        CAPTURE(report.summary());
        CHECK(report.max_rel_error < 1e-6);
    }
}

TEST_CASE("gradient check on degenerate and identity networks") {
    // All-zero parameters: the loss is locally quadratic, agreement is tight.
    Network zeros;
    DenseLayer l1;
    l1.weights = QMatrix(2, 2);
    l1.bias = QVector(2, Quaternion::zero());
    l1.activation = Activation::Tanhshrink;
    DenseLayer l2;
    l2.weights = QMatrix(2, 2);
    l2.bias = QVector(2, Quaternion::zero());
    zeros.layers = {l1, l2};
    Rng rng(53);
    const QVector input = random_qvector(2, rng);
    const QVector target = random_qvector(2, rng);
    CHECK(gradient_check(zeros, input, target, 1e-5).max_abs_error < 1e-8);

    // Identity activations everywhere: quadratic in each parameter.
    const Network lin = random_network({2, 3, 2}, Activation::Identity, 77);
    const GradCheckReport rep = gradient_check(lin, input, target, 1e-5);
    CHECK(rep.max_rel_error < 1e-9);
}

TEST_CASE("sgd step") {
    const Network net = random_network({2, 2}, Activation::Identity, 5);
    Rng rng(59);
    const QVector input = random_qvector(2, rng);
    const QVector target = random_qvector(2, rng);
    const ForwardTrace trace = forward(net, input);
    const std::vector<LayerGradients> grads = backward(net, trace, target);

    SUBCASE("zero learning rate leaves the network untouched") {
        const Network stepped = sgd_step(net, grads, 0.0);
        CHECK(stepped.layers[0].weights == net.layers[0].weights);
        CHECK(stepped.layers[0].bias == net.layers[0].bias);
    }
    SUBCASE("zero gradients leave the network untouched") {
        std::vector<LayerGradients> zero(1);
        zero[0].dw = QMatrix(2, 2);
        zero[0].db = QVector(2, Quaternion::zero());
        const Network stepped = sgd_step(net, zero, 0.5);
        CHECK(stepped.layers[0].weights == net.layers[0].weights);
    }
    SUBCASE("output layer update adds lr/2 e a*") {
        const double lr = 0.25;
        const Network stepped = sgd_step(net, grads, lr);
        for (std::size_t i = 0; i < 2; ++i) {
            const Quaternion e = target[i] - trace.output()[i];
            for (std::size_t j = 0; j < 2; ++j) {
                const Quaternion want =
                    net.layers[0].weights(i, j) + lr * 0.5 * (e * conj(input[j]));
                CHECK(dist(stepped.layers[0].weights(i, j), want) <= 1e-15);
            }
        }
    }
}

TEST_CASE("one small step decreases the batch loss") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(9000 + trial);
        const Network net = random_network({3, 3, 2, 2}, Activation::Tanhshrink,
                                           7000 + trial);
        std::vector<QVector> inputs, targets;
        for (int s = 0; s < 8; ++s) {
            inputs.push_back(random_qvector(3, rng));
            targets.push_back(random_qvector(2, rng));
        }
        double before = 0.0;
        const std::vector<LayerGradients> grads =
            batch_gradients(net, inputs, targets, nullptr, inputs.size(), &before);
        const Network stepped = sgd_step(net, grads, 1e-3);
        double after = 0.0;
        for (std::size_t s = 0; s < inputs.size(); ++s) {
            after += loss(forward(stepped, inputs[s]).output(), targets[s]);
        }
        after /= static_cast<double>(inputs.size());
        CAPTURE(trial);
        CHECK(after < before);
    }
}

TEST_CASE("output-layer rule is the hidden-layer rule with p = -1/2 e*") {
    // Feeding the output layer's closed form through the hidden-layer path
    // must give identical gradients when sigma' = 1.
    Rng rng(61);
    DenseLayer layer;
    layer.weights = QMatrix(2, 3);
    for (Quaternion& w : layer.weights.entries()) w = rng.quaternion_box(-1, 1);
    layer.bias = random_qvector(2, rng);

    const QVector input = random_qvector(3, rng);
    const QVector z = matvec(layer.weights, input) + layer.bias;
    const QVector target = random_qvector(2, rng);

    const LayerBackward direct = backward_output_layer(layer, input, z, target);
    BackpropSignal p(2);
    for (std::size_t i = 0; i < 2; ++i) p[i] = -0.5 * conj(target[i] - z[i]);
    const LayerBackward via_hidden = backward_hidden_layer(layer, input, z, p);

    for (std::size_t e = 0; e < direct.grads.dw.entries().size(); ++e) {
        CHECK(dist(direct.grads.dw.entries()[e], via_hidden.grads.dw.entries()[e]) <=
              1e-15);
    }
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(dist(direct.grads.db[i], via_hidden.grads.db[i]) <= 1e-15);
    }
}

TEST_CASE("real parameters and inputs stay real through the network") {
    Rng rng(67);
    Network net = make_teacher({2, 3, 2}, Activation::Tanhshrink, 71);
    for (DenseLayer& layer : net.layers) {
        for (Quaternion& w : layer.weights.entries()) w = {rng.uniform(-1, 1), 0, 0, 0};
        for (Quaternion& b : layer.bias) b = {rng.uniform(-1, 1), 0, 0, 0};
    }
    QVector input(2);
    for (Quaternion& q : input) q = {rng.uniform(-1, 1), 0, 0, 0};
    const ForwardTrace trace = forward(net, input);
    for (const QVector& a : trace.activations) {
        for (const Quaternion& q : a) CHECK(imag_norm(q) == 0.0);
    }
}

TEST_CASE("appendix product-rule gradients match the chain-rule forms") {
    Rng rng(73);
    for (int t = 0; t < 1000; ++t) {
        const Quaternion w = rng.quaternion_box(-1, 1);
        const Quaternion a = rng.quaternion_box(-1, 1);
        const Quaternion d = rng.quaternion_box(-1, 1);
        const Quaternion e = d - w * a;
        if (norm(e) < 1e-9) continue;
        const AppendixGradients g = appendix_product_rule_gradient(w, a, d);
        CHECK_FALSE(g.degenerate);
        CHECK(dist(g.dw, -0.5 * (e * conj(a))) <= 1e-12);
        CHECK(dist(g.db, -0.5 * e) <= 1e-12);
    }
}

TEST_CASE("appendix route flags the zero-error degenerate path") {
    const Quaternion w{0.5, -1, 2, 0.25};
    const Quaternion a{1, 1, 0, -1};
    const AppendixGradients g = appendix_product_rule_gradient(w, a, w * a);
    CHECK(g.degenerate);
    CHECK(g.dw == Quaternion::zero());
    CHECK(g.db == Quaternion::zero());

    // a = 1, e = (0,2,0,0): dw = -1/2 e a* = (0,-1,0,0).
    const Quaternion w2{1, 0, 0, 0};
    const AppendixGradients g2 =
        appendix_product_rule_gradient(w2, Quaternion::one(),
                                       w2 * Quaternion::one() + Quaternion{0, 2, 0, 0});
    CHECK_FALSE(g2.degenerate);
    CHECK(dist(g2.dw, {0, -1, 0, 0}) <= 1e-15);
}

TEST_CASE("model serialization round-trips bit-exactly") {
    const Network net = random_network({3, 3, 2, 2}, Activation::Tanhshrink, 83);
    const std::string text = save_network(net);
    const Network loaded = load_network(text);
    REQUIRE(loaded.layers.size() == net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        CHECK(loaded.layers[l].weights == net.layers[l].weights);
        CHECK(loaded.layers[l].bias == net.layers[l].bias);
        CHECK(loaded.layers[l].activation == net.layers[l].activation);
    }
    CHECK(save_network(loaded) == text);
}

TEST_CASE("model parsing rejects malformed input") {
    CHECK_THROWS_AS(load_network("not a model"), std::runtime_error);
    const Network net = random_network({2, 2}, Activation::Identity, 89);
    const std::string text = save_network(net);
    CHECK_THROWS_AS(load_network(text.substr(0, text.size() / 2)), std::runtime_error);
}
