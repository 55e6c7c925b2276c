#include "quatnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quatnn {

double activate_scalar(Activation act, double v) {
    switch (act) {
        case Activation::Identity: return v;
        default: return v - std::tanh(v);
    }
}

double activate_prime_scalar(Activation act, double v) {
    switch (act) {
        case Activation::Identity: return 1.0;
        default: {
            const double t = std::tanh(v);
            return t * t;
        }
    }
}

Quaternion activate(Activation act, const Quaternion& z) {
    return {activate_scalar(act, z.w), activate_scalar(act, z.x),
            activate_scalar(act, z.y), activate_scalar(act, z.z)};
}

Quaternion activate_prime(Activation act, const Quaternion& z) {
    return {activate_prime_scalar(act, z.w), activate_prime_scalar(act, z.x),
            activate_prime_scalar(act, z.y), activate_prime_scalar(act, z.z)};
}

const char* activation_name(Activation act) {
    return act == Activation::Identity ? "identity" : "tanhshrink";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "tanhshrink") return Activation::Tanhshrink;
    throw std::invalid_argument("quatnn: unknown activation '" + name + "'");
}

void Network::validate() const {
    if (layers.empty()) {
        throw std::invalid_argument("quatnn: network needs at least one layer");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const DenseLayer& layer = layers[l];
        if (layer.bias.size() != layer.outputs()) {
            throw std::invalid_argument("quatnn: bias length mismatch in layer " +
                                        std::to_string(l));
        }
        if (l > 0 && layers[l - 1].outputs() != layer.inputs()) {
            throw std::invalid_argument("quatnn: layer " + std::to_string(l) +
                                        " input does not match previous output");
        }
    }
    if (layers.back().activation != Activation::Identity) {
        throw std::invalid_argument(
            "quatnn: the final layer must have Identity activation");
    }
}

ForwardTrace forward(const Network& net, const QVector& input) {
    if (input.size() != net.input_size()) {
        throw std::invalid_argument("quatnn: forward input dimension mismatch");
    }
    ForwardTrace trace;
    trace.input = input;
    trace.pre_activations.reserve(net.layers.size());
    trace.activations.reserve(net.layers.size());
    const QVector* cur = &trace.input;
    for (const DenseLayer& layer : net.layers) {
        QVector z = matvec(layer.weights, *cur) + layer.bias;
        QVector a(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            a[i] = activate(layer.activation, z[i]);
        }
        trace.pre_activations.push_back(std::move(z));
        trace.activations.push_back(std::move(a));
        cur = &trace.activations.back();
    }
    return trace;
}

double loss(const QVector& output, const QVector& target) {
    if (output.size() != target.size()) {
        throw std::invalid_argument("quatnn: loss dimension mismatch");
    }
    Quaternion total = Quaternion::zero();
    for (std::size_t i = 0; i < output.size(); ++i) {
        const Quaternion e = target[i] - output[i];
        total += conj(e) * e;
    }
    // The vector part of e* e cancels up to rounding; anything beyond that
    // means the arithmetic above was changed incorrectly. Non-finite sums
    // pass through so callers can report the divergence themselves.
    const double imag_peak =
        std::max({std::abs(total.x), std::abs(total.y), std::abs(total.z)});
    if (is_finite(total) && imag_peak > 1e-12 * std::max(1.0, total.w)) {
        throw std::logic_error("quatnn: loss acquired an imaginary part");
    }
    return total.w;
}

LayerBackward backward_output_layer(const DenseLayer& layer,
                                    const QVector& layer_input,
                                    const QVector& output,
                                    const QVector& target) {
    if (layer.activation != Activation::Identity) {
        throw std::invalid_argument(
            "quatnn: output-layer backward requires Identity activation");
    }
    const std::size_t m = layer.outputs();
    const std::size_t n = layer.inputs();
    if (layer_input.size() != n || output.size() != m || target.size() != m) {
        throw std::invalid_argument("quatnn: output-layer backward dimension mismatch");
    }
    LayerBackward out;
    out.grads.dw = QMatrix(m, n);
    out.grads.db = QVector(m);
    out.p_out = QVector(n, Quaternion::zero());
    for (std::size_t i = 0; i < m; ++i) {
        const Quaternion e = target[i] - output[i];
        for (std::size_t j = 0; j < n; ++j) {
            out.grads.dw(i, j) = -0.5 * (e * conj(layer_input[j]));
            out.p_out[j] += -0.5 * (conj(e) * layer.weights(i, j));
        }
        out.grads.db[i] = -0.5 * e;
    }
    return out;
}

LayerBackward backward_hidden_layer(const DenseLayer& layer,
                                    const QVector& layer_input,
                                    const QVector& pre_activation,
                                    const BackpropSignal& p_in) {
    const std::size_t m = layer.outputs();
    const std::size_t n = layer.inputs();
    if (layer_input.size() != n || pre_activation.size() != m || p_in.size() != m) {
        throw std::invalid_argument("quatnn: hidden-layer backward dimension mismatch");
    }
    LayerBackward out;
    out.grads.dw = QMatrix(m, n);
    out.grads.db = QVector(m);
    out.p_out = QVector(n, Quaternion::zero());
    for (std::size_t i = 0; i < m; ++i) {
        const Quaternion q =
            hadamard(p_in[i], activate_prime(layer.activation, pre_activation[i]));
        const Quaternion qc = conj(q);
        for (std::size_t j = 0; j < n; ++j) {
            out.grads.dw(i, j) = qc * conj(layer_input[j]);
            out.p_out[j] += q * layer.weights(i, j);
        }
        out.grads.db[i] = qc;
    }
    return out;
}

std::vector<LayerGradients> backward(const Network& net, const ForwardTrace& trace,
                                     const QVector& target) {
    const std::size_t n_layers = net.layers.size();
    std::vector<LayerGradients> grads(n_layers);

    LayerBackward step = backward_output_layer(
        net.layers.back(), trace.layer_input(n_layers - 1), trace.output(), target);
    grads[n_layers - 1] = std::move(step.grads);

    for (std::size_t l = n_layers - 1; l-- > 0;) {
        step = backward_hidden_layer(net.layers[l], trace.layer_input(l),
                                     trace.pre_activations[l], step.p_out);
        grads[l] = std::move(step.grads);
    }
    return grads;
}

Network sgd_step(Network net, const std::vector<LayerGradients>& grads, double lr) {
    if (grads.size() != net.layers.size()) {
        throw std::invalid_argument("quatnn: sgd_step gradient count mismatch");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        DenseLayer& layer = net.layers[l];
        const LayerGradients& g = grads[l];
        if (g.dw.rows() != layer.outputs() || g.dw.cols() != layer.inputs() ||
            g.db.size() != layer.outputs()) {
            throw std::invalid_argument("quatnn: sgd_step gradient shape mismatch");
        }
        for (std::size_t i = 0; i < layer.outputs(); ++i) {
            for (std::size_t j = 0; j < layer.inputs(); ++j) {
                layer.weights(i, j) -= lr * g.dw(i, j);
            }
            layer.bias[i] -= lr * g.db[i];
        }
    }
    return net;
}

std::vector<LayerGradients> batch_gradients(const Network& net,
                                            const std::vector<QVector>& inputs,
                                            const std::vector<QVector>& targets,
                                            const std::size_t* indices,
                                            std::size_t count,
                                            double* mean_loss) {
    if (count == 0) {
        throw std::invalid_argument("quatnn: empty batch");
    }
    std::vector<LayerGradients> acc(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        acc[l].dw = QMatrix(net.layers[l].outputs(), net.layers[l].inputs());
        acc[l].db = QVector(net.layers[l].outputs(), Quaternion::zero());
    }
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t idx = indices ? indices[s] : s;
        const ForwardTrace trace = forward(net, inputs[idx]);
        loss_sum += loss(trace.output(), targets[idx]);
        const std::vector<LayerGradients> g = backward(net, trace, targets[idx]);
        for (std::size_t l = 0; l < acc.size(); ++l) {
            for (std::size_t e = 0; e < acc[l].dw.entries().size(); ++e) {
                acc[l].dw.entries()[e] += g[l].dw.entries()[e];
            }
            for (std::size_t i = 0; i < acc[l].db.size(); ++i) {
                acc[l].db[i] += g[l].db[i];
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(count);
    for (LayerGradients& g : acc) {
        for (Quaternion& q : g.dw.entries()) q = scale * q;
        for (Quaternion& q : g.db) q = scale * q;
    }
    if (mean_loss) *mean_loss = loss_sum * scale;
    return acc;
}

namespace {

void append_component(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += ' ';
    out += buf;
}

void append_quaternion(std::string& out, const Quaternion& q) {
    append_component(out, q.w);
    append_component(out, q.x);
    append_component(out, q.y);
    append_component(out, q.z);
}

Quaternion read_quaternion(std::istream& is, const char* what) {
    Quaternion q;
    if (!(is >> q.w >> q.x >> q.y >> q.z)) {
        throw std::runtime_error(std::string("quatnn: model parse error reading ") + what);
    }
    return q;
}

}  // namespace

std::string save_network(const Network& net) {
    net.validate();
    std::string out = "qnn v1 layers=" + std::to_string(net.layers.size()) + "\n";
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const DenseLayer& layer = net.layers[l];
        out += "layer " + std::to_string(l) + " in=" + std::to_string(layer.inputs()) +
               " out=" + std::to_string(layer.outputs()) +
               " activation=" + activation_name(layer.activation) + "\n";
        for (std::size_t i = 0; i < layer.outputs(); ++i) {
            for (std::size_t j = 0; j < layer.inputs(); ++j) {
                out += "w " + std::to_string(i) + " " + std::to_string(j);
                append_quaternion(out, layer.weights(i, j));
                out += "\n";
            }
        }
        for (std::size_t i = 0; i < layer.outputs(); ++i) {
            out += "b " + std::to_string(i);
            append_quaternion(out, layer.bias[i]);
            out += "\n";
        }
    }
    return out;
}

Network load_network(const std::string& text) {
    std::istringstream is(text);
    std::string tag, version, layers_field;
    if (!(is >> tag >> version >> layers_field) || tag != "qnn" || version != "v1" ||
        layers_field.rfind("layers=", 0) != 0) {
        throw std::runtime_error("quatnn: model parse error in header");
    }
    const std::size_t n_layers = std::stoul(layers_field.substr(7));
    Network net;
    net.layers.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        std::string kw, in_field, out_field, act_field;
        std::size_t idx = 0;
        if (!(is >> kw >> idx >> in_field >> out_field >> act_field) || kw != "layer" ||
            idx != l || in_field.rfind("in=", 0) != 0 || out_field.rfind("out=", 0) != 0 ||
            act_field.rfind("activation=", 0) != 0) {
            throw std::runtime_error("quatnn: model parse error in layer " +
                                     std::to_string(l) + " header");
        }
        DenseLayer layer;
        const std::size_t n = std::stoul(in_field.substr(3));
        const std::size_t m = std::stoul(out_field.substr(4));
        layer.weights = QMatrix(m, n);
        layer.bias = QVector(m);
        layer.activation = activation_from_name(act_field.substr(11));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::string w_kw;
                std::size_t wi = 0, wj = 0;
                if (!(is >> w_kw >> wi >> wj) || w_kw != "w" || wi != i || wj != j) {
                    throw std::runtime_error("quatnn: model parse error in weights of layer " +
                                             std::to_string(l));
                }
                layer.weights(i, j) = read_quaternion(is, "weight");
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            std::string b_kw;
            std::size_t bi = 0;
            if (!(is >> b_kw >> bi) || b_kw != "b" || bi != i) {
                throw std::runtime_error("quatnn: model parse error in biases of layer " +
                                         std::to_string(l));
            }
            layer.bias[i] = read_quaternion(is, "bias");
        }
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

void save_network_file(const Network& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("quatnn: cannot open '" + path + "' for writing");
    os << save_network(net);
    if (!os) throw std::runtime_error("quatnn: failed writing '" + path + "'");
}

Network load_network_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("quatnn: cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << is.rdbuf();
    return load_network(buf.str());
}

}  // namespace quatnn
