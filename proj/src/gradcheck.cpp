#include "quatnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quatnn {

namespace {

double central_difference(Network& net, const QVector& input, const QVector& target,
                          double& slot, double h) {
    const double saved = slot;
    slot = saved + h;
    const double up = loss(forward(net, input).output(), target);
    slot = saved - h;
    const double down = loss(forward(net, input).output(), target);
    slot = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("quatnn: non-finite loss during gradient check");
    }
    return (up - down) / (2.0 * h);
}

// Numeric dL/dparam* for one parameter quaternion: perturb each of its four
// components, then apply the conjugate 1/4 (g0 + g1 i + g2 j + g3 k) combination.
Quaternion numeric_conjugate_gradient(Network& net, const QVector& input,
                                      const QVector& target, Quaternion& param,
                                      double h) {
    ComponentGradient g;
    for (int a = 0; a < 4; ++a) {
        const double d = central_difference(net, input, target, param[a], h);
        switch (a) {
            case 0: g.d0 = {d, 0, 0, 0}; break;
            case 1: g.d1 = {d, 0, 0, 0}; break;
            case 2: g.d2 = {d, 0, 0, 0}; break;
            default: g.d3 = {d, 0, 0, 0}; break;
        }
    }
    return hr_conjugate_derivative(g, Involution::None);
}

}  // namespace

std::string GradCheckReport::summary() const {
    std::ostringstream os;
    os << "checked " << parameters << " parameter components: max abs error "
       << max_abs_error << ", max rel error " << max_rel_error << " (layer "
       << worst_layer << (worst_is_bias ? " bias " : " weight ") << worst_row;
    if (!worst_is_bias) os << "," << worst_col;
    os << " component " << worst_component << ")";
    return os.str();
}

GradCheckReport gradient_check(const Network& net, const QVector& input,
                               const QVector& target, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("quatnn: gradient check step must be > 0");
    }
    net.validate();
    const std::vector<LayerGradients> analytic =
        backward(net, forward(net, input), target);

    Network probe = net;  // perturbed in place, restored after each component
    GradCheckReport report;

    auto record = [&](const Quaternion& a, const Quaternion& n, std::size_t layer,
                      bool is_bias, std::size_t row, std::size_t col) {
        for (int c = 0; c < 4; ++c) {
            const double abs_err = std::abs(a[c] - n[c]);
            const double rel_err =
                abs_err / std::max({1.0, std::abs(a[c]), std::abs(n[c])});
            report.parameters += 1;
            report.max_abs_error = std::max(report.max_abs_error, abs_err);
            if (rel_err > report.max_rel_error) {
                report.max_rel_error = rel_err;
                report.worst_layer = layer;
                report.worst_is_bias = is_bias;
                report.worst_row = row;
                report.worst_col = col;
                report.worst_component = c;
            }
        }
    };

    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        DenseLayer& layer = probe.layers[l];
        for (std::size_t i = 0; i < layer.outputs(); ++i) {
            for (std::size_t j = 0; j < layer.inputs(); ++j) {
                const Quaternion numeric = numeric_conjugate_gradient(
                    probe, input, target, layer.weights(i, j), h);
                record(analytic[l].dw(i, j), numeric, l, false, i, j);
            }
            const Quaternion numeric =
                numeric_conjugate_gradient(probe, input, target, layer.bias[i], h);
            record(analytic[l].db[i], numeric, l, true, i, 0);
        }
    }
    return report;
}

AppendixGradients appendix_product_rule_gradient(const Quaternion& w,
                                                 const Quaternion& a,
                                                 const Quaternion& d) {
    const Quaternion e = d - w * a;
    AppendixGradients out;
    if (norm_sq(e) == 0.0) {
        out.dw = Quaternion::zero();
        out.db = Quaternion::zero();
        out.degenerate = true;
        return out;
    }
    const Quaternion e_inv = inverse(e);
    // dL/dw* = e* (1/2 a*) + (-a* e0 e^-1) e
    const Quaternion de_dw = 0.5 * conj(a);
    const Quaternion dec_dw = -1.0 * (conj(a) * (e.w * e_inv));
    out.dw = conj(e) * de_dw + dec_dw * e;
    // dL/db* = e* (1/2) + (-e0 e^-1) e
    const Quaternion dec_db = -e.w * e_inv;
    out.db = 0.5 * conj(e) + dec_db * e;
    return out;
}

}  // namespace quatnn
