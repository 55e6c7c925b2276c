#ifndef QUATNN_GRADCHECK_HPP
#define QUATNN_GRADCHECK_HPP

#include <cstddef>
#include <string>

#include "quatnn/ghr.hpp"
#include "quatnn/network.hpp"

namespace quatnn {

/// Outcome of comparing analytic backprop against the numeric conjugate
/// gradient for every scalar parameter component of a network.
struct GradCheckReport {
    std::size_t parameters = 0;    // scalar components compared
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    // location of the worst relative error
    std::size_t worst_layer = 0;
    bool worst_is_bias = false;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    int worst_component = 0;

    bool passed(double tol) const { return max_rel_error < tol; }
    std::string summary() const;
};

/// Perturbs every weight and bias component by +-h, recombines the four
/// numeric partials into dL/dparam* (the 1/4 (g0 + g1 i + g2 j + g3 k)
/// conjugate combination) and compares against the analytic gradients.
/// The relative error is |delta| / max(1, |analytic|, |numeric|).
GradCheckReport gradient_check(const Network& net, const QVector& input,
                               const QVector& target, double h = kDefaultFdStep);

/// Gradients (dL/dw*, dL/db*) of the one-term model y = w a against target d,
/// derived through the generalized product rule on L = e* e, including the
/// -a* e0 e^-1 term from differentiating e*. For e = 0 the inverse is
/// singular; the limit gradients (zero) are returned with the flag set.
struct AppendixGradients {
    Quaternion dw;
    Quaternion db;
    bool degenerate = false;
};

AppendixGradients appendix_product_rule_gradient(const Quaternion& w,
                                                 const Quaternion& a,
                                                 const Quaternion& d);

}  // namespace quatnn

#endif
