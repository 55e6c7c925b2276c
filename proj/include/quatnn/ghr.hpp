#ifndef QUATNN_GHR_HPP
#define QUATNN_GHR_HPP

#include <array>
#include <functional>

#include "quatnn/quaternion.hpp"

namespace quatnn {

/// Central-difference step used whenever no analytic gradient is supplied.
inline constexpr double kDefaultFdStep = 1e-5;

/// The four partial derivatives of a quaternion-valued f with respect to the
/// real components of its argument, each itself a quaternion. Every HR/GHR
/// derivative is a signed, unit-weighted combination of these.
struct ComponentGradient {
    Quaternion d0;  // df / d(Re q)
    Quaternion d1;  // df / d(q_x)
    Quaternion d2;  // df / d(q_y)
    Quaternion d3;  // df / d(q_z)

    const Quaternion& operator[](int a) const {
        switch (a) {
            case 0: return d0;
            case 1: return d1;
            case 2: return d2;
            default: return d3;
        }
    }
};

/// Direction parameter of a generalized derivative: the rotation mu (any
/// nonzero quaternion) and whether the conjugate variant is requested.
struct GhrDirection {
    Quaternion mu = Quaternion::one();
    bool conjugated = false;
};

/// A differentiable scalar function H -> H. `eval` must be deterministic and
/// total on finite inputs. When `analytic_gradient` is empty, gradients fall
/// back to central differences.
struct QuatFunction {
    std::function<Quaternion(const Quaternion&)> eval;
    std::function<ComponentGradient(const Quaternion&)> analytic_gradient;

    ComponentGradient gradient_at(const Quaternion& at,
                                  double h = kDefaultFdStep) const;
};

/// Derivative with respect to q, q^i, q^j or q^k: the 1/4-weighted
/// combination with minus signs and right-multiplied imaginary units.
Quaternion hr_derivative(const ComponentGradient& g, Involution variant);

/// Conjugate counterparts (variant None yields d/dq*); plus signs.
Quaternion hr_conjugate_derivative(const ComponentGradient& g, Involution variant);

/// Generalized derivative along an arbitrary rotation mu: imaginary units are
/// replaced by mu a mu^-1. Reduces exactly to the hr variants for
/// mu in {1, i, j, k}. Throws std::domain_error for mu = 0.
Quaternion ghr_derivative(const ComponentGradient& g, const GhrDirection& dir);

/// Plain component sum d0 + d1 i + d2 j + d3 k (no 1/4 factor). This is the
/// rule whose product/chain failures the demonstration suite exhibits.
Quaternion naive_derivative(const ComponentGradient& g);

/// Central differences (f(q + h e_a) - f(q - h e_a)) / 2h per component.
/// Throws std::invalid_argument for h <= 0 and std::runtime_error when the
/// evaluation is non-finite.
ComponentGradient finite_difference_gradient(const QuatFunction& f,
                                             const Quaternion& at,
                                             double h = kDefaultFdStep);

/// Product rule d(fg)/dq^mu = f dg/dq^mu + df/dq^(g(at) mu) g(at). The left
/// factor is differentiated in the rotated direction g(at)*mu; throws
/// std::domain_error when that rotation degenerates to zero.
Quaternion ghr_product_rule(const QuatFunction& f, const QuatFunction& g,
                            const Quaternion& at, const GhrDirection& dir,
                            double h = kDefaultFdStep);

/// Chain rule for f(g(q)): sum over nu in {1, i, j, k} of
/// (df/dg^nu) * (dg^nu/dq^mu). `outer` is the component gradient of f at
/// g(q); `inner_traces` holds the four dg^nu/dq^mu factors in that order.
Quaternion ghr_chain_rule(const ComponentGradient& outer,
                          const std::array<Quaternion, 4>& inner_traces);

/// Ready-made functions with exact gradients, used by the demonstration
/// suite and as cross-check material.
QuatFunction make_identity();                     // q
QuatFunction make_conj();                         // q*
QuatFunction make_norm_sq();                      // q q* (real-valued)
QuatFunction make_left_mul(const Quaternion& c);  // c q
QuatFunction make_right_mul(const Quaternion& c); // q c
QuatFunction make_square();                       // q q

}  // namespace quatnn

#endif
