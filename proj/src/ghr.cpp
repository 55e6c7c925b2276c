#include "quatnn/ghr.hpp"

#include <stdexcept>

namespace quatnn {

namespace {

// Shared combination step: 0.25 * (d0 + sign * (d1 iu + d2 ju + d3 ku)).
// hr_* passes exact unit constants; ghr_derivative passes rotated units.
// Keeping one arithmetic path makes the mu in {1,i,j,k} reduction bit-exact.
Quaternion combine(const ComponentGradient& g, const Quaternion& iu,
                   const Quaternion& ju, const Quaternion& ku, double sign) {
    return 0.25 * (g.d0 + sign * (g.d1 * iu + g.d2 * ju + g.d3 * ku));
}

struct UnitTriple {
    Quaternion i, j, k;
};

// Images of (i, j, k) under conjugation by the axis unit of each variant.
UnitTriple variant_units(Involution variant) {
    const Quaternion i = Quaternion::unit_i();
    const Quaternion j = Quaternion::unit_j();
    const Quaternion k = Quaternion::unit_k();
    switch (variant) {
        case Involution::None: return {i, j, k};
        case Involution::I: return {i, -j, -k};
        case Involution::J: return {-i, j, -k};
        default: return {-i, -j, k};
    }
}

}  // namespace

ComponentGradient QuatFunction::gradient_at(const Quaternion& at, double h) const {
    if (analytic_gradient) return analytic_gradient(at);
    return finite_difference_gradient(*this, at, h);
}

Quaternion hr_derivative(const ComponentGradient& g, Involution variant) {
    const UnitTriple u = variant_units(variant);
    return combine(g, u.i, u.j, u.k, -1.0);
}

Quaternion hr_conjugate_derivative(const ComponentGradient& g, Involution variant) {
    const UnitTriple u = variant_units(variant);
    return combine(g, u.i, u.j, u.k, 1.0);
}

Quaternion ghr_derivative(const ComponentGradient& g, const GhrDirection& dir) {
    if (norm_sq(dir.mu) == 0.0) {
        throw std::domain_error("quatnn: ghr_derivative with mu = 0");
    }
    const Quaternion mu_inv = inverse(dir.mu);
    const Quaternion iu = dir.mu * Quaternion::unit_i() * mu_inv;
    const Quaternion ju = dir.mu * Quaternion::unit_j() * mu_inv;
    const Quaternion ku = dir.mu * Quaternion::unit_k() * mu_inv;
    return combine(g, iu, ju, ku, dir.conjugated ? 1.0 : -1.0);
}

Quaternion naive_derivative(const ComponentGradient& g) {
    return g.d0 + g.d1 * Quaternion::unit_i() + g.d2 * Quaternion::unit_j() +
           g.d3 * Quaternion::unit_k();
}

ComponentGradient finite_difference_gradient(const QuatFunction& f,
                                             const Quaternion& at, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("quatnn: finite difference step must be > 0");
    }
    ComponentGradient g;
    for (int a = 0; a < 4; ++a) {
        Quaternion hi = at;
        Quaternion lo = at;
        hi[a] += h;
        lo[a] -= h;
        const Quaternion fh = f.eval(hi);
        const Quaternion fl = f.eval(lo);
        if (!is_finite(fh) || !is_finite(fl)) {
            throw std::runtime_error(
                "quatnn: non-finite evaluation in finite_difference_gradient");
        }
        const Quaternion d = (fh - fl) / (2.0 * h);
        switch (a) {
            case 0: g.d0 = d; break;
            case 1: g.d1 = d; break;
            case 2: g.d2 = d; break;
            default: g.d3 = d; break;
        }
    }
    return g;
}

Quaternion ghr_product_rule(const QuatFunction& f, const QuatFunction& g,
                            const Quaternion& at, const GhrDirection& dir,
                            double h) {
    const Quaternion f_at = f.eval(at);
    const Quaternion g_at = g.eval(at);
    const Quaternion rotated = g_at * dir.mu;
    if (norm_sq(rotated) == 0.0) {
        throw std::domain_error(
            "quatnn: ghr_product_rule with degenerate rotated direction g(at)*mu");
    }
    const Quaternion dg = ghr_derivative(g.gradient_at(at, h), dir);
    const Quaternion df = ghr_derivative(f.gradient_at(at, h),
                                         {rotated, dir.conjugated});
    return f_at * dg + df * g_at;
}

Quaternion ghr_chain_rule(const ComponentGradient& outer,
                          const std::array<Quaternion, 4>& inner_traces) {
    static constexpr std::array<Involution, 4> kVariants{
        Involution::None, Involution::I, Involution::J, Involution::K};
    Quaternion acc = Quaternion::zero();
    for (int v = 0; v < 4; ++v) {
        acc += hr_derivative(outer, kVariants[v]) * inner_traces[v];
    }
    return acc;
}

QuatFunction make_identity() {
    return {[](const Quaternion& q) { return q; },
            [](const Quaternion&) {
                return ComponentGradient{Quaternion::one(), Quaternion::unit_i(),
                                         Quaternion::unit_j(), Quaternion::unit_k()};
            }};
}

QuatFunction make_conj() {
    return {[](const Quaternion& q) { return conj(q); },
            [](const Quaternion&) {
                return ComponentGradient{Quaternion::one(), -Quaternion::unit_i(),
                                         -Quaternion::unit_j(), -Quaternion::unit_k()};
            }};
}

QuatFunction make_norm_sq() {
    return {[](const Quaternion& q) { return q * conj(q); },
            [](const Quaternion& q) {
                return ComponentGradient{{2.0 * q.w, 0.0, 0.0, 0.0},
                                         {2.0 * q.x, 0.0, 0.0, 0.0},
                                         {2.0 * q.y, 0.0, 0.0, 0.0},
                                         {2.0 * q.z, 0.0, 0.0, 0.0}};
            }};
}

QuatFunction make_left_mul(const Quaternion& c) {
    return {[c](const Quaternion& q) { return c * q; },
            [c](const Quaternion&) {
                return ComponentGradient{c, c * Quaternion::unit_i(),
                                         c * Quaternion::unit_j(),
                                         c * Quaternion::unit_k()};
            }};
}

QuatFunction make_right_mul(const Quaternion& c) {
    return {[c](const Quaternion& q) { return q * c; },
            [c](const Quaternion&) {
                return ComponentGradient{c, Quaternion::unit_i() * c,
                                         Quaternion::unit_j() * c,
                                         Quaternion::unit_k() * c};
            }};
}

QuatFunction make_square() {
    return {[](const Quaternion& q) { return q * q; },
            [](const Quaternion& q) {
                const Quaternion i = Quaternion::unit_i();
                const Quaternion j = Quaternion::unit_j();
                const Quaternion k = Quaternion::unit_k();
                return ComponentGradient{2.0 * q, i * q + q * i, j * q + q * j,
                                         k * q + q * k};
            }};
}

}  // namespace quatnn
