#include "quatnn/verify.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "quatnn/rng.hpp"

namespace quatnn {

namespace {

constexpr double kGhrMatchTol = 1e-12;
constexpr double kSeparationMismatch = 0.1;

std::string fmt(const Quaternion& q, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << "(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
    return os.str();
}

}  // namespace

RouteSample naive_product_route(const Quaternion& q) {
    // f g with f = q, g = q*, real-style product rule on the naive derivative.
    const ComponentGradient grad_id = make_identity().gradient_at(q);
    const ComponentGradient grad_conj = make_conj().gradient_at(q);
    const ComponentGradient grad_nsq = make_norm_sq().gradient_at(q);
    RouteSample s;
    s.at = q;
    s.via_rule = q * naive_derivative(grad_conj) + naive_derivative(grad_id) * conj(q);
    s.direct = naive_derivative(grad_nsq);
    s.mismatch = norm(s.via_rule - s.direct);
    s.degenerate = imag_norm(q) < kSeparationImagNorm;
    return s;
}

RouteSample naive_chain_route(const Quaternion& x, const Quaternion& y) {
    // f(z) = z z*, z = x y, derivative with respect to x; y held fixed.
    const Quaternion z = x * y;
    const ComponentGradient outer = make_norm_sq().gradient_at(z);
    const ComponentGradient inner = make_right_mul(y).gradient_at(x);
    RouteSample s;
    s.at = x;
    s.at2 = y;
    s.via_rule = naive_derivative(outer) * naive_derivative(inner);
    // Componentwise gradient of ||x y||^2 = ||x||^2 ||y||^2 in x is 2 x_a ||y||^2.
    const double y2 = norm_sq(y);
    s.direct = naive_derivative(ComponentGradient{{2.0 * x.w * y2, 0, 0, 0},
                                                  {2.0 * x.x * y2, 0, 0, 0},
                                                  {2.0 * x.y * y2, 0, 0, 0},
                                                  {2.0 * x.z * y2, 0, 0, 0}});
    s.mismatch = norm(s.via_rule - s.direct);
    s.degenerate = norm(x) < 0.3 || norm(y) < 0.3;
    return s;
}

RouteSample hr_product_route(const Quaternion& q) {
    const ComponentGradient grad_id = make_identity().gradient_at(q);
    const ComponentGradient grad_conj = make_conj().gradient_at(q);
    const ComponentGradient grad_nsq = make_norm_sq().gradient_at(q);
    RouteSample s;
    s.at = q;
    s.via_rule = q * hr_derivative(grad_conj, Involution::None) +
                 hr_derivative(grad_id, Involution::None) * conj(q);
    s.direct = hr_derivative(grad_nsq, Involution::None);
    s.mismatch = norm(s.via_rule - s.direct);
    s.degenerate = imag_norm(q) < kSeparationImagNorm;
    return s;
}

RouteSample ghr_product_route(const Quaternion& q) {
    const ComponentGradient grad_nsq = make_norm_sq().gradient_at(q);
    RouteSample s;
    s.at = q;
    s.via_rule = ghr_product_rule(make_identity(), make_conj(), q, GhrDirection{});
    s.direct = hr_derivative(grad_nsq, Involution::None);
    s.mismatch = norm(s.via_rule - s.direct);
    s.degenerate = norm(q) < 1e-8;  // q* must stay invertible
    return s;
}

bool RouteResult::as_expected() const {
    if (points == degenerate_points) return false;  // nothing separated the routes
    if (expect_mismatch) return mismatch_min > kSeparationMismatch;
    return mismatch_max <= kGhrMatchTol;
}

std::string RouteResult::verdict() const {
    if (!as_expected()) return "UNEXPECTED";
    return expect_mismatch ? "FAILED-AS-EXPECTED" : "PASSED";
}

bool FailureReport::all_as_expected() const {
    return std::all_of(routes.begin(), routes.end(),
                       [](const RouteResult& r) { return r.as_expected(); });
}

std::string FailureReport::to_text() const {
    std::ostringstream os;
    os << "derivative rule check, seed " << seed << ", " << points
       << " random points per route\n";
    for (const RouteResult& r : routes) {
        os << "\n[" << r.verdict() << "] " << r.route << "\n";
        os << "  mismatch norm over separating points: min " << r.mismatch_min
           << ", max " << r.mismatch_max << "\n";
        os << "  sample at " << fmt(r.sample.at);
        if (norm_sq(r.sample.at2) != 0.0) os << " with second operand " << fmt(r.sample.at2);
        os << "\n    rule route " << fmt(r.sample.via_rule) << "\n    direct     "
           << fmt(r.sample.direct) << "\n";
        if (r.degenerate_points > 0) {
            os << "  note: " << r.degenerate_points
               << " point(s) were (near-)real and do not separate the routes;"
                  " excluded from the verdict\n";
        }
    }
    return os.str();
}

std::string FailureReport::to_kv() const {
    std::ostringstream os;
    os.precision(17);
    for (const RouteResult& r : routes) {
        os << "route=" << r.route << " expected=" << fmt(r.sample.direct, 17)
           << " actual=" << fmt(r.sample.via_rule, 17)
           << " mismatch_min=" << r.mismatch_min
           << " mismatch_max=" << r.mismatch_max
           << " degenerate_points=" << r.degenerate_points
           << " verdict=" << r.verdict() << "\n";
    }
    return os.str();
}

FailureReport demonstrate_rule_failures(std::uint64_t seed, std::size_t points) {
    Rng rng(seed);
    FailureReport report;
    report.seed = seed;
    report.points = points;
    report.routes = {
        {"naive product rule (d(q q*)/dq)", true},
        {"naive chain rule (d(z z*)/dx, z = x y)", true},
        {"hr product rule (d(q q*)/dq)", true},
        {"ghr product rule (d(q q*)/dq)", false},
    };
    for (RouteResult& r : report.routes) {
        r.mismatch_min = std::numeric_limits<double>::infinity();
    }

    for (std::size_t p = 0; p < points; ++p) {
        const Quaternion q = rng.quaternion_box(-1.0, 1.0);
        const Quaternion y = rng.quaternion_box(-1.0, 1.0);
        const RouteSample samples[4] = {
            naive_product_route(q),
            naive_chain_route(q, y),
            hr_product_route(q),
            ghr_product_route(q),
        };
        for (int s = 0; s < 4; ++s) {
            RouteResult& r = report.routes[s];
            r.points += 1;
            r.mismatch_max = std::max(r.mismatch_max, samples[s].mismatch);
            if (samples[s].degenerate) {
                r.degenerate_points += 1;
            } else {
                if (r.mismatch_min == std::numeric_limits<double>::infinity()) {
                    r.sample = samples[s];
                }
                r.mismatch_min = std::min(r.mismatch_min, samples[s].mismatch);
            }
        }
    }
    return report;
}

namespace {

double max_error_over(Rng& rng, std::size_t samples,
                      double (*deviation)(const Quaternion&)) {
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Quaternion q = rng.quaternion_box(-1.0, 1.0);
        worst = std::max(worst, deviation(q));
    }
    return worst;
}

Quaternion inv(const Quaternion& q, Involution a) { return involution(q, a); }
Quaternion cinv(const Quaternion& q, Involution a) { return conj_involution(q, a); }

double dev_components_from_involutions(const Quaternion& q) {
    const Quaternion qi = inv(q, Involution::I);
    const Quaternion qj = inv(q, Involution::J);
    const Quaternion qk = inv(q, Involution::K);
    const Quaternion i = Quaternion::unit_i();
    const Quaternion j = Quaternion::unit_j();
    const Quaternion k = Quaternion::unit_k();
    double worst = 0.0;
    worst = std::max(worst, norm(0.25 * (q + qi + qj + qk) - Quaternion{q.w, 0, 0, 0}));
    worst = std::max(worst, norm(-0.25 * (i * (q + qi - qj - qk)) - Quaternion{q.x, 0, 0, 0}));
    worst = std::max(worst, norm(-0.25 * (j * (q - qi + qj - qk)) - Quaternion{q.y, 0, 0, 0}));
    worst = std::max(worst, norm(-0.25 * (k * (q - qi - qj + qk)) - Quaternion{q.z, 0, 0, 0}));
    return worst;
}

double dev_components_from_conj_involutions(const Quaternion& q) {
    const Quaternion qc = conj(q);
    const Quaternion qci = cinv(q, Involution::I);
    const Quaternion qcj = cinv(q, Involution::J);
    const Quaternion qck = cinv(q, Involution::K);
    const Quaternion i = Quaternion::unit_i();
    const Quaternion j = Quaternion::unit_j();
    const Quaternion k = Quaternion::unit_k();
    double worst = 0.0;
    worst = std::max(worst, norm(0.25 * (qc + qci + qcj + qck) - Quaternion{q.w, 0, 0, 0}));
    worst = std::max(worst, norm(0.25 * (i * (qc + qci - qcj - qck)) - Quaternion{q.x, 0, 0, 0}));
    worst = std::max(worst, norm(0.25 * (j * (qc - qci + qcj - qck)) - Quaternion{q.y, 0, 0, 0}));
    worst = std::max(worst, norm(0.25 * (k * (qc - qci - qcj + qck)) - Quaternion{q.z, 0, 0, 0}));
    return worst;
}

double dev_conjugates_from_involutions(const Quaternion& q) {
    const Quaternion qi = inv(q, Involution::I);
    const Quaternion qj = inv(q, Involution::J);
    const Quaternion qk = inv(q, Involution::K);
    double worst = 0.0;
    worst = std::max(worst, norm(0.5 * (-q + qi + qj + qk) - conj(q)));
    worst = std::max(worst, norm(0.5 * (q - qi + qj + qk) - cinv(q, Involution::I)));
    worst = std::max(worst, norm(0.5 * (q + qi - qj + qk) - cinv(q, Involution::J)));
    worst = std::max(worst, norm(0.5 * (q + qi + qj - qk) - cinv(q, Involution::K)));
    return worst;
}

double dev_values_from_conj_involutions(const Quaternion& q) {
    const Quaternion qc = conj(q);
    const Quaternion qci = cinv(q, Involution::I);
    const Quaternion qcj = cinv(q, Involution::J);
    const Quaternion qck = cinv(q, Involution::K);
    double worst = 0.0;
    worst = std::max(worst, norm(0.5 * (-qc + qci + qcj + qck) - q));
    worst = std::max(worst, norm(0.5 * (qc - qci + qcj + qck) - inv(q, Involution::I)));
    worst = std::max(worst, norm(0.5 * (qc + qci - qcj + qck) - inv(q, Involution::J)));
    worst = std::max(worst, norm(0.5 * (qc + qci + qcj - qck) - inv(q, Involution::K)));
    return worst;
}

double dev_mirror_definition(const Quaternion& q) {
    double worst = 0.0;
    for (Involution a : {Involution::I, Involution::J, Involution::K}) {
        const Quaternion eta = axis_unit(a);
        worst = std::max(worst, norm((-eta) * q * eta - involution(q, a)));
    }
    return worst;
}

double dev_component_times_unit(const Quaternion& q) {
    const Quaternion qi = inv(q, Involution::I);
    const Quaternion qj = inv(q, Involution::J);
    const Quaternion qk = inv(q, Involution::K);
    double worst = 0.0;
    worst = std::max(worst, norm(0.25 * (q + qi + qj + qk) - Quaternion{q.w, 0, 0, 0}));
    worst = std::max(worst, norm(0.25 * (q + qi - qj - qk) - q.x * Quaternion::unit_i()));
    worst = std::max(worst, norm(0.25 * (q - qi + qj - qk) - q.y * Quaternion::unit_j()));
    worst = std::max(worst, norm(0.25 * (q - qi - qj + qk) - q.z * Quaternion::unit_k()));
    return worst;
}

}  // namespace

std::vector<IdentityCheck> involution_identity_suite(std::uint64_t seed,
                                                     std::size_t samples) {
    struct Entry {
        const char* name;
        double (*deviation)(const Quaternion&);
    };
    const Entry entries[] = {
        {"components-from-involutions", dev_components_from_involutions},
        {"components-from-conjugate-involutions", dev_components_from_conj_involutions},
        {"conjugates-from-involutions", dev_conjugates_from_involutions},
        {"values-from-conjugate-involutions", dev_values_from_conj_involutions},
        {"mirror-definition", dev_mirror_definition},
        {"component-times-unit", dev_component_times_unit},
    };
    std::vector<IdentityCheck> out;
    Rng rng(seed);
    for (const Entry& e : entries) {
        out.push_back({e.name, samples, max_error_over(rng, samples, e.deviation)});
    }
    return out;
}

}  // namespace quatnn
