#ifndef QUATNN_VERIFY_HPP
#define QUATNN_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quatnn/ghr.hpp"
#include "quatnn/quaternion.hpp"

namespace quatnn {

/// Imaginary-part threshold below which a test point cannot separate a
/// failing derivative route from the direct result (for real q the naive
/// and HR product routes collapse onto the correct value).
inline constexpr double kSeparationImagNorm = 0.5;

/// One derivative route evaluated against the direct derivative at a point.
struct RouteSample {
    Quaternion at;        // evaluation point (x for the chain demo)
    Quaternion at2;       // second operand (y for the chain demo); unused otherwise
    Quaternion direct;    // derivative straight from the component partials
    Quaternion via_rule;  // derivative through the rule under test
    double mismatch = 0.0;  // ||via_rule - direct||
    bool degenerate = false;  // point cannot separate the two routes
};

// The three textbook failure routes and the working generalized route, all
// for f(q) = q q* (the chain demo uses f = z z*, z = x y, d/dx).
RouteSample naive_product_route(const Quaternion& q);
RouteSample naive_chain_route(const Quaternion& x, const Quaternion& y);
RouteSample hr_product_route(const Quaternion& q);
RouteSample ghr_product_route(const Quaternion& q);

/// Aggregate over sampled points for one route.
struct RouteResult {
    std::string route;
    bool expect_mismatch = false;
    std::size_t points = 0;
    std::size_t degenerate_points = 0;
    double mismatch_min = 0.0;  // over separating points
    double mismatch_max = 0.0;  // over all points
    RouteSample sample;         // first separating point, kept for the report

    bool as_expected() const;
    std::string verdict() const;  // FAILED-AS-EXPECTED | PASSED | UNEXPECTED
};

struct FailureReport {
    std::uint64_t seed = 0;
    std::size_t points = 0;
    std::vector<RouteResult> routes;

    bool all_as_expected() const;
    /// Human-readable block, one paragraph per route.
    std::string to_text() const;
    /// Machine-readable listing, one `key=value` pair per token.
    std::string to_kv() const;
};

/// Evaluates every route at `points` seeded random quaternions with
/// components in [-1, 1]. Routes that are supposed to disagree must show a
/// mismatch norm > 0.1 at every separating point; the generalized route must
/// match within 1e-12 everywhere.
FailureReport demonstrate_rule_failures(std::uint64_t seed, std::size_t points = 100);

/// Result of checking one involution identity family over random samples.
struct IdentityCheck {
    std::string name;
    std::size_t samples = 0;
    double max_abs_error = 0.0;
};

/// Checks the reconstruction identities relating a quaternion, its mirror
/// images and their conjugates (components from involutions, conjugate from
/// involutions, value from conjugate involutions, the -eta q eta definition,
/// and the component-times-unit form used by the layer derivations).
std::vector<IdentityCheck> involution_identity_suite(std::uint64_t seed,
                                                     std::size_t samples = 1000);

}  // namespace quatnn

#endif
