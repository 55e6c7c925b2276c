#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quatnn/rng.hpp"
#include "quatnn/verify.hpp"

using namespace quatnn;

namespace {
double dist(const Quaternion& a, const Quaternion& b) { return norm(a - b); }
}

TEST_CASE("naive product route at a pure imaginary point") {
    // At q = i: rule gives 4i - 2(-i) = 6i, direct gives 2i.
    const RouteSample s = naive_product_route(Quaternion::unit_i());
    CHECK(dist(s.via_rule, {0, 6, 0, 0}) <= 1e-15);
    CHECK(dist(s.direct, {0, 2, 0, 0}) <= 1e-15);
    CHECK(s.mismatch == doctest::Approx(4.0));
    CHECK_FALSE(s.degenerate);
}

TEST_CASE("real inputs do not separate the naive product routes") {
    const RouteSample s = naive_product_route({1.5, 0, 0, 0});
    CHECK(s.mismatch <= 1e-15);  // 4q - 2q* = 2q for real q
    CHECK(s.degenerate);
}

TEST_CASE("hr product route mismatch") {
    const RouteSample s = hr_product_route({0.5, 1.0, -0.75, 0.5});
    // rule: -q/2 + q*, direct: q*/2; difference is -(imaginary part of q).
    CHECK(s.mismatch == doctest::Approx(imag_norm(s.at)));
    CHECK_FALSE(s.degenerate);
}

TEST_CASE("ghr product route matches everywhere") {
    const RouteSample s = ghr_product_route({1, 2, 3, 4});
    CHECK(dist(s.direct, 0.5 * conj(Quaternion{1, 2, 3, 4})) <= 1e-15);
    CHECK(s.mismatch <= 1e-12);
}

TEST_CASE("failure demonstration verdicts") {
    const FailureReport report = demonstrate_rule_failures(42, 100);
    REQUIRE(report.routes.size() == 4);
    CHECK(report.routes[0].verdict() == "FAILED-AS-EXPECTED");
    CHECK(report.routes[1].verdict() == "FAILED-AS-EXPECTED");
    CHECK(report.routes[2].verdict() == "FAILED-AS-EXPECTED");
    CHECK(report.routes[3].verdict() == "PASSED");
    CHECK(report.all_as_expected());
    for (int r = 0; r < 3; ++r) {
        CHECK(report.routes[r].mismatch_min > 0.1);
    }
    CHECK(report.routes[3].mismatch_max <= 1e-12);

    const std::string text = report.to_text();
    CHECK(text.find("FAILED-AS-EXPECTED") != std::string::npos);
    CHECK(text.find("PASSED") != std::string::npos);
    const std::string kv = report.to_kv();
    CHECK(kv.find("route=") != std::string::npos);
    CHECK(kv.find("verdict=") != std::string::npos);
    CHECK(kv.find("mismatch_min=") != std::string::npos);
}

TEST_CASE("separation holds wherever the imaginary part is substantial") {
    quatnn::Rng rng(9001);
    std::size_t tested = 0;
    while (tested < 200) {
        const Quaternion q = rng.quaternion_box(-1.0, 1.0);
        if (imag_norm(q) < 0.5) continue;
        ++tested;
        CHECK(naive_product_route(q).mismatch > 0.1);
        CHECK(hr_product_route(q).mismatch > 0.1);
    }
}

TEST_CASE("involution identities hold to 1e-12 on 1000 samples") {
    const auto checks = involution_identity_suite(2718, 1000);
    CHECK(checks.size() >= 4);
    for (const IdentityCheck& c : checks) {
        CAPTURE(c.name);
        CHECK(c.samples == 1000);
        CHECK(c.max_abs_error <= 1e-12);
    }
}
