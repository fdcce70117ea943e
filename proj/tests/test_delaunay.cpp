#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "capstab/delaunay.hpp"

using namespace capstab;
using namespace capstab::delaunay;
using Catch::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

MeridianState state(double x1, double x2, double alpha) {
    MeridianState st;
    st.x1 = x1;
    st.x2 = x2;
    st.alpha = alpha;
    return st;
}
}  // namespace

TEST_CASE("ode right-hand side") {
    SECTION("cylinder equilibrium") {
        const OdeRhs r = ode_rhs(state(0, 0.5, 0), 1.0, 2);
        CHECK(r.dx1 == 1.0);
        CHECK(r.dx2 == 0.0);
        CHECK(r.dalpha == 0.0);
    }
    SECTION("minimal meridian at unit radius") {
        const OdeRhs r = ode_rhs(state(0, 1.0, 0), 0.0, 2);
        CHECK(r.dx1 == 1.0);
        CHECK(r.dx2 == 0.0);
        CHECK(r.dalpha == 1.0);
    }
    SECTION("catenary turning is always upward for |alpha| < pi/2") {
        for (double a : {-1.2, -0.4, 0.0, 0.7, 1.3})
            CHECK(ode_rhs(state(0, 0.5, a), 0.0, 2).dalpha >= 0.0);
    }
    SECTION("axis contact is rejected") {
        CHECK_THROWS_AS(ode_rhs(state(0, 0.0, 0), 1.0, 2), std::domain_error);
    }
}

TEST_CASE("force first integral values") {
    CHECK(force(state(0, 0.5, 0), 1.0, 2) == Approx(0.25));
    SECTION("any point of a centered sphere meridian carries zero force") {
        for (double t : {0.3, 1.0, 2.2}) {
            const MeridianState st = state(-std::cos(t), std::sin(t), 0.5 * kPi - t);
            CHECK(force(st, 1.0, 2) == Approx(0.0).margin(1e-15));
        }
    }
    SECTION("hyperplane meridian carries zero force") {
        CHECK(force(state(0.0, 0.7, 0.5 * kPi), 0.0, 2) == Approx(0.0).margin(1e-16));
    }
}

TEST_CASE("classification by (H, F)") {
    CHECK(classify(2, 1.0, 0.25) == DelaunayKind::Cylinder);
    CHECK(classify(2, 1.0, 0.1) == DelaunayKind::Unduloid);
    CHECK(classify(2, 1.0, -0.1) == DelaunayKind::Nodoid);
    CHECK(classify(2, 1.0, 0.0) == DelaunayKind::Sphere);
    CHECK(classify(2, 0.0, 0.3) == DelaunayKind::Catenoid);
    CHECK(classify(2, 0.0, 0.0) == DelaunayKind::Hyperplane);
    // orientation flip (H, F) -> (-H, -F) preserves the kind
    CHECK(classify(2, -1.0, -0.25) == DelaunayKind::Cylinder);
    CHECK(classify(2, -1.0, 0.1) == DelaunayKind::Nodoid);
    CHECK(classify(3, 2.0, cylinder_force(3, 2.0)) == DelaunayKind::Cylinder);
}

TEST_CASE("integration of the cylinder equilibrium") {
    const MeridianCurve c = integrate(2, 1.0, state(0, 0.5, 0), 1e-3, 2.0);
    REQUIRE(c.states.size() == 2001);
    CHECK(c.force_constant == Approx(0.25));
    for (const auto& st : c.states) {
        CHECK(st.x2 == Approx(0.5).margin(1e-14));
        CHECK(st.alpha == Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("trajectories satisfy the kinematic relations a posteriori") {
    // (x1)' = cos(alpha), (x2)' = sin(alpha), by central differencing
    const auto start = symmetric_start(2, 1.0, 0.1);
    const double h = 1e-3;
    const MeridianCurve c = integrate(2, 1.0, state(0, start.x2, start.alpha), h, 3.0);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < c.states.size(); ++i) {
        const double dx1 = (c.states[i + 1].x1 - c.states[i - 1].x1) / (2.0 * h);
        const double dx2 = (c.states[i + 1].x2 - c.states[i - 1].x2) / (2.0 * h);
        worst = std::max(worst, std::abs(dx1 - std::cos(c.states[i].alpha)));
        worst = std::max(worst, std::abs(dx2 - std::sin(c.states[i].alpha)));
    }
    CHECK(worst <= 20.0 * h * h);
}

TEST_CASE("arc-length layout: uniform steps with a partial last step") {
    const MeridianCurve c = integrate(2, 1.0, state(0, 0.5, 0), 1e-3, 0.0105);
    REQUIRE(c.states.size() == 12);  // 10 full steps + the 5e-4 remainder
    for (std::size_t i = 1; i + 1 < c.states.size(); ++i)
        CHECK(c.states[i].s - c.states[i - 1].s == Approx(1e-3).margin(1e-15));
    CHECK(c.states.back().s == Approx(0.0105).margin(1e-15));
}

TEST_CASE("catenary closed form") {
    // n = 2, H = 0: the meridian is x2 = F cosh((x1 - b)/F); start at the neck
    const double F = 0.3;
    const MeridianCurve c = integrate(2, 0.0, state(0, F, 0), 1e-3, 1.5);
    CHECK(c.force_drift() <= 1e-8);
    for (std::size_t i = 0; i < c.states.size(); i += 100) {
        const auto& st = c.states[i];
        CHECK(st.x2 == Approx(F * std::cosh(st.x1 / F)).margin(1e-10));
    }
}

TEST_CASE("unduloid oscillates between its two radii") {
    const double rlo = (1.0 - std::sqrt(0.6)) / 2.0;
    const double rhi = (1.0 + std::sqrt(0.6)) / 2.0;
    const MeridianCurve c = integrate(2, 1.0, state(0, rlo, 0), 1e-3, 12.0);
    double seen_lo = 1e9, seen_hi = 0.0;
    for (const auto& st : c.states) {
        CHECK(st.x2 >= rlo - 1e-9);
        CHECK(st.x2 <= rhi + 1e-9);
        seen_lo = std::min(seen_lo, st.x2);
        seen_hi = std::max(seen_hi, st.x2);
    }
    CHECK(seen_lo == Approx(rlo).margin(1e-6));
    CHECK(seen_hi == Approx(rhi).margin(1e-6));

    SECTION("radii at horizontal-tangent crossings alternate between two constants") {
        std::vector<double> radii;
        for (std::size_t i = 1; i < c.states.size(); ++i) {
            const double a0 = c.states[i - 1].alpha;
            const double a1 = c.states[i].alpha;
            if (a0 != 0.0 && a0 * a1 < 0.0) {
                const double w = a0 / (a0 - a1);
                radii.push_back((1.0 - w) * c.states[i - 1].x2 + w * c.states[i].x2);
            }
        }
        REQUIRE(radii.size() >= 4);
        for (std::size_t i = 2; i < radii.size(); ++i)
            CHECK(radii[i] == Approx(radii[i - 2]).margin(1e-6));
    }
}

TEST_CASE("force drift bound and fourth-order convergence") {
    const auto start = symmetric_start(2, 1.0, 0.1);
    auto drift_at = [&](double h) {
        return integrate(2, 1.0, state(0, start.x2, start.alpha), h, 10.0).force_drift();
    };
    const double d1 = drift_at(1e-3);
    const double d2 = drift_at(5e-4);
    CHECK(d1 <= 1e-8);
    CHECK(d1 / d2 >= 14.0);
    CHECK(d1 / d2 <= 18.0);
}

TEST_CASE("axis-touching trajectories are flagged") {
    // the unit circle meridian (H = 1, F = 0) reaches the axis at s = pi/2
    const MeridianCurve c = integrate(2, 1.0, state(0, 1.0, 0), 1e-3, 2.0);
    CHECK(c.axis_touching);
    CHECK(c.states.back().x2 < 2e-3);
}

TEST_CASE("symmetric starts") {
    SECTION("cylinder") {
        const auto st = symmetric_start(2, 1.0, 0.25);
        CHECK(st.x2 == Approx(0.5));
        CHECK(st.alpha == 0.0);
    }
    SECTION("unduloid neck is the smaller root") {
        const auto st = symmetric_start(2, 1.0, 0.1);
        CHECK(st.x2 == Approx((1.0 - std::sqrt(0.6)) / 2.0).margin(1e-11));
        CHECK(st.alpha == 0.0);
    }
    SECTION("nodoid starts at the inner loop radius with reversed tangent") {
        const auto st = symmetric_start(2, 1.0, -0.1);
        CHECK(st.x2 == Approx((-1.0 + std::sqrt(1.4)) / 2.0).margin(1e-11));
        CHECK(st.alpha == Approx(kPi));
    }
    SECTION("catenoid neck radius is F^{1/(n-1)}") {
        CHECK(symmetric_start(2, 0.0, 0.3).x2 == Approx(0.3).margin(1e-11));
        CHECK(symmetric_start(3, 0.0, 0.09).x2 == Approx(0.3).margin(1e-9));
    }
    SECTION("downward-force catenoid flips the tangent") {
        const auto st = symmetric_start(2, 0.0, -0.3);
        CHECK(st.x2 == Approx(0.3).margin(1e-11));
        CHECK(st.alpha == Approx(kPi));
    }
    SECTION("no start exists beyond the cylinder force") {
        CHECK_THROWS_AS(symmetric_start(2, 1.0, 0.3), construction_error);
    }
    SECTION("analytic kinds are rejected") {
        CHECK_THROWS_AS(symmetric_start(2, 1.0, 0.0), construction_error);
        CHECK_THROWS_AS(symmetric_start(2, 0.0, 0.0), construction_error);
    }
}

TEST_CASE("symmetric segments") {
    SECTION("cylinder extent matches the sphere intersection") {
        const MeridianCurve c = symmetric_segment(2, 1.0, 0.25, 1e-3);
        const double reach = std::sqrt(3.0) / 2.0;
        CHECK(c.states.front().x1 == Approx(-reach).margin(2e-3));
        CHECK(c.states.back().x1 == Approx(reach).margin(2e-3));
        CHECK(c.states.front().radius_sq() > 1.0);
        CHECK(c.states.back().radius_sq() > 1.0);
    }
    SECTION("mirror symmetry holds to 1e-10") {
        for (const auto& hf :
             {std::pair{1.0, 0.1}, {1.0, -0.1}, {0.0, 0.4}, {1.0, 0.25}}) {
            const MeridianCurve c = symmetric_segment(2, hf.first, hf.second, 1e-3);
            const auto& sts = c.states;
            std::size_t center = 0;
            for (std::size_t i = 0; i < sts.size(); ++i)
                if (std::abs(sts[i].s) < std::abs(sts[center].s)) center = i;
            CHECK(std::abs(sts[center].x1) < 1e-14);
            const std::size_t reach = std::min(center, sts.size() - 1 - center);
            for (std::size_t k = 1; k <= reach; ++k) {
                CHECK(sts[center + k].x2 == Approx(sts[center - k].x2).margin(1e-10));
                CHECK(sts[center + k].x1 == Approx(-sts[center - k].x1).margin(1e-10));
            }
        }
    }
    SECTION("classification is constant along the segment") {
        const MeridianCurve c = symmetric_segment(2, 1.0, -0.1, 1e-3);
        for (const auto& st : c.states)
            CHECK(classify(2, 1.0, force(st, 1.0, 2), 1e-6) == DelaunayKind::Nodoid);
    }
    SECTION("containment error when the arc budget is exhausted") {
        CHECK_THROWS_AS(symmetric_segment(2, 1.0, 0.1, 1e-3, 0.05), construction_error);
    }
}

TEST_CASE("csv export") {
    const MeridianCurve c = symmetric_segment(2, 1.0, 0.25, 1e-2);
    std::ostringstream os;
    write_csv(c, os);
    const std::string text = os.str();
    REQUIRE(text.rfind("s,x1,x2,alpha,force\n", 0) == 0);

    // every state appears as one row and values round-trip at 17 digits
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    std::size_t rows = 0;
    double s, x1, x2, alpha, f;
    while (std::getline(is, line)) {
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &s, &x1, &x2, &alpha,
                            &f) == 5);
        const auto& st = c.states[rows];
        CHECK(x2 == st.x2);
        CHECK(f == force(st, 1.0, 2));
        ++rows;
    }
    CHECK(rows == c.states.size());
}
