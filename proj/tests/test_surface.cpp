#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "capstab/delaunay.hpp"
#include "capstab/surface.hpp"

using namespace capstab;
using Catch::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

Surface cylinder(double step = 1e-3) {
    return Surface::build(delaunay::symmetric_segment(2, 1.0, 0.25, step), 2);
}
}  // namespace

TEST_CASE("cylinder closed forms") {
    const Surface s = cylinder();

    CHECK(s.kind() == DelaunayKind::Cylinder);
    CHECK(s.contact_angle() == Approx(2.0 * kPi / 3.0).margin(1e-10));
    CHECK(s.robin_coefficient() == Approx(2.0 / std::sqrt(3.0)).margin(1e-10));
    CHECK(s.area() == Approx(kPi * std::sqrt(3.0)).margin(1e-9));
    CHECK(s.capillarity_residual() <= 1e-8);

    REQUIRE(s.rings().size() == 2);
    CHECK(s.rings()[0].state.x1 == Approx(-std::sqrt(3.0) / 2.0).margin(1e-9));
    CHECK(s.rings()[1].state.x1 == Approx(std::sqrt(3.0) / 2.0).margin(1e-9));
    for (const auto& r : s.rings())
        CHECK(std::sqrt(r.state.radius_sq()) == Approx(1.0).margin(1e-10));

    const ShapeData sd = s.shape_data(0.0);
    CHECK(sd.kappa_m == Approx(0.0).margin(1e-12));
    CHECK(sd.kappa_p == Approx(2.0).margin(1e-12));
    CHECK(sd.sigma_sq == Approx(4.0).margin(1e-11));

    SECTION("wetted region is the pair of polar caps") {
        const WettedRegion w = s.wetted_region();
        CHECK(w.area == Approx(4.0 * kPi * (1.0 - std::sqrt(3.0) / 2.0)).margin(1e-9));
        CHECK(w.max_multiplicity == 1);
        CHECK(std::abs(w.first_moment[0]) < 1e-10);  // symmetric caps
        REQUIRE(w.bands.size() == 2);
        CHECK(w.bands.front().phi_lo == 0.0);
        CHECK(w.bands.back().phi_hi == Approx(kPi));
    }
    SECTION("enclosed body: volume by boundary integrals, centroid at 0") {
        const EnclosedBody b = s.enclosed_body();
        CHECK(b.volume == Approx(kPi * (4.0 / 3.0 - std::sqrt(3.0) / 2.0)).margin(1e-9));
        CHECK(norm(b.centroid) < 1e-10);
        CHECK(norm(b.centroid_direct) < 1e-10);
    }
    SECTION("points and normals at the symmetry plane") {
        const Vec omega{0.0, 1.0};
        const Vec p = s.point(0.0, omega);
        CHECK(p[0] == Approx(0.0).margin(1e-12));
        CHECK(p[1] == Approx(0.0).margin(1e-12));
        CHECK(p[2] == Approx(0.5).margin(1e-12));
        const Vec N = s.normal(0.0, omega);
        CHECK(N[0] == Approx(0.0).margin(1e-12));
        CHECK(N[2] == Approx(-1.0).margin(1e-12));  // toward the axis
    }
}

TEST_CASE("equatorial disk closed forms") {
    const Surface s = Surface::equatorial_disk(2);

    CHECK(s.kind() == DelaunayKind::Hyperplane);
    CHECK(s.contact_angle() == Approx(0.5 * kPi).margin(1e-13));
    CHECK(s.robin_coefficient() == Approx(1.0).margin(1e-13));
    CHECK(s.area() == Approx(kPi).margin(1e-12));
    CHECK(s.mean_curvature() == 0.0);
    CHECK(s.capillarity_residual() <= 1e-12);

    const ShapeData sd = s.shape_data(0.5);
    CHECK(sd.sigma_sq == 0.0);

    SECTION("weighted integrals: mode 0 and mode 1") {
        // ∫ (1 + rho^2) da = 3 pi / 2 on the unit disk
        const double v = s.integrate_mode0([](std::size_t, const MeridianState& st) {
            return 1.0 + st.radius_sq();
        });
        CHECK(v == Approx(1.5 * kPi).margin(1e-10));
        // product-grid identity ∫ (x^2 omega_1)^2 da = pi/4 (n = 2)
        const double m = s.integrate_mode1(
            [](std::size_t, const MeridianState& st) { return st.x2; },
            [](std::size_t, const MeridianState& st) { return st.x2; });
        CHECK(m == Approx(kPi / 4.0).margin(1e-10));
    }
    SECTION("wetted region is a hemisphere, body is the half ball") {
        const WettedRegion w = s.wetted_region();
        CHECK(w.area == Approx(2.0 * kPi).margin(1e-12));
        const EnclosedBody b = s.enclosed_body();
        CHECK(b.volume == Approx(2.0 * kPi / 3.0).margin(1e-10));
        CHECK(b.centroid[0] == Approx(3.0 / 8.0).margin(1e-9));
        CHECK(b.centroid_direct[0] == Approx(3.0 / 8.0).margin(1e-9));
        CHECK(std::abs(b.centroid[1]) == 0.0);
    }
    SECTION("point and normal") {
        const Vec omega{0.6, 0.8};
        const Vec p = s.point(0.5, omega);
        CHECK(p[0] == Approx(0.0).margin(1e-15));
        CHECK(p[1] == Approx(0.3).margin(1e-12));
        CHECK(p[2] == Approx(0.4).margin(1e-12));
        const Vec N = s.normal(0.5, omega);
        CHECK(N[0] == Approx(1.0).margin(1e-14));
        CHECK(std::abs(N[1]) < 1e-14);
    }
}

TEST_CASE("spherical caps") {
    SECTION("cap with R = 1 centered on the boundary sphere") {
        const Surface s = Surface::spherical_cap(2, 1.0, 1.0);
        CHECK(s.kind() == DelaunayKind::Sphere);
        CHECK(s.contact_angle() == Approx(2.0 * kPi / 3.0).margin(1e-12));
        CHECK(s.capillarity_residual() <= 1e-12);
        // spherical zone area 2 pi R^2 (1 - cos t0) with t0 = pi/3
        CHECK(s.area() == Approx(kPi).margin(1e-9));
        CHECK(s.wetted_region().area ==
              Approx(2.0 * kPi * (1.0 - 0.5)).margin(1e-9));  // cap above x1 = 1/2
        // T is the symmetric lens of two unit spheres a unit distance apart:
        // two caps of height 1/2, centroid midway between the centers
        const EnclosedBody b = s.enclosed_body();
        CHECK(b.volume == Approx(5.0 * kPi / 12.0).margin(1e-9));
        CHECK(b.centroid[0] == Approx(0.5).margin(1e-8));
        CHECK(b.centroid_direct[0] == Approx(0.5).margin(1e-8));
        // umbilical: |sigma|^2 - n H^2 = 0
        for (double frac : {0.25, 0.5, 0.75}) {
            const auto& sts = s.meridian().states;
            const ShapeData sd = s.shape_at(
                static_cast<std::size_t>(frac * static_cast<double>(sts.size() - 1)));
            CHECK(std::abs(sd.sigma_sq - 2.0 * 1.0) <= 1e-10);
            CHECK(sd.kappa_m == Approx(sd.kappa_p));
        }
    }
    SECTION("angle identity against the supporting hyperplane") {
        // theta and the cap's opening angle theta' (its contact angle with the
        // hyperplane of its boundary ring) satisfy
        //   1/sin(theta) + cot(theta)/R = cot(theta')/R.
        for (const auto& rc : {std::pair{0.8, 0.9}, {1.0, 1.0}, {0.5, 1.2}}) {
            const double R = rc.first, c = rc.second;
            const Surface s = Surface::spherical_cap(2, 1.0 / R, c);
            const double theta = s.contact_angle();
            const double t0 = std::acos((c * c - 1.0 + R * R) / (2.0 * c * R));
            const double lhs = 1.0 / std::sin(theta) + std::cos(theta) / std::sin(theta) / R;
            const double rhs = std::cos(t0) / std::sin(t0) / R;
            CHECK(lhs == Approx(rhs).margin(1e-10));
        }
    }
    SECTION("negative H flips the orientation") {
        const Surface plus = Surface::spherical_cap(2, 2.0, 1.0);
        const Surface minus = Surface::spherical_cap(2, -2.0, 1.0);
        CHECK(plus.contact_angle() + minus.contact_angle() == Approx(kPi).margin(1e-11));
        CHECK(minus.mean_curvature() == -2.0);
        CHECK(minus.capillarity_residual() <= 1e-11);
        // together the two wetted parts tile the sphere and the two bodies
        // partition the ball
        CHECK(plus.wetted_region().area + minus.wetted_region().area ==
              Approx(4.0 * kPi).margin(1e-9));
        CHECK(plus.enclosed_body().volume + minus.enclosed_body().volume ==
              Approx(4.0 * kPi / 3.0).margin(1e-9));
    }
    SECTION("orthogonal cap meets the sphere at a right angle") {
        const double R = 0.7;
        const Surface s = Surface::spherical_cap(2, 1.0 / R, std::sqrt(1.0 + R * R));
        CHECK(s.contact_angle() == Approx(0.5 * kPi).margin(1e-12));
    }
    SECTION("degenerate contact angles are rejected") {
        // nearly internally tangent sphere: theta -> pi
        CHECK_THROWS_AS(Surface::spherical_cap(2, 1.0 / 0.3, 0.7000001),
                        construction_error);
        // no intersection at all
        CHECK_THROWS_AS(Surface::spherical_cap(2, 1.0 / 0.3, 0.5), construction_error);
    }
}

TEST_CASE("closed centered sphere") {
    const Surface s = Surface::closed_sphere(2, 0.5);
    CHECK(s.closed());
    CHECK(s.rings().empty());
    CHECK(s.force_constant() == 0.0);
    CHECK(s.mean_curvature() == Approx(2.0));
    CHECK(s.area() == Approx(kPi).margin(1e-10));  // 4 pi (1/2)^2
    CHECK_THROWS_AS(s.contact_angle(), not_applicable_error);
    const EnclosedBody b = s.enclosed_body();
    CHECK(b.volume == Approx(kPi / 6.0).margin(1e-10));
    CHECK(norm(b.centroid) < 1e-12);
    CHECK(s.wetted_region().area == 0.0);
}

TEST_CASE("normal is orthogonal to the meridian tangent") {
    const Surface s = cylinder();
    const Vec omega{1.0, 0.0};
    const double h = 1e-5;
    for (double frac : {0.2, 0.5, 0.8}) {
        const auto& sts = s.meridian().states;
        const double sv = sts.front().s + frac * (sts.back().s - sts.front().s);
        const Vec t = (1.0 / (2.0 * h)) * (s.point(sv + h, omega) - s.point(sv - h, omega));
        CHECK(std::abs(dot(t, s.normal(sv, omega))) <= 1e-10);
        CHECK(norm(s.normal(sv, omega)) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("interpolation error shrinks at second order") {
    const Surface coarse =
        Surface::build(delaunay::symmetric_segment(2, 1.0, 0.1, 2e-3), 2);
    const Surface fine = coarse.refined();
    const Vec omega{1.0, 0.0};
    double err = 0.0;
    const double smax = std::min(coarse.meridian().states.back().s,
                                 fine.meridian().states.back().s);
    for (int k = -20; k <= 20; ++k) {
        const double sv = (smax * 0.95) * (k / 20.0) + coarse.step() * 0.5;
        if (std::abs(sv) > smax) continue;
        err = std::max(err, norm(coarse.point(sv, omega) - fine.point(sv, omega)));
    }
    CHECK(err <= 10.0 * coarse.step() * coarse.step());
}

TEST_CASE("orientation flip turns polar caps into a band") {
    // (H, F) and (-H, -F) describe the same unduloid with opposite normals;
    // their wetted regions partition the boundary sphere
    const Surface plus = Surface::build(delaunay::symmetric_segment(2, 1.0, 0.1, 1e-3), 2);
    const Surface minus =
        Surface::build(delaunay::symmetric_segment(2, -1.0, -0.1, 1e-3), 2);
    CHECK(minus.kind() == DelaunayKind::Unduloid);
    CHECK(minus.capillarity_residual() <= 1e-8);
    CHECK(plus.contact_angle() + minus.contact_angle() == Approx(kPi).margin(1e-8));

    const WettedRegion wp = plus.wetted_region();
    const WettedRegion wm = minus.wetted_region();
    REQUIRE(wp.bands.size() == 2);  // two polar caps
    REQUIRE(wm.bands.size() == 1);  // one equatorial band
    CHECK(wm.bands.front().phi_lo > 0.0);
    CHECK(wm.bands.front().phi_hi < kPi);
    CHECK(wp.area + wm.area == Approx(4.0 * kPi).margin(1e-8));

    // the two bodies partition the ball as well
    CHECK(plus.enclosed_body().volume + minus.enclosed_body().volume ==
          Approx(4.0 * kPi / 3.0).margin(1e-8));
}

TEST_CASE("nodoid surface: immersed but well-posed") {
    const Surface s = Surface::build(delaunay::symmetric_segment(2, 1.0, -0.1, 1e-3), 2);
    CHECK(s.kind() == DelaunayKind::Nodoid);
    CHECK(s.capillarity_residual() <= 1e-8);
    const WettedRegion w = s.wetted_region();
    CHECK(w.area > 0.0);
    CHECK(w.area < 4.0 * kPi);
    const EnclosedBody b = s.enclosed_body();
    CHECK(b.volume > 0.0);
    CHECK(norm(b.centroid) <= 1e-8);
    CHECK(norm(b.centroid_direct) <= 1e-8);
}

TEST_CASE("curvature sum and robin limits across the battery") {
    SECTION("n H = kappa_m + (n-1) kappa_p at every sample") {
        for (const auto& hf : {std::pair{1.0, 0.25}, {1.0, 0.1}, {1.0, -0.1}}) {
            const Surface s =
                Surface::build(delaunay::symmetric_segment(2, hf.first, hf.second, 1e-3), 2);
            for (std::size_t i = 0; i < s.sample_count(); ++i) {
                const ShapeData sd = s.shape_at(i);
                CHECK(std::abs(sd.kappa_m + sd.kappa_p - 2.0 * hf.first) <= 1e-10);
            }
        }
    }
    SECTION("q tends to 1 as theta tends to pi/2, whatever kappa_m is") {
        // the orthogonal catenoid has kappa_m != 0 at the ring but q = 1
        const double fstar = 0.46048508825;  // theta(F*) = pi/2
        const Surface cat =
            Surface::build(delaunay::symmetric_segment(2, 0.0, fstar, 1e-3), 2);
        CHECK(std::abs(cat.rings().front().kappa_m) > 0.1);
        CHECK(cat.robin_coefficient() == Approx(1.0).margin(1e-7));
    }
}

TEST_CASE("cylinder in dimension three") {
    const double H = 1.0;
    const double F = delaunay::cylinder_force(3, H);
    const Surface s = Surface::build(delaunay::symmetric_segment(3, H, F, 1e-3), 3);
    CHECK(s.kind() == DelaunayKind::Cylinder);
    CHECK(s.capillarity_residual() <= 1e-8);
    const double r = 2.0 / 3.0;
    // lateral area of the n = 3 cylinder: |S^2| r^2 * extent
    const double extent = 2.0 * std::sqrt(1.0 - r * r);
    CHECK(s.area() == Approx(4.0 * kPi * r * r * extent).margin(1e-8));
    const ShapeData sd = s.shape_data(0.0);
    CHECK(sd.kappa_m == Approx(0.0).margin(1e-12));
    CHECK(sd.kappa_p == Approx(1.0 / r).margin(1e-12));
    CHECK(norm(s.enclosed_body().centroid) <= 1e-10);
}

TEST_CASE("higher-dimensional builds stay consistent") {
    for (int n : {3, 4}) {
        const Surface cyl = Surface::build(
            delaunay::symmetric_segment(n, 1.0, delaunay::cylinder_force(n, 1.0), 2e-3),
            n);
        CHECK(cyl.capillarity_residual() <= 1e-8);
        const Surface und =
            Surface::build(delaunay::symmetric_segment(n, 1.0, 0.05, 2e-3), n);
        CHECK(und.kind() == DelaunayKind::Unduloid);
        CHECK(und.capillarity_residual() <= 1e-8);
        CHECK(norm(und.enclosed_body().centroid) <= 1e-8);
    }
}

TEST_CASE("non-separable integrands are rejected") {
    const Surface s = Surface::equatorial_disk(2);
    auto one = [](std::size_t, const MeridianState&) { return 1.0; };
    CHECK(s.integrate_scalar(one, 0) == Approx(kPi).margin(1e-10));
    CHECK_THROWS_AS(s.integrate_scalar(one, 2), std::invalid_argument);
    CHECK_THROWS_AS(s.integrate_scalar(one, -1), std::invalid_argument);
}

TEST_CASE("field-mass relation on the disk in closed form") {
    // ∫_M phi[axis] da = -3 pi/2 and -2(n+1) ∫_T x_axis dv has the same value
    const Surface s = Surface::equatorial_disk(2);
    const double mass = s.integrate_mode0([](std::size_t, const MeridianState& st) {
        return test_function_radial(st, 0);
    });
    CHECK(mass == Approx(-1.5 * kPi).margin(1e-9));
    const EnclosedBody b = s.enclosed_body();
    CHECK(-2.0 * 3.0 * b.centroid_direct[0] * b.volume == Approx(-1.5 * kPi).margin(1e-9));
}

TEST_CASE("build rejections and negative controls") {
    SECTION("asymmetric meridians are rejected") {
        delaunay::MeridianState init;
        init.x2 = 0.3;
        init.alpha = 0.5;
        const MeridianCurve c = delaunay::integrate(2, 1.0, init, 1e-3, 3.0);
        CHECK_THROWS_AS(Surface::build(c, 2), construction_error);
    }
    SECTION("meridians that stop short of the sphere are rejected") {
        const auto st = delaunay::symmetric_start(2, 1.0, 0.1);
        delaunay::MeridianState init;
        init.x2 = st.x2;
        init.alpha = st.alpha;
        const MeridianCurve c = delaunay::integrate(2, 1.0, init, 1e-3, 0.2);
        CHECK_THROWS_AS(Surface::build(c, 2), construction_error);
    }
    SECTION("mis-clipped meridian has a large capillarity residual") {
        // clip the cylinder at |X| = 0.99 instead of 1 and skip validation
        const double reach = std::sqrt(0.99 * 0.99 - 0.25);
        const long M = 400;
        MeridianCurve c;
        c.n = 2;
        c.mean_curvature = 1.0;
        c.force_constant = 0.25;
        c.step = 2.0 * reach / static_cast<double>(2 * M);
        for (long i = -M; i <= M; ++i) {
            delaunay::MeridianState st;
            st.s = c.step * static_cast<double>(i);
            st.x1 = st.s;
            st.x2 = 0.5;
            st.alpha = 0.0;
            c.states.push_back(st);
        }
        const Surface bad = Surface::assemble_unchecked(c, 2, DelaunayKind::Cylinder);
        CHECK(bad.capillarity_residual() > 1e-3);

        const Surface good = cylinder();
        CHECK(good.capillarity_residual() <= 1e-8);
    }
}
