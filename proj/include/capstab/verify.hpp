#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "capstab/conformal.hpp"
#include "capstab/stability.hpp"
#include "capstab/surface.hpp"
#include "capstab/vec.hpp"

namespace capstab::verify {

// ---------------------------------------------------------------------------
// Residual checks on built surfaces. Each check computes both sides of an
// identity through distinct code paths; none reuses the closed form it tests.
// ---------------------------------------------------------------------------

namespace detail {

inline double one_sided_d1(const std::vector<double>& g, std::size_t i, double h,
                           bool forward) {
    // second-order one-sided first derivative
    if (forward) return (-3.0 * g[i] + 4.0 * g[i + 1] - g[i + 2]) / (2.0 * h);
    return (3.0 * g[i] - 4.0 * g[i - 1] + g[i - 2]) / (2.0 * h);
}

inline double grid_step(const Surface& surf) {
    const auto& sts = surf.meridian().states;
    return (sts.back().s - sts.front().s) / static_cast<double>(sts.size() - 1);
}

}  // namespace detail

/// |phi_nu - q phi| at the boundary rings, for the axis and transverse test
/// directions; phi_nu by one-sided differences along the meridian. q_scale
/// perturbs the Robin coefficient (negative-control hook).
inline double check_boundary_robin(const Surface& surf, double q_scale = 1.0) {
    if (surf.closed())
        throw not_applicable_error("check_boundary_robin: closed surface");
    const double q = q_scale * surf.robin_coefficient();
    const double h = detail::grid_step(surf);
    double res = 0.0;
    for (int mode = 0; mode <= 1; ++mode) {
        const std::vector<double> g = stability::phi_radial_profile(surf, mode);
        for (const auto& ring : surf.rings()) {
            const std::size_t i = ring.at_max_end ? g.size() - 1 : 0;
            const double gnu = ring.at_max_end ? detail::one_sided_d1(g, i, h, false)
                                               : -detail::one_sided_d1(g, i, h, true);
            res = std::max(res, std::abs(gnu - q * g[i]));
        }
    }
    return res;
}

/// Interior residual of (Δ + |σ|²) phi[xi] against its closed form
/// -2n <xi, N + Hx>, for one mode. Samples nearer than two grid points to an
/// end or with radius below `axis_margin` are excluded.
inline double check_jacobi_identity(const Surface& surf, int mode,
                                    double axis_margin = 0.05) {
    const int n = surf.dimension();
    const double H = surf.mean_curvature();
    const std::vector<double> g = stability::phi_radial_profile(surf, mode);
    const auto& sts = surf.meridian().states;
    const double h = detail::grid_step(surf);
    const double lambda = mode == 0 ? 0.0 : static_cast<double>(n - 1);

    double res = 0.0;
    for (std::size_t i = 2; i + 2 < sts.size(); ++i) {
        const auto& st = sts[i];
        if (st.x2 < axis_margin) continue;
        const double d1 = (g[i + 1] - g[i - 1]) / (2.0 * h);
        const double d2 = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h);
        const double lap = d2 + (n - 1) * (std::sin(st.alpha) / st.x2) * d1 -
                           lambda * g[i] / (st.x2 * st.x2);
        const double lhs = lap + surf.shape_at(i).sigma_sq * g[i];
        const double rhs =
            mode == 0 ? -2.0 * n * (std::sin(st.alpha) + H * st.x1)
                      : -2.0 * n * (-std::cos(st.alpha) + H * st.x2);
        res = std::max(res, std::abs(lhs - rhs));
    }
    return res;
}

struct OrderedResidual {
    double residual = 0.0;  ///< at the surface's own grid (the finest level)
    double order = 0.0;     ///< log2 slope per halving across the levels
    std::vector<double> levels;  ///< coarsest grid first
};

/// Jacobi-identity residual with its convergence order over `levels` grids
/// related by step halving. The finest grid is the surface's own; coarser
/// grids keep the truncation term above the eps/h^2 rounding floor of the
/// second differences.
inline OrderedResidual check_jacobi_identity_order(const Surface& surf, int mode,
                                                   int levels = 3) {
    OrderedResidual out;
    for (int l = levels - 1; l >= 0; --l) {
        const double scale = static_cast<double>(1 << l);
        const Surface s = l == 0 ? surf : surf.with_step_scale(scale);
        out.levels.push_back(check_jacobi_identity(s, mode));
    }
    out.residual = out.levels.back();
    out.order = std::log2(out.levels.front() / out.levels.back()) /
                static_cast<double>(levels - 1);
    return out;
}

/// |sigma(nu, X)| for the angular boundary tangents X, by finite-differencing
/// the normal field along the rings. Identically zero for surfaces of
/// revolution; this is a structural regression check.
inline double check_principal_direction(const Surface& surf, double delta = 1e-4) {
    if (surf.closed())
        throw not_applicable_error("check_principal_direction: closed surface");
    const int n = surf.dimension();
    double res = 0.0;
    for (const auto& ring : surf.rings()) {
        for (int k = 1; k < n; ++k) {
            auto omega_at = [&](double tau) {
                Vec w(n);
                w[0] = std::cos(tau);
                w[k] = std::sin(tau);
                return w;
            };
            const Vec Np = surf.embed_normal(ring.state, omega_at(delta));
            const Vec Nm = surf.embed_normal(ring.state, omega_at(-delta));
            // arc length along the ring: x2 * tau
            const Vec dN = (1.0 / (2.0 * delta * ring.state.x2)) * (Np - Nm);
            Vec nu(n + 1);
            nu[0] = ring.nu_ax;
            const Vec w0 = omega_at(0.0);
            for (int i = 0; i < n; ++i) nu[i + 1] = ring.nu_rad * w0[i];
            res = std::max(res, std::abs(dot(dN, nu)));
        }
    }
    return res;
}

/// Pushes a boundary ring and its neighborhood through the conformal flow and
/// recomputes the contact angle of the flowed configuration from
/// finite-difference tangents. Conformality makes theta(t) = theta(0); the
/// returned deviation is pure discretization error.
inline double check_conformal_flow_angle(const Surface& surf, const Direction& xi,
                                         double t) {
    if (surf.closed())
        throw not_applicable_error("check_conformal_flow_angle: closed surface");
    if (std::abs(t) > 0.1)
        throw std::domain_error("check_conformal_flow_angle: |t| <= 0.1 required");
    const int n = surf.dimension();
    const double h = detail::grid_step(surf);
    const auto& sts = surf.meridian().states;

    auto theta_at = [&](const Surface::Ring& ring, double tt) {
        Vec omega0 = Vec::basis(n, 0);
        const std::size_t iend = ring.at_max_end ? sts.size() - 1 : 0;
        auto flowed = [&](const Vec& p) {
            const Vec q = conformal::flow(xi, tt, p);
            if (norm(q) > 1.0 + 1e-12)
                throw precision_error("flow pushed a point outside the closed ball");
            return q;
        };
        // meridian one-sided tangent from three flowed samples
        const long dir = ring.at_max_end ? -1 : +1;
        const Vec F0 = flowed(surf.embed(sts[iend], omega0));
        const Vec F1 = flowed(surf.embed(sts[iend + dir], omega0));
        const Vec F2 = flowed(surf.embed(sts[iend + 2 * dir], omega0));
        std::vector<Vec> tangents;
        tangents.push_back((1.0 / (2.0 * h)) * (3.0 * F0 - 4.0 * F1 + F2));
        // angular central tangents
        const double dtau = std::max(h, 1e-5);
        for (int k = 1; k < n; ++k) {
            Vec wp(n), wm(n);
            wp[0] = std::cos(dtau);
            wp[k] = std::sin(dtau);
            wm[0] = std::cos(dtau);
            wm[k] = -std::sin(dtau);
            const Vec Ap = flowed(surf.embed(ring.state, wp));
            const Vec Am = flowed(surf.embed(ring.state, wm));
            tangents.push_back((1.0 / (2.0 * dtau)) * (Ap - Am));
        }
        // unit normal of the flowed surface: complement of the tangent span,
        // seeded by the unflowed normal for the sign
        for (std::size_t a = 0; a < tangents.size(); ++a) {
            for (std::size_t b = 0; b < a; ++b)
                tangents[a] -= dot(tangents[a], tangents[b]) * tangents[b];
            tangents[a] *= 1.0 / norm(tangents[a]);
        }
        Vec N = surf.embed_normal(ring.state, omega0);
        for (const Vec& tan : tangents) N -= dot(N, tan) * tan;
        N *= 1.0 / norm(N);
        const Vec P = flowed(surf.embed(ring.state, omega0));
        return std::acos(std::clamp(dot(N, P), -1.0, 1.0));
    };

    double dev = 0.0;
    for (const auto& ring : surf.rings())
        dev = std::max(dev, std::abs(theta_at(ring, t) - theta_at(ring, 0.0)));
    return dev;
}

/// Compares ∫ phi[e_A] da with -2(n+1) times the direct divergence-theorem
/// moment of T, per coordinate direction.
inline double check_centroid_consistency(const Surface& surf) {
    const int n = surf.dimension();
    const EnclosedBody body = surf.enclosed_body();
    const std::vector<double> mass = stability::phi_mass_vector(surf);
    double res = 0.0;
    for (int A = 0; A <= n; ++A) {
        const double direct_moment = body.centroid_direct[A] * body.volume;
        res = std::max(res, std::abs(mass[A] + 2.0 * (n + 1) * direct_moment));
    }
    return res;
}

/// For minimal surfaces meeting the sphere orthogonally: the normalized
/// first moment max_A |∫ x_A da| / area, which vanishes for free-boundary
/// minimal submanifolds.
inline double check_free_boundary_centroid(const Surface& surf) {
    if (surf.closed())
        throw not_applicable_error("check_free_boundary_centroid: closed surface");
    if (std::abs(surf.mean_curvature()) > 1e-10)
        throw not_applicable_error("check_free_boundary_centroid: surface is not minimal");
    const double pi = std::acos(-1.0);
    if (std::abs(surf.contact_angle() - 0.5 * pi) > 1e-8)
        throw not_applicable_error(
            "check_free_boundary_centroid: contact angle is not pi/2");
    if (surf.capillarity_residual() > 1e-8)
        throw not_applicable_error(
            "check_free_boundary_centroid: capillarity residual too large");
    const double axial = surf.integrate_mode0(
        [](std::size_t, const MeridianState& st) { return st.x1; });
    return std::abs(axial) / surf.area();
}

/// Residual block attached to stability reports; absent entries mean the
/// check does not apply to the surface.
struct ResidualReport {
    std::optional<double> robin;
    std::optional<double> jacobi_residual;
    std::optional<double> jacobi_order;
    std::optional<double> principal_direction;
    std::optional<double> flow_angle;
    std::optional<double> centroid_consistency;
    std::optional<double> free_boundary;
};

inline ResidualReport run_residuals(const Surface& surf, int levels = 3) {
    ResidualReport r;
    if (!surf.closed()) {
        r.robin = check_boundary_robin(surf);
        r.principal_direction = check_principal_direction(surf);
        const Direction axis = Direction::axis(surf.dimension() + 1, 0);
        const Direction trans = Direction::axis(surf.dimension() + 1, 1);
        r.flow_angle = std::max(check_conformal_flow_angle(surf, axis, 0.05),
                                check_conformal_flow_angle(surf, trans, 0.05));
    }
    if (surf.recipe()) {
        double worst_res = 0.0;
        std::optional<double> worst_order;
        for (int mode = 0; mode <= 1; ++mode) {
            const OrderedResidual o = check_jacobi_identity_order(surf, mode, levels);
            worst_res = std::max(worst_res, o.residual);
            // no order is measurable once the residual is pure roundoff
            if (o.residual > 1e-9 && (!worst_order || o.order < *worst_order))
                worst_order = o.order;
        }
        r.jacobi_residual = worst_res;
        r.jacobi_order = worst_order;
    }
    r.centroid_consistency = check_centroid_consistency(surf);
    try {
        r.free_boundary = check_free_boundary_centroid(surf);
    } catch (const not_applicable_error&) {
    }
    return r;
}

// ---------------------------------------------------------------------------
// Property suites over the closed-form conformal machinery and the meridian
// integrator, driven by a fixed-seed RNG so runs are reproducible.
// ---------------------------------------------------------------------------

namespace detail {

inline Vec random_in_ball(std::mt19937_64& rng, int dim, double max_norm) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Vec v(dim);
        for (auto& c : v) c = u(rng);
        const double r = norm(v);
        if (r <= 1.0 && r > 1e-3) return max_norm * v;
    }
}

inline Direction random_direction(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        Vec v(dim);
        for (auto& c : v) c = gauss(rng);
        if (norm(v) > 1e-6) return Direction::normalized(v);
    }
}

}  // namespace detail

struct ConformalSuiteResult {
    double norm_identity = 0.0;
    double tangency = 0.0;
    double flow_derivative_h = 0.0;       ///< residual at h = 1e-3
    double flow_derivative_h2 = 0.0;      ///< residual at h = 5e-4
    double flow_derivative_ratio = 0.0;   ///< expected near 4 (second order)
    double phi_forms = 0.0;
    double sphere_preservation = 0.0;
};

inline ConformalSuiteResult conformal_suite(int dim = 3, std::size_t samples = 1000000,
                                            std::uint64_t seed = 20240901) {
    std::mt19937_64 rng(seed);
    ConformalSuiteResult r;
    for (std::size_t k = 0; k < samples; ++k) {
        const Vec a = detail::random_in_ball(rng, dim, 0.95);
        const Vec x = detail::random_in_ball(rng, dim, 1.0);
        const double den = 1.0 - 2.0 * dot(a, x) + norm_sq(a) * norm_sq(x);
        const Vec y = conformal::mobius_map(a, x);
        const double lhs = 1.0 - norm_sq(y);
        const double rhs = (1.0 - norm_sq(a)) * (1.0 - norm_sq(x)) / den;
        r.norm_identity = std::max(r.norm_identity, std::abs(lhs - rhs));

        const Direction xi = detail::random_direction(rng, dim);
        const Direction sx = detail::random_direction(rng, dim);
        r.tangency = std::max(
            r.tangency, std::abs(dot(conformal::killing_field(xi, sx.vec()), sx.vec())));
    }
    std::mt19937_64 rng2(seed + 1);
    const std::size_t fd_samples = std::min<std::size_t>(samples, 2000);
    for (std::size_t k = 0; k < fd_samples; ++k) {
        const Direction xi = detail::random_direction(rng2, dim);
        const Vec x = detail::random_in_ball(rng2, dim, 1.0);
        const Vec y = conformal::killing_field(xi, x);
        r.flow_derivative_h = std::max(
            r.flow_derivative_h, norm(conformal::flow_derivative_fd(xi, x, 1e-3) - y));
        r.flow_derivative_h2 = std::max(
            r.flow_derivative_h2, norm(conformal::flow_derivative_fd(xi, x, 5e-4) - y));

        const Direction N = detail::random_direction(rng2, dim);
        r.phi_forms = std::max(
            r.phi_forms, std::abs(conformal::test_function(xi, x, N) -
                                  dot(conformal::killing_field(xi, x), N.vec())));

        const Direction sx = detail::random_direction(rng2, dim);
        std::uniform_real_distribution<double> ut(-0.9, 0.9);
        const Vec fx = conformal::flow(xi, ut(rng2), sx.vec());
        r.sphere_preservation =
            std::max(r.sphere_preservation, std::abs(norm(fx) - 1.0));
    }
    r.flow_derivative_ratio = r.flow_derivative_h / r.flow_derivative_h2;
    return r;
}

struct DelaunaySuiteResult {
    double drift = 0.0;        ///< force drift at step 1e-3, arc length 10
    double drift_ratio = 0.0;  ///< drift(h) / drift(h/2), near 16 (fourth order)
    double reversal = 0.0;     ///< mirror-symmetry residual of a symmetric segment
    double classify_consistency = 0.0;  ///< force variation along integrated curves
    double periodicity = 0.0;  ///< unduloid neck/bulge radii repeatability
};

inline DelaunaySuiteResult delaunay_suite() {
    DelaunaySuiteResult r;
    const auto start = delaunay::symmetric_start(2, 1.0, 0.1);
    MeridianState init;
    init.x2 = start.x2;
    init.alpha = start.alpha;

    auto drift_at = [&](double h) {
        return delaunay::integrate(2, 1.0, init, h, 10.0).force_drift();
    };
    r.drift = drift_at(1e-3);
    r.drift_ratio = r.drift / drift_at(5e-4);

    const MeridianCurve seg = delaunay::symmetric_segment(2, 1.0, 0.1, 1e-3);
    // mirror residual: match states at +s and -s
    {
        const auto& sts = seg.states;
        std::size_t center = 0;
        for (std::size_t i = 0; i < sts.size(); ++i)
            if (std::abs(sts[i].s) < std::abs(sts[center].s)) center = i;
        const std::size_t reach = std::min(center, sts.size() - 1 - center);
        for (std::size_t k = 1; k <= reach; ++k) {
            r.reversal = std::max(r.reversal,
                                  std::abs(sts[center + k].x2 - sts[center - k].x2));
            r.reversal = std::max(r.reversal,
                                  std::abs(sts[center + k].x1 + sts[center - k].x1));
        }
    }

    for (const auto& params : {std::pair{1.0, 0.1}, {1.0, -0.1}, {0.0, 0.3}}) {
        const auto st0 = delaunay::symmetric_start(2, params.first, params.second);
        MeridianState s0;
        s0.x2 = st0.x2;
        s0.alpha = st0.alpha;
        const MeridianCurve c = delaunay::integrate(2, params.first, s0, 1e-3, 3.0);
        const DelaunayKind k0 = delaunay::classify(2, params.first, c.force_constant);
        for (const auto& st : c.states) {
            const double f = delaunay::force(st, params.first, 2);
            if (delaunay::classify(2, params.first, f, 1e-6) != k0)
                r.classify_consistency = std::max(r.classify_consistency, 1.0);
            r.classify_consistency =
                std::max(r.classify_consistency, std::abs(f - c.force_constant));
        }
    }

    // unduloid periodicity: radii at alpha = 0 crossings alternate between
    // two constants
    {
        const MeridianCurve c = delaunay::integrate(2, 1.0, init, 1e-3, 12.0);
        std::vector<double> radii;
        for (std::size_t i = 1; i < c.states.size(); ++i) {
            const double a0 = c.states[i - 1].alpha;
            const double a1 = c.states[i].alpha;
            if (a0 == 0.0 || a0 * a1 >= 0.0) continue;
            const double w = a0 / (a0 - a1);
            radii.push_back((1.0 - w) * c.states[i - 1].x2 + w * c.states[i].x2);
        }
        for (std::size_t i = 2; i < radii.size(); ++i)
            r.periodicity = std::max(r.periodicity, std::abs(radii[i] - radii[i - 2]));
    }
    return r;
}

/// Root of theta(F) = pi/2 for the minimal meridian family: the catenoid
/// meeting the sphere orthogonally.
inline double critical_catenoid_force(int n, double step = 1e-3, double tol = 1e-8,
                                      double f_lo = 0.2, double f_hi = 0.8) {
    const double pi = std::acos(-1.0);
    auto theta_of = [&](double F) {
        return Surface::build(delaunay::symmetric_segment(n, 0.0, F, step), n)
                   .contact_angle() -
               0.5 * pi;
    };
    double glo = theta_of(f_lo);
    double ghi = theta_of(f_hi);
    if (glo * ghi > 0.0)
        throw construction_error("critical_catenoid_force: bracket does not straddle pi/2");
    double lo = f_lo, hi = f_hi, mid = 0.5 * (lo + hi), gm = 0.0;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        gm = theta_of(mid);
        if (std::abs(gm) <= 0.1 * tol) break;
        if (glo * gm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
        if (hi - lo < 1e-15) break;
    }
    return mid;
}

struct BatteryEntry {
    std::string name;
    Surface surface;
};

/// The built-in example battery: disk, cap, cylinder, unduloid, nodoid,
/// critical catenoid, centered closed sphere (n = 2 instances).
inline std::vector<BatteryEntry> standard_battery(double step = 1e-3) {
    std::vector<BatteryEntry> out;
    out.push_back({"disk", Surface::equatorial_disk(2, step)});
    out.push_back({"cap", Surface::spherical_cap(2, 1.0, 1.0, step)});
    out.push_back(
        {"cylinder", Surface::build(delaunay::symmetric_segment(2, 1.0, 0.25, step), 2)});
    out.push_back(
        {"unduloid", Surface::build(delaunay::symmetric_segment(2, 1.0, 0.1, step), 2)});
    out.push_back(
        {"nodoid", Surface::build(delaunay::symmetric_segment(2, 1.0, -0.1, step), 2)});
    const double fstar = critical_catenoid_force(2, step);
    out.push_back(
        {"catenoid", Surface::build(delaunay::symmetric_segment(2, 0.0, fstar, step), 2)});
    out.push_back({"sphere", Surface::closed_sphere(2, 0.5, step)});
    return out;
}

}  // namespace capstab::verify
