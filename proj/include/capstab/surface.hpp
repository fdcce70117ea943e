#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "capstab/delaunay.hpp"
#include "capstab/vec.hpp"

namespace capstab {

using delaunay::DelaunayKind;
using delaunay::MeridianCurve;
using delaunay::MeridianState;

/// Principal curvatures at a meridian sample: kappa_m along the meridian
/// (multiplicity 1), kappa_p along the parallels (multiplicity n-1).
struct ShapeData {
    double kappa_m = 0.0;
    double kappa_p = 0.0;
    double sigma_sq = 0.0;
};

/// Region of the boundary sphere bounded by the contact rings, stored as
/// polar-angle bands with integer multiplicity (immersed surfaces may wet
/// part of the sphere more than once).
struct WettedRegion {
    struct Band {
        double phi_lo = 0.0;
        double phi_hi = 0.0;
        int multiplicity = 1;
    };
    std::vector<Band> bands;
    double area = 0.0;
    Vec first_moment;  ///< (n+1)-vector; only the axial component can be nonzero
    int max_multiplicity = 0;
};

/// Generalized body T with boundary M ∪ Ω, measured purely through boundary
/// integrals. `centroid` uses the conformal-field mass relation; the direct
/// divergence-theorem moments are kept alongside as a cross-check.
struct EnclosedBody {
    double volume = 0.0;
    Vec centroid;
    Vec centroid_direct;
};

/// Radial profile of the conformal test function phi[xi] on the meridian.
/// mode 0: xi along the axis; mode 1: radial factor of a transverse xi.
inline double test_function_radial(const MeridianState& st, int mode) {
    const double xx = st.radius_sq();
    const double sa = std::sin(st.alpha);
    const double ca = std::cos(st.alpha);
    const double xN = st.x1 * sa - st.x2 * ca;
    if (mode == 0) return -(1.0 + xx) * sa + 2.0 * xN * st.x1;
    if (mode == 1) return (1.0 + xx) * ca + 2.0 * xN * st.x2;
    throw std::invalid_argument("test_function_radial: mode must be 0 or 1");
}

namespace detail {

/// Antiderivative-based integral of sin^k over [a, b], by the standard
/// reduction I_k = [cos a sin^{k-1} a - cos b sin^{k-1} b]/k + (k-1)/k I_{k-2}.
inline double sin_power_integral(int k, double a, double b) {
    if (k == 0) return b - a;
    if (k == 1) return std::cos(a) - std::cos(b);
    const double head = (std::cos(a) * std::pow(std::sin(a), k - 1) -
                         std::cos(b) * std::pow(std::sin(b), k - 1)) /
                        k;
    return head + (k - 1.0) / k * sin_power_integral(k - 2, a, b);
}

}  // namespace detail

/// Capillary hypersurface of revolution inside the unit ball, assembled from
/// a meridian clipped to the sphere. Immutable after construction; all
/// queries are read-only.
class RotationalCapillarySurface {
public:
    struct Ring {
        MeridianState state;
        bool at_max_end = true;  ///< ring at the s-max end of the meridian
        double theta = 0.0;
        double polar_angle = 0.0;  ///< angle of the ring from the +axis pole
        double kappa_m = 0.0;      ///< sigma(nu, nu)
        double nu_ax = 0.0, nu_rad = 0.0;        ///< outward conormal of ∂M in M
        double nubar_ax = 0.0, nubar_rad = 0.0;  ///< outward conormal of ∂Ω in Ω
        bool omega_above = false;  ///< Ω occupies polar angles just above the ring
    };

    struct OdeRecipe {
        int n;
        double H, F, step, max_half_length;
    };
    struct DiskRecipe {
        int n;
        double step;
    };
    struct CapRecipe {
        int n;
        double H, center, step;
    };
    struct ClosedSphereRecipe {
        int n;
        double radius, step;
    };
    using Recipe = std::variant<OdeRecipe, DiskRecipe, CapRecipe, ClosedSphereRecipe>;

    // ---- factories -------------------------------------------------------

    /// Clips a symmetric meridian to the unit sphere (endpoint bisection to
    /// 1e-12, uniform regrid) and validates the capillary boundary structure.
    static RotationalCapillarySurface build(const MeridianCurve& meridian, int n) {
        if (meridian.n != n)
            throw std::invalid_argument("build: dimension mismatch with meridian");
        if (meridian.states.size() < 5)
            throw construction_error("build: meridian has too few states");
        if (meridian.states.front().radius_sq() < 1.0 ||
            meridian.states.back().radius_sq() < 1.0)
            throw construction_error("build: meridian endpoints must reach |X| >= 1");
        bool symmetric = false;
        for (const auto& st : meridian.states)
            if (std::abs(st.x1) <= 1e-8 && std::abs(std::sin(st.alpha)) <= 1e-8)
                symmetric = true;
        if (!symmetric)
            throw construction_error("build: meridian lacks a symmetric state at x1 = 0");
        return from_ode_recipe(
            OdeRecipe{n, meridian.mean_curvature, meridian.force_constant, meridian.step,
                      meridian_half_budget(meridian)},
            /*validate=*/true);
    }

    /// Flat disk {axis = 0} of radius 1, outward normal +axis. The analytic
    /// Hyperplane kind (H = 0, F = 0).
    static RotationalCapillarySurface equatorial_disk(int n, double step = 1e-3) {
        if (n < 2) throw std::invalid_argument("equatorial_disk: n >= 2 required");
        DiskRecipe rec{n, step};
        return from_disk_recipe(rec, true);
    }

    /// Spherical cap of mean curvature H (radius 1/|H|) centered at
    /// `center` > 0 on the axis; H > 0 points the normal toward the center.
    /// The analytic Sphere kind (F = 0).
    static RotationalCapillarySurface spherical_cap(int n, double H, double center,
                                                    double step = 1e-3) {
        if (n < 2) throw std::invalid_argument("spherical_cap: n >= 2 required");
        if (H == 0.0) throw std::invalid_argument("spherical_cap: H must be nonzero");
        if (!(center > 0.0))
            throw std::invalid_argument("spherical_cap: center must be positive");
        const double R = 1.0 / std::abs(H);
        if (!(std::abs(center - R) < 1.0 && center + R > 1.0))
            throw construction_error(
                "spherical_cap: sphere does not cross the unit sphere");
        CapRecipe rec{n, H, center, step};
        return from_cap_recipe(rec, true);
    }

    /// Closed round sphere of the given radius centered at the origin, inward
    /// normal. The equality case of the trace bound; no boundary.
    static RotationalCapillarySurface closed_sphere(int n, double radius,
                                                    double step = 1e-3) {
        if (n < 2) throw std::invalid_argument("closed_sphere: n >= 2 required");
        if (!(radius > 0.0 && radius < 1.0))
            throw std::invalid_argument("closed_sphere: radius must lie in (0,1)");
        ClosedSphereRecipe rec{n, radius, step};
        return from_closed_recipe(rec, true);
    }

    /// Low-level assembly that skips the capillary validations. Intended for
    /// tests and negative controls; build() is the checked path. Ends whose
    /// radius is within 5% of the sphere are treated as rings.
    static RotationalCapillarySurface assemble_unchecked(MeridianCurve meridian, int n,
                                                         DelaunayKind kind,
                                                         bool closed = false) {
        bool front_ring = false, back_ring = false;
        if (!closed && !meridian.states.empty()) {
            front_ring = std::abs(std::sqrt(meridian.states.front().radius_sq()) - 1.0) < 5e-2;
            back_ring = std::abs(std::sqrt(meridian.states.back().radius_sq()) - 1.0) < 5e-2;
        }
        return finish(std::move(meridian), n, kind, closed, std::nullopt,
                      /*validate=*/false, front_ring, back_ring);
    }

    // ---- basic queries ---------------------------------------------------

    int dimension() const { return n_; }
    DelaunayKind kind() const { return kind_; }
    bool closed() const { return closed_; }
    double mean_curvature() const { return meridian_.mean_curvature; }
    double force_constant() const { return meridian_.force_constant; }
    double step() const { return meridian_.step; }
    const MeridianCurve& meridian() const { return meridian_; }
    const std::vector<Ring>& rings() const { return rings_; }
    std::size_t sample_count() const { return meridian_.states.size(); }
    const std::optional<Recipe>& recipe() const { return recipe_; }

    double contact_angle() const {
        if (closed_) throw not_applicable_error("contact_angle: closed surface");
        return theta_;
    }

    /// Robin coefficient 1/sin(theta) + cot(theta) * sigma(nu, nu).
    double robin_coefficient() const {
        if (closed_) throw not_applicable_error("robin_coefficient: closed surface");
        const double th = theta_;
        return 1.0 / std::sin(th) + std::cos(th) / std::sin(th) * rings_.front().kappa_m;
    }

    /// Rebuilds the same surface with the integration step halved.
    RotationalCapillarySurface refined() const {
        if (!recipe_)
            throw not_applicable_error("refined: surface has no construction recipe");
        return with_step_scale(0.5);
    }

    RotationalCapillarySurface with_step_scale(double scale) const {
        if (!recipe_)
            throw not_applicable_error("with_step_scale: surface has no recipe");
        Recipe r = *recipe_;
        if (auto* o = std::get_if<OdeRecipe>(&r)) {
            o->step *= scale;
            return from_ode_recipe(*o, true);
        }
        if (auto* d = std::get_if<DiskRecipe>(&r)) {
            d->step *= scale;
            return from_disk_recipe(*d, true);
        }
        if (auto* c = std::get_if<CapRecipe>(&r)) {
            c->step *= scale;
            return from_cap_recipe(*c, true);
        }
        auto s = std::get<ClosedSphereRecipe>(r);
        s.step *= scale;
        return from_closed_recipe(s, true);
    }

    // ---- pointwise geometry ----------------------------------------------

    /// Point X = (x1(s), x2(s) * omega), omega a unit vector in R^n; linear
    /// interpolation between meridian samples.
    Vec point(double s, const Vec& omega) const {
        const MeridianState st = state_at(s);
        return embed(st, omega);
    }

    /// Unit normal N = (sin(alpha), -cos(alpha) * omega).
    Vec normal(double s, const Vec& omega) const {
        const MeridianState st = state_at(s);
        return embed_normal(st, omega);
    }

    Vec embed(const MeridianState& st, const Vec& omega) const {
        check_omega(omega);
        Vec p(n_ + 1);
        p[0] = st.x1;
        for (int i = 0; i < n_; ++i) p[i + 1] = st.x2 * omega[i];
        return p;
    }

    Vec embed_normal(const MeridianState& st, const Vec& omega) const {
        check_omega(omega);
        Vec p(n_ + 1);
        p[0] = std::sin(st.alpha);
        for (int i = 0; i < n_; ++i) p[i + 1] = -std::cos(st.alpha) * omega[i];
        return p;
    }

    ShapeData shape_at(std::size_t i) const { return shape_of(meridian_.states[i]); }

    ShapeData shape_data(double s) const { return shape_of(state_at(s)); }

    ShapeData shape_of(const MeridianState& st) const {
        ShapeData sd;
        switch (kind_) {
            case DelaunayKind::Hyperplane:
                sd.kappa_m = sd.kappa_p = 0.0;
                break;
            case DelaunayKind::Sphere:
                sd.kappa_m = sd.kappa_p = meridian_.mean_curvature;
                break;
            default: {
                const auto rhs = delaunay::ode_rhs(st, meridian_.mean_curvature, n_);
                sd.kappa_m = -rhs.dalpha;
                sd.kappa_p = std::cos(st.alpha) / st.x2;
            }
        }
        sd.sigma_sq = sd.kappa_m * sd.kappa_m + (n_ - 1) * sd.kappa_p * sd.kappa_p;
        return sd;
    }

    MeridianState state_at(double s) const {
        const auto& sts = meridian_.states;
        const double s0 = sts.front().s;
        const double sN = sts.back().s;
        if (s < s0 - 1e-12 || s > sN + 1e-12)
            throw std::domain_error("state_at: arc length out of range");
        s = std::clamp(s, s0, sN);
        const double h = (sN - s0) / static_cast<double>(sts.size() - 1);
        std::size_t i = std::min(sts.size() - 2,
                                 static_cast<std::size_t>(std::max(0.0, (s - s0) / h)));
        const MeridianState& a = sts[i];
        const MeridianState& b = sts[i + 1];
        const double w = (s - a.s) / (b.s - a.s);
        MeridianState out;
        out.s = s;
        out.x1 = (1.0 - w) * a.x1 + w * b.x1;
        out.x2 = (1.0 - w) * a.x2 + w * b.x2;
        out.alpha = (1.0 - w) * a.alpha + w * b.alpha;
        return out;
    }

    // ---- quadrature --------------------------------------------------------
    //
    // Area element da = (x2)^{n-1} ds dω. Rotationally invariant integrands
    // (mode 0) carry the full measure of S^{n-1}; products of two first-order
    // angular factors (mode 1) carry |S^{n-1}|/n from ∫ ω_i ω_j dω.

    template <class F>
    double integrate_mode0(F&& g) const {
        double acc = 0.0;
        const auto& sts = meridian_.states;
        for (std::size_t i = 0; i < sts.size(); ++i)
            acc += weights_[i] * g(i, sts[i]) * std::pow(sts[i].x2, n_ - 1);
        return sphere_measure(n_ - 1) * acc;
    }

    template <class F, class G>
    double integrate_mode1(F&& g1, G&& g2) const {
        double acc = 0.0;
        const auto& sts = meridian_.states;
        for (std::size_t i = 0; i < sts.size(); ++i)
            acc += weights_[i] * g1(i, sts[i]) * g2(i, sts[i]) *
                   std::pow(sts[i].x2, n_ - 1);
        return sphere_measure(n_ - 1) / n_ * acc;
    }

    /// Mode-dispatching entry point; modes other than 0/1 are not separable
    /// on a surface of revolution and are rejected.
    template <class F>
    double integrate_scalar(F&& g, int mode) const {
        if (mode == 0) return integrate_mode0(std::forward<F>(g));
        if (mode == 1)
            return integrate_mode1(g, [](std::size_t, const MeridianState&) { return 1.0; });
        throw std::invalid_argument("integrate_scalar: only modes 0 and 1 are separable");
    }

    double area() const {
        return integrate_mode0([](std::size_t, const MeridianState&) { return 1.0; });
    }

    /// Measure of one boundary ring (an S^{n-1} of radius x2).
    double ring_measure(const Ring& r) const {
        return sphere_measure(n_ - 1) * std::pow(r.state.x2, n_ - 1);
    }

    // ---- wetted region and enclosed body ----------------------------------

    WettedRegion wetted_region() const {
        WettedRegion w;
        w.first_moment = Vec(n_ + 1);
        if (closed_) return w;

        // multiplicity function on (0, pi): jumps +1 crossing a ring that
        // opens upward, -1 crossing one that closes.
        std::vector<std::pair<double, int>> events;
        for (const auto& r : rings_)
            events.emplace_back(r.polar_angle, r.omega_above ? +1 : -1);
        std::sort(events.begin(), events.end());

        std::vector<double> cuts{0.0};
        for (auto& e : events) cuts.push_back(e.first);
        cuts.push_back(std::acos(-1.0));

        std::vector<int> mult(cuts.size() - 1, 0);
        int running = 0, low = 0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (k > 0) running += events[k - 1].second;
            mult[k] = running;
            low = std::min(low, running);
        }
        for (auto& m : mult) m -= low;

        const double Sm = sphere_measure(n_ - 1);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (mult[k] == 0) continue;
            WettedRegion::Band band{cuts[k], cuts[k + 1], mult[k]};
            w.bands.push_back(band);
            w.area += mult[k] * Sm *
                      detail::sin_power_integral(n_ - 1, band.phi_lo, band.phi_hi);
            // axial moment: ∫ cos φ sin^{n-1} φ dφ = [sin^n φ / n]
            w.first_moment[0] +=
                mult[k] * Sm *
                (std::pow(std::sin(band.phi_hi), n_) - std::pow(std::sin(band.phi_lo), n_)) /
                n_;
            w.max_multiplicity = std::max(w.max_multiplicity, mult[k]);
        }
        return w;
    }

    EnclosedBody enclosed_body() const {
        const WettedRegion w = wetted_region();
        auto xN = [](const MeridianState& st) {
            return st.x1 * std::sin(st.alpha) - st.x2 * std::cos(st.alpha);
        };
        // outward normal of T is -N on M and x on Ω
        const double flux = integrate_mode0(
            [&](std::size_t, const MeridianState& st) { return -xN(st); });
        EnclosedBody body;
        body.volume = (flux + w.area) / (n_ + 1);
        if (!(body.volume > 0.0))
            throw construction_error(
                "enclosed_body: nonpositive volume; normal convention inconsistent with the wetted side");

        body.centroid = Vec(n_ + 1);
        body.centroid_direct = Vec(n_ + 1);
        // field-mass route: ∫_T x_A dv = -(1/(2(n+1))) ∫_M phi[e_A] da;
        // transverse components vanish by the angular integrals.
        const double mass_axial = integrate_mode0([](std::size_t, const MeridianState& st) {
            return test_function_radial(st, 0);
        });
        body.centroid[0] = -mass_axial / (2.0 * (n_ + 1)) / body.volume;
        // direct route: div(x_A x) = (n+2) x_A over ∂T = M ∪ Ω
        const double m_direct =
            (integrate_mode0([&](std::size_t, const MeridianState& st) {
                 return st.x1 * (-xN(st));
             }) +
             w.first_moment[0]) /
            (n_ + 2);
        body.centroid_direct[0] = m_direct / body.volume;
        return body;
    }

    /// Residual of the capillary boundary condition nu = cos(theta) nubar +
    /// sin(theta) x at the rings, plus the largest deviation of the mean
    /// curvature recovered from the force along the meridian.
    double capillarity_residual() const {
        double res = 0.0;
        for (const auto& r : rings_) {
            const double ax = r.nu_ax - std::cos(r.theta) * r.nubar_ax -
                              std::sin(r.theta) * r.state.x1;
            const double rad = r.nu_rad - std::cos(r.theta) * r.nubar_rad -
                               std::sin(r.theta) * r.state.x2;
            res = std::max(res, std::hypot(ax, rad));
        }
        const double H = meridian_.mean_curvature;
        const double F = meridian_.force_constant;
        for (const auto& st : meridian_.states) {
            if (st.x2 < 1e-9) continue;  // axis samples of analytic kinds
            const double Hemp =
                (std::pow(st.x2, n_ - 1) * std::cos(st.alpha) - F) / std::pow(st.x2, n_);
            res = std::max(res, std::abs(Hemp - H));
        }
        return res;
    }

    const std::vector<double>& quadrature_weights() const { return weights_; }

private:
    RotationalCapillarySurface() = default;

    static double meridian_half_budget(const MeridianCurve& m) {
        const double span = m.states.back().s - m.states.front().s;
        return std::max(1.0, span);
    }

    void check_omega(const Vec& omega) const {
        if (static_cast<int>(omega.size()) != n_)
            throw std::invalid_argument("omega must lie in R^n");
        if (std::abs(norm(omega) - 1.0) > 1e-9)
            throw std::invalid_argument("omega must be a unit vector");
    }

    // ---- construction helpers ---------------------------------------------

    static RotationalCapillarySurface from_ode_recipe(const OdeRecipe& rec, bool validate) {
        const auto start = delaunay::symmetric_start(rec.n, rec.H, rec.F);
        MeridianState center;
        center.x2 = start.x2;
        center.alpha = start.alpha;

        // half arc length S to the sphere, self-consistently with the final
        // uniform grid: rescan at the adjusted step until stable.
        double S = clip_half_length(rec, center, rec.step);
        long M = 0;
        double h = rec.step;
        for (int round = 0; round < 3; ++round) {
            M = std::max<long>(4, std::lround(S / rec.step));
            h = S / static_cast<double>(M);
            S = clip_half_length(rec, center, h);
        }
        M = std::max<long>(4, std::lround(S / rec.step));
        h = S / static_cast<double>(M);

        MeridianCurve grid;
        grid.n = rec.n;
        grid.mean_curvature = rec.H;
        grid.force_constant = delaunay::force(center, rec.H, rec.n);
        grid.step = h;
        grid.states.resize(2 * M + 1);
        grid.states[M] = center;
        MeridianState st = center;
        for (long i = 1; i <= M; ++i) {
            st = delaunay::rk4_step(st, h, rec.H, rec.n);
            grid.states[M + i] = st;
        }
        st = center;
        for (long i = 1; i <= M; ++i) {
            st = delaunay::rk4_step(st, -h, rec.H, rec.n);
            grid.states[M - i] = st;
        }

        return finish(std::move(grid), rec.n, delaunay::classify(rec.n, rec.H, rec.F),
                      /*closed=*/false, Recipe(rec), validate, /*front_ring=*/true,
                      /*back_ring=*/true);
    }

    static double clip_half_length(const OdeRecipe& rec, const MeridianState& center,
                                   double h) {
        MeridianState st = center;
        const long cap = static_cast<long>(std::ceil(rec.max_half_length / h)) + 1;
        for (long i = 0; i < cap; ++i) {
            const MeridianState nxt = delaunay::rk4_step(st, h, rec.H, rec.n);
            if (nxt.x2 <= 1e-6)
                throw construction_error("build: trajectory touched the axis");
            if (nxt.radius_sq() > 1.0) {
                double lo = 0.0, hi = h;
                for (int b = 0; b < 100 && (hi - lo) > 1e-14; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    if (delaunay::rk4_step(st, mid, rec.H, rec.n).radius_sq() > 1.0)
                        hi = mid;
                    else
                        lo = mid;
                }
                return st.s + 0.5 * (lo + hi);
            }
            st = nxt;
        }
        throw construction_error(
            "build: curve stayed inside the unit ball over the arc-length budget");
    }

    static RotationalCapillarySurface from_disk_recipe(const DiskRecipe& rec,
                                                       bool validate) {
        long M = std::max<long>(4, std::lround(1.0 / rec.step));
        if (M % 2) ++M;
        MeridianCurve grid;
        grid.n = rec.n;
        grid.mean_curvature = 0.0;
        grid.force_constant = 0.0;
        grid.step = 1.0 / static_cast<double>(M);
        grid.states.resize(M + 1);
        const double pi = std::acos(-1.0);
        for (long i = 0; i <= M; ++i) {
            MeridianState st;
            st.s = grid.step * static_cast<double>(i);
            st.x1 = 0.0;
            st.x2 = st.s;
            st.alpha = 0.5 * pi;
            grid.states[i] = st;
        }
        return finish(std::move(grid), rec.n, DelaunayKind::Hyperplane, false,
                      Recipe(rec), validate, /*front_ring=*/false, /*back_ring=*/true);
    }

    static RotationalCapillarySurface from_cap_recipe(const CapRecipe& rec,
                                                      bool validate) {
        const double R = 1.0 / std::abs(rec.H);
        const double c = rec.center;
        const double cos_t0 = (c * c - 1.0 + R * R) / (2.0 * c * R);
        const double t0 = std::acos(std::clamp(cos_t0, -1.0, 1.0));
        const double pi = std::acos(-1.0);

        long M = std::max<long>(4, std::lround(R * t0 / rec.step));
        if (M % 2) ++M;
        const double dt = t0 / static_cast<double>(M);

        MeridianCurve grid;
        grid.n = rec.n;
        grid.mean_curvature = rec.H;
        grid.force_constant = 0.0;
        grid.step = R * dt;
        grid.states.resize(M + 1);
        for (long i = 0; i <= M; ++i) {
            MeridianState st;
            if (rec.H > 0) {
                // pole to ring, normal toward the center
                const double t = dt * static_cast<double>(i);
                st.s = R * t;
                st.x1 = c - R * std::cos(t);
                st.x2 = R * std::sin(t);
                st.alpha = 0.5 * pi - t;
            } else {
                // ring to pole, normal away from the center
                const double t = t0 - dt * static_cast<double>(i);
                st.s = R * (t0 - t);
                st.x1 = c - R * std::cos(t);
                st.x2 = R * std::sin(t);
                st.alpha = -0.5 * pi - t;
            }
            grid.states[i] = st;
        }
        const bool ring_at_back = rec.H > 0;
        return finish(std::move(grid), rec.n, DelaunayKind::Sphere, false, Recipe(rec),
                      validate, !ring_at_back, ring_at_back);
    }

    static RotationalCapillarySurface from_closed_recipe(const ClosedSphereRecipe& rec,
                                                         bool validate) {
        const double pi = std::acos(-1.0);
        long M = std::max<long>(8, std::lround(pi * rec.radius / rec.step));
        if (M % 2) ++M;
        const double dt = pi / static_cast<double>(M);
        MeridianCurve grid;
        grid.n = rec.n;
        grid.mean_curvature = 1.0 / rec.radius;
        grid.force_constant = 0.0;
        grid.step = rec.radius * dt;
        grid.states.resize(M + 1);
        for (long i = 0; i <= M; ++i) {
            const double t = dt * static_cast<double>(i);
            MeridianState st;
            st.s = rec.radius * t;
            st.x1 = -rec.radius * std::cos(t);
            st.x2 = rec.radius * std::sin(t);
            st.alpha = 0.5 * pi - t;
            grid.states[i] = st;
        }
        return finish(std::move(grid), rec.n, DelaunayKind::Sphere, /*closed=*/true,
                      Recipe(rec), validate, false, false);
    }

    static RotationalCapillarySurface finish(MeridianCurve meridian, int n,
                                             DelaunayKind kind, bool closed,
                                             std::optional<Recipe> recipe, bool validate,
                                             bool front_ring, bool back_ring) {
        RotationalCapillarySurface surf;
        surf.n_ = n;
        surf.kind_ = kind;
        surf.closed_ = closed;
        surf.meridian_ = std::move(meridian);
        surf.recipe_ = std::move(recipe);
        surf.build_weights();

        if (!closed) {
            const auto& sts = surf.meridian_.states;
            if (front_ring) surf.rings_.push_back(surf.make_ring(sts.front(), false));
            if (back_ring) surf.rings_.push_back(surf.make_ring(sts.back(), true));
            if (surf.rings_.empty())
                throw construction_error("surface with boundary has no contact ring");
        }

        if (validate) surf.validate();

        if (!closed) surf.theta_ = surf.rings_.front().theta;
        return surf;
    }

    Ring make_ring(const MeridianState& st, bool at_max_end) const {
        Ring r;
        r.state = st;
        r.at_max_end = at_max_end;
        const double sgn = at_max_end ? 1.0 : -1.0;
        r.nu_ax = sgn * std::cos(st.alpha);
        r.nu_rad = sgn * std::sin(st.alpha);
        const double N_ax = std::sin(st.alpha);
        const double N_rad = -std::cos(st.alpha);

        const double sin_th = r.nu_ax * st.x1 + r.nu_rad * st.x2;  // <nu, x>
        const double cos_th = N_ax * st.x1 + N_rad * st.x2;        // <N, x>
        if (!(sin_th > 0.0))
            throw construction_error(
                "contact angle: <nu, x> <= 0; conormal/normal orientation inconsistent");
        r.theta = std::atan2(sin_th, cos_th);

        r.nubar_ax = -std::sin(r.theta) * N_ax + std::cos(r.theta) * r.nu_ax;
        r.nubar_rad = -std::sin(r.theta) * N_rad + std::cos(r.theta) * r.nu_rad;

        r.polar_angle = std::atan2(st.x2, st.x1);
        // polar tangent toward increasing angle: (-sin φ, cos φ)
        const double side = -r.nubar_ax * std::sin(r.polar_angle) +
                            r.nubar_rad * std::cos(r.polar_angle);
        if (std::abs(std::abs(side) - 1.0) > 1e-6)
            throw construction_error(
                "contact angle: Ω conormal is not tangent to the sphere at the ring");
        r.omega_above = side < 0.0;  // nubar points toward smaller φ => Ω above

        r.kappa_m = shape_of(st).kappa_m;
        return r;
    }

    void build_weights() {
        const auto& sts = meridian_.states;
        const std::size_t m = sts.size() - 1;  // interval count, even by construction
        if (m % 2 != 0)
            throw std::logic_error("quadrature grid must have an even interval count");
        const double h = (sts.back().s - sts.front().s) / static_cast<double>(m);
        weights_.assign(sts.size(), 0.0);
        for (std::size_t i = 0; i + 2 <= m; i += 2) {
            weights_[i] += h / 3.0;
            weights_[i + 1] += 4.0 * h / 3.0;
            weights_[i + 2] += h / 3.0;
        }
    }

    void validate() const {
        const auto& sts = meridian_.states;
        if (!closed_) {
            for (const auto& r : rings_)
                if (std::abs(std::sqrt(r.state.radius_sq()) - 1.0) > 1e-10)
                    throw construction_error("build: ring is not on the unit sphere");
            for (std::size_t i = 1; i + 1 < sts.size(); ++i)
                if (sts[i].radius_sq() > 1.0 + 1e-12)
                    throw construction_error("build: interior sample outside the ball");
            if (rings_.size() == 2) {
                const double mismatch = std::abs(rings_[0].theta - rings_[1].theta);
                if (mismatch > 1e-6)
                    throw construction_error(
                        "build: contact angles at the two rings differ by " +
                        std::to_string(mismatch) + "; surface is not capillary");
            }
            const double delta = 1e-3;
            const double pi = std::acos(-1.0);
            for (const auto& r : rings_)
                if (r.theta < delta || r.theta > pi - delta)
                    throw construction_error("build: degenerate contact angle");
        }
        const double h = meridian_.step;
        const double drift_gate =
            h <= 1e-3 ? 1e-8 : 1e-8 * std::pow(h / 1e-3, 4) * 10.0;
        if (kind_ != DelaunayKind::Sphere && kind_ != DelaunayKind::Hyperplane &&
            meridian_.force_drift() > drift_gate)
            throw construction_error("build: force drift exceeds its bound");
    }

    int n_ = 2;
    DelaunayKind kind_ = DelaunayKind::Hyperplane;
    bool closed_ = false;
    double theta_ = 0.0;
    MeridianCurve meridian_;
    std::vector<Ring> rings_;
    std::vector<double> weights_;
    std::optional<Recipe> recipe_;
};

using Surface = RotationalCapillarySurface;

}  // namespace capstab
