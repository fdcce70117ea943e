#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "capstab/vec.hpp"

namespace capstab::delaunay {

/// One sample of the generating curve: arc length, axial and radial
/// coordinates, tangent angle against the positive axial direction.
struct MeridianState {
    double s = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double alpha = 0.0;

    double radius_sq() const { return x1 * x1 + x2 * x2; }
};

enum class DelaunayKind { Unduloid, Cylinder, Nodoid, Sphere, Catenoid, Hyperplane };

inline const char* to_string(DelaunayKind k) {
    switch (k) {
        case DelaunayKind::Unduloid: return "Unduloid";
        case DelaunayKind::Cylinder: return "Cylinder";
        case DelaunayKind::Nodoid: return "Nodoid";
        case DelaunayKind::Sphere: return "Sphere";
        case DelaunayKind::Catenoid: return "Catenoid";
        case DelaunayKind::Hyperplane: return "Hyperplane";
    }
    return "?";
}

struct OdeRhs {
    double dx1, dx2, dalpha;
};

/// Right-hand side of the meridian system
///   (x1)' = cos(alpha), (x2)' = sin(alpha),
///   alpha' = -nH + (n-1) cos(alpha)/x2.
inline OdeRhs ode_rhs(const MeridianState& st, double H, int n) {
    if (!(st.x2 > 0.0))
        throw std::domain_error("ode_rhs: axis contact (x2 <= 0)");
    const double c = std::cos(st.alpha);
    return {c, std::sin(st.alpha),
            -n * H + (n - 1) * c / st.x2};
}

/// First integral (x2)^{n-1} cos(alpha) - H (x2)^n, constant along solutions.
inline double force(const MeridianState& st, double H, int n) {
    const double rp = std::pow(st.x2, n - 1);
    return rp * std::cos(st.alpha) - H * rp * st.x2;
}

inline MeridianState rk4_step(const MeridianState& st, double h, double H, int n) {
    auto adv = [&](const MeridianState& base, double f, const OdeRhs& k) {
        MeridianState r = base;
        r.x1 += f * k.dx1;
        r.x2 += f * k.dx2;
        r.alpha += f * k.dalpha;
        return r;
    };
    const OdeRhs k1 = ode_rhs(st, H, n);
    const OdeRhs k2 = ode_rhs(adv(st, 0.5 * h, k1), H, n);
    const OdeRhs k3 = ode_rhs(adv(st, 0.5 * h, k2), H, n);
    const OdeRhs k4 = ode_rhs(adv(st, h, k3), H, n);
    MeridianState out = st;
    out.s += h;
    out.x1 += (h / 6.0) * (k1.dx1 + 2.0 * (k2.dx1 + k3.dx1) + k4.dx1);
    out.x2 += (h / 6.0) * (k1.dx2 + 2.0 * (k2.dx2 + k3.dx2) + k4.dx2);
    out.alpha += (h / 6.0) * (k1.dalpha + 2.0 * (k2.dalpha + k3.dalpha) + k4.dalpha);
    return out;
}

/// A fixed-step RK4 trajectory of the meridian system.
struct MeridianCurve {
    int n = 2;
    double mean_curvature = 0.0;  ///< H
    double force_constant = 0.0;  ///< F, recorded from the initial state
    double step = 0.0;            ///< nominal integration step
    std::vector<MeridianState> states;
    bool axis_touching = false;

    /// Largest deviation of the first integral from its initial value.
    double force_drift() const {
        double drift = 0.0;
        for (const auto& st : states)
            drift = std::max(drift, std::abs(force(st, mean_curvature, n) - force_constant));
        return drift;
    }
};

/// Classical RK4 over arc length [init.s, init.s + length]; stops early with
/// the axis_touching flag if the radius drops to x2_min.
inline MeridianCurve integrate(int n, double H, const MeridianState& init,
                               double step, double length, double x2_min = 1e-6) {
    if (!(init.x2 > 0.0)) throw std::domain_error("integrate: init.x2 must be > 0");
    if (!(step > 0.0) || !(length > 0.0))
        throw std::invalid_argument("integrate: step and length must be positive");

    MeridianCurve curve;
    curve.n = n;
    curve.mean_curvature = H;
    curve.force_constant = force(init, H, n);
    curve.step = step;
    curve.states.push_back(init);

    const long full = static_cast<long>(std::floor(length / step));
    double remaining = length - full * step;
    MeridianState st = init;
    // a step whose internal stages reach the axis also counts as axis contact
    try {
        for (long i = 0; i < full; ++i) {
            st = rk4_step(st, step, H, n);
            if (st.x2 <= x2_min) {
                curve.axis_touching = true;
                return curve;
            }
            curve.states.push_back(st);
        }
        if (remaining > 1e-15 * length) {
            st = rk4_step(st, remaining, H, n);
            if (st.x2 <= x2_min)
                curve.axis_touching = true;
            else
                curve.states.push_back(st);
        }
    } catch (const std::domain_error&) {
        curve.axis_touching = true;
    }
    return curve;
}

/// Force taken by a cylinder of the given H: the maximum of r^{n-1} - H r^n
/// over r > 0, attained at the equilibrium radius (n-1)/(n|H|).
inline double cylinder_force(int n, double H) {
    const double r = (n - 1) / (static_cast<double>(n) * std::abs(H));
    const double sgn = H > 0 ? 1.0 : -1.0;
    return sgn * std::pow(r, n - 1) / n;
}

inline double cylinder_radius(int n, double H) {
    return (n - 1) / (static_cast<double>(n) * std::abs(H));
}

/// Kind of the meridian determined by the pair (H, F).
inline DelaunayKind classify(int n, double H, double F, double tol = 1e-10) {
    const bool h0 = std::abs(H) <= tol;
    const bool f0 = std::abs(F) <= tol;
    if (h0 && f0) return DelaunayKind::Hyperplane;
    if (h0) return DelaunayKind::Catenoid;
    if (f0) return DelaunayKind::Sphere;
    if (F * H < 0.0) return DelaunayKind::Nodoid;
    return std::abs(F - cylinder_force(n, H)) <= tol ? DelaunayKind::Cylinder
                                                     : DelaunayKind::Unduloid;
}

/// Symmetric starting state on the hyperplane {x1 = 0}: horizontal tangent
/// (alpha in {0, pi}) with radius solving cos(alpha) r^{n-1} - H r^n = F.
struct SymmetricStart {
    double x2 = 0.0;
    double alpha = 0.0;
};

namespace detail {

/// Bisection root of g on (lo, hi], assuming g(lo) and g(hi) bracket zero.
template <class Fn>
double bisect(Fn&& g, double lo, double hi, double tol = 1e-12) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (glo * ghi > 0.0) throw construction_error("bisect: root not bracketed");
    for (int i = 0; i < 200 && (hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (glo * gm < 0.0) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline SymmetricStart symmetric_start(int n, double H, double F, double tol = 1e-10) {
    const DelaunayKind kind = classify(n, H, F, tol);
    const double pi = std::acos(-1.0);
    auto root_at = [&](double alpha0, double lo, double hi) {
        const double c = std::cos(alpha0);
        auto g = [&](double r) { return c * std::pow(r, n - 1) - H * std::pow(r, n) - F; };
        return detail::bisect(g, lo, hi);
    };
    switch (kind) {
        case DelaunayKind::Cylinder:
            return {cylinder_radius(n, H), H > 0 ? 0.0 : pi};
        case DelaunayKind::Unduloid: {
            // neck: the smaller root, below the equilibrium radius
            const double a0 = H > 0 ? 0.0 : pi;
            const double req = cylinder_radius(n, H);
            if ((F - cylinder_force(n, H)) * (H > 0 ? 1.0 : -1.0) > 0.0)
                throw construction_error("symmetric_start: no meridian exists for |F| beyond the cylinder force");
            return {root_at(a0, 1e-14, req), a0};
        }
        case DelaunayKind::Nodoid: {
            // inner loop radius, where the curve is locally convex
            const double a0 = H > 0 ? pi : 0.0;
            return {root_at(a0, 1e-14, 10.0), a0};
        }
        case DelaunayKind::Catenoid: {
            const double a0 = F > 0 ? 0.0 : pi;
            return {root_at(a0, 1e-14, 10.0), a0};
        }
        default:
            throw construction_error(
                "symmetric_start: Sphere/Hyperplane meridians touch the axis; build them analytically");
    }
}

/// Meridian through (x1, alpha) = (0, alpha0), integrated in both arc-length
/// directions until |X| first exceeds 1 on each side.
inline MeridianCurve symmetric_segment(int n, double H, double F, double step,
                                       double max_half_length = 10.0) {
    const SymmetricStart start = symmetric_start(n, H, F);
    MeridianState center;
    center.s = 0.0;
    center.x1 = 0.0;
    center.x2 = start.x2;
    center.alpha = start.alpha;

    auto march = [&](double h) {
        std::vector<MeridianState> side;
        MeridianState st = center;
        const long cap = static_cast<long>(std::ceil(max_half_length / step)) + 1;
        for (long i = 0; i < cap; ++i) {
            try {
                st = rk4_step(st, h, H, n);
            } catch (const std::domain_error&) {
                throw construction_error("symmetric_segment: trajectory touched the axis");
            }
            if (st.x2 <= 1e-6)
                throw construction_error("symmetric_segment: trajectory touched the axis");
            side.push_back(st);
            if (st.radius_sq() > 1.0) return side;
        }
        throw construction_error(
            "symmetric_segment: curve stayed inside the unit ball over the arc-length budget");
    };

    const std::vector<MeridianState> fwd = march(step);
    const std::vector<MeridianState> bwd = march(-step);

    MeridianCurve curve;
    curve.n = n;
    curve.mean_curvature = H;
    curve.force_constant = force(center, H, n);
    curve.step = step;
    curve.states.reserve(fwd.size() + bwd.size() + 1);
    for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) curve.states.push_back(*it);
    curve.states.push_back(center);
    for (const auto& st : fwd) curve.states.push_back(st);
    return curve;
}

/// CSV export: header s,x1,x2,alpha,force; 17 significant digits.
inline void write_csv(const MeridianCurve& curve, std::ostream& os) {
    os << "s,x1,x2,alpha,force\n";
    char buf[512];
    for (const auto& st : curve.states) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", st.s, st.x1,
                      st.x2, st.alpha, force(st, curve.mean_curvature, curve.n));
        os << buf;
    }
}

}  // namespace capstab::delaunay
