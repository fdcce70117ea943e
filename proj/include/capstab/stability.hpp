#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "capstab/jacobi_eigen.hpp"
#include "capstab/surface.hpp"
#include "capstab/vec.hpp"

namespace capstab::stability {

/// The instability quadratic form on R^{n+1},
///   Q(xi1, xi2) = -2n ∫_M <xi1, N + Hx> <xi2, (1+|x|^2) N - 2 <x,N> x> da,
/// with its eigen-decomposition.
struct StabilityForm {
    SymMatrix Q;
    std::vector<double> eigenvalues;                ///< ascending
    std::vector<std::vector<double>> eigenvectors;  ///< matching order, unit

    double lambda_min() const { return eigenvalues.front(); }
    double norm_inf() const { return Q.norm_inf(); }
    double trace() const { return Q.trace(); }
    int negative_count(double tol) const {
        int k = 0;
        for (double v : eigenvalues)
            if (v < -tol) ++k;
        return k;
    }
};

namespace detail {

inline double xN(const MeridianState& st) {
    return st.x1 * std::sin(st.alpha) - st.x2 * std::cos(st.alpha);
}

// radial factors of <e_A, N + Hx> and <e_A, (1+|x|^2)N - 2<x,N>x>
inline double u_axial(const MeridianState& st, double H) {
    return std::sin(st.alpha) + H * st.x1;
}
inline double v_axial(const MeridianState& st) {
    return (1.0 + st.radius_sq()) * std::sin(st.alpha) - 2.0 * xN(st) * st.x1;
}
inline double u_transverse(const MeridianState& st, double H) {
    return -std::cos(st.alpha) + H * st.x2;
}
inline double v_transverse(const MeridianState& st) {
    return -(1.0 + st.radius_sq()) * std::cos(st.alpha) - 2.0 * xN(st) * st.x2;
}

inline SymMatrix q_matrix(const Surface& surf) {
    const int n = surf.dimension();
    const double H = surf.mean_curvature();
    const double q00 = -2.0 * n *
                       surf.integrate_mode0([&](std::size_t, const MeridianState& st) {
                           return u_axial(st, H) * v_axial(st);
                       });
    const double qtt = -2.0 * n *
                       surf.integrate_mode1(
                           [&](std::size_t, const MeridianState& st) {
                               return u_transverse(st, H);
                           },
                           [&](std::size_t, const MeridianState& st) {
                               return v_transverse(st);
                           });
    SymMatrix Q(n + 1);
    Q(0, 0) = q00;
    for (int j = 1; j <= n; ++j) Q(j, j) = qtt;
    // axis/transverse couplings carry a single angular factor and vanish
    // under the S^{n-1} integral.
    return Q;
}

}  // namespace detail

/// Assembles Q and its spectrum. With `certify`, the entries are recomputed
/// on a step-halved grid and must agree to 1e-6 relative.
inline StabilityForm q_form(const Surface& surf, bool certify = true) {
    StabilityForm form;
    form.Q = detail::q_matrix(surf);
    if (certify) {
        if (!surf.recipe())
            throw not_applicable_error("q_form: cannot certify a recipe-less surface");
        const SymMatrix fine = detail::q_matrix(surf.refined());
        double diff = 0.0;
        for (std::size_t i = 0; i < form.Q.a.size(); ++i)
            diff = std::max(diff, std::abs(form.Q.a[i] - fine.a[i]));
        const double scale = std::max(form.Q.norm_inf(), fine.norm_inf());
        // a form at the roundoff floor on both grids counts as converged
        if (scale > 1e-12 && diff / scale > 1e-6)
            throw precision_error("q_form: entries changed by " +
                                  std::to_string(diff / scale) +
                                  " relative under grid halving");
    }
    const EigenDecomposition eig = jacobi_eigen(form.Q, 1e-12);
    form.eigenvalues = eig.values;
    form.eigenvectors = eig.vectors;
    return form;
}

struct TraceBound {
    double trace = 0.0;  ///< direct quadrature of the trace integrand
    double bound = 0.0;  ///< -∫ |grad |x|^2|^2 da, always in [trace, 0]
};

/// Trace of Q by its own integrand (independent of the matrix assembly) and
/// the tangential-gradient upper bound.
inline TraceBound trace_bound(const Surface& surf) {
    const int n = surf.dimension();
    const double H = surf.mean_curvature();
    TraceBound tb;
    tb.trace = -2.0 * n *
               surf.integrate_mode0([&](std::size_t, const MeridianState& st) {
                   const double xx = st.radius_sq();
                   const double xn = detail::xN(st);
                   return H * xn * (1.0 - xx) + 1.0 + xx - 2.0 * xn * xn;
               });
    tb.bound = -surf.integrate_mode0([&](std::size_t, const MeridianState& st) {
        // |x|^2 depends on s alone; its tangential gradient is the s-derivative
        const double d = 2.0 * (st.x1 * std::cos(st.alpha) + st.x2 * std::sin(st.alpha));
        return d * d;
    });
    return tb;
}

/// Mass vector (∫_M phi[e_A] da)_A. Transverse components vanish exactly by
/// the angular integrals; only the axial entry is quadratured.
inline std::vector<double> phi_mass_vector(const Surface& surf) {
    std::vector<double> mass(surf.dimension() + 1, 0.0);
    mass[0] = surf.integrate_mode0([](std::size_t, const MeridianState& st) {
        return test_function_radial(st, 0);
    });
    return mass;
}

inline double phi_mass(const Surface& surf, const Direction& xi) {
    if (static_cast<int>(xi.size()) != surf.dimension() + 1)
        throw std::invalid_argument("phi_mass: dimension mismatch");
    return xi[0] * phi_mass_vector(surf)[0];
}

/// Samples of the radial profile of phi[xi] on the surface grid.
inline std::vector<double> phi_radial_profile(const Surface& surf, int mode) {
    std::vector<double> g;
    g.reserve(surf.sample_count());
    for (const auto& st : surf.meridian().states)
        g.push_back(test_function_radial(st, mode));
    return g;
}

/// Second variation of the energy for a separated test function
/// f = g(s) * (mode-m angular factor), m in {0, 1}:
///   ∂²E(f) = -∫_M (Δf + |σ|² f) f da + ∫_{∂M} (f_ν - q f) f ds.
/// Δ uses g'' + (n-1)(r'/r) g' - m(n+m-2) g/r² with central second
/// differences in the interior and one-sided (second-order) stencils at the
/// boundary samples.
inline double second_variation(const Surface& surf, int mode, std::span<const double> g) {
    if (mode != 0 && mode != 1)
        throw std::invalid_argument("second_variation: only modes 0 and 1 are supported");
    if (g.size() != surf.sample_count())
        throw std::invalid_argument("second_variation: profile size mismatch");
    const int n = surf.dimension();
    const auto& sts = surf.meridian().states;
    const std::size_t m = sts.size();
    const double h = (sts.back().s - sts.front().s) / static_cast<double>(m - 1);
    const double lambda = mode == 0 ? 0.0 : static_cast<double>(n - 1);

    auto d1 = [&](std::size_t i) {
        if (i == 0) return (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
        if (i == m - 1)
            return (3.0 * g[m - 1] - 4.0 * g[m - 2] + g[m - 3]) / (2.0 * h);
        return (g[i + 1] - g[i - 1]) / (2.0 * h);
    };
    auto d2 = [&](std::size_t i) {
        if (i == 0)
            return (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / (h * h);
        if (i == m - 1)
            return (2.0 * g[m - 1] - 5.0 * g[m - 2] + 4.0 * g[m - 3] - g[m - 4]) / (h * h);
        return (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h);
    };

    const double interior = -surf.integrate_scalar(
        [&](std::size_t i, const MeridianState& st) {
            if (st.x2 < 1e-12) return 0.0;  // axis sample; zero quadrature weight
            const double rp = std::sin(st.alpha) / st.x2;
            const double lap =
                d2(i) + (n - 1) * rp * d1(i) - lambda * g[i] / (st.x2 * st.x2);
            const ShapeData sd = surf.shape_at(i);
            return (lap + sd.sigma_sq * g[i]) * g[i];
        },
        mode);

    double boundary = 0.0;
    if (!surf.closed()) {
        const double q = surf.robin_coefficient();
        const double angular =
            mode == 0 ? sphere_measure(n - 1) : sphere_measure(n - 1) / n;
        for (const auto& ring : surf.rings()) {
            const std::size_t i = ring.at_max_end ? m - 1 : 0;
            const double gv = g[i];
            const double gnu = (ring.at_max_end ? 1.0 : -1.0) * d1(i);
            boundary += angular * std::pow(ring.state.x2, n - 1) * (gnu - q * gv) * gv;
        }
    }
    return interior + boundary;
}

enum class Verdict { StableKnown, UnstableTheorem1, UnstableTwoEigenvalues, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StableKnown: return "Stable(known)";
        case Verdict::UnstableTheorem1: return "Unstable(Theorem 1)";
        case Verdict::UnstableTwoEigenvalues: return "Unstable(two-negative-eigenvalues)";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

/// Numeric evidence behind a verdict: which rung fired and its witnesses.
struct VerdictWitness {
    std::string rule;
    std::vector<double> xi;       ///< instability direction (if unstable)
    double q_value = 0.0;         ///< Q(xi, xi)
    double xi_mass = 0.0;         ///< ∫ phi[xi] da of the witness
    double c1 = 0.0, c2 = 0.0;    ///< mixing coefficients (two-eigenvalue rung)
    int negative_eigenvalues = 0;
};

struct Decision {
    Verdict verdict = Verdict::Inconclusive;
    VerdictWitness witness;
    double centroid_norm = 0.0;
    double tol_centroid = 0.0;
    double tol_eig = 0.0;
};

/// Default eigenvalue tolerance: relative to the form's magnitude, floored at
/// the quadrature roundoff level so a vanishing form reads as zero.
inline double default_eig_tol(const StabilityForm& form) {
    return std::max(1e-8 * form.norm_inf(), 1e-14);
}

/// Decision ladder: (i) hyperplanes and spherical caps are the known stable
/// kinds; (ii) centroid at the origin + a negative eigenvalue is an
/// instability certificate; (iii) two negative eigenvalues always admit a
/// mean-zero unstable combination; (iv) otherwise inconclusive.
inline Decision verdict(const Surface& surf, const StabilityForm& form,
                        double tol_centroid = 1e-6, double tol_eig = -1.0) {
    Decision d;
    d.tol_centroid = tol_centroid;
    d.tol_eig = tol_eig > 0 ? tol_eig : default_eig_tol(form);

    const EnclosedBody body = surf.enclosed_body();
    d.centroid_norm = norm(body.centroid);
    d.witness.negative_eigenvalues = form.negative_count(d.tol_eig);

    if (surf.kind() == DelaunayKind::Hyperplane || surf.kind() == DelaunayKind::Sphere) {
        d.verdict = Verdict::StableKnown;
        d.witness.rule = "known stable kind (hyperplane or spherical cap)";
        return d;
    }

    const std::vector<double> mass = phi_mass_vector(surf);
    auto mass_of = [&](const std::vector<double>& xi) {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) s += xi[i] * mass[i];
        return s;
    };

    if (d.centroid_norm <= tol_centroid && form.lambda_min() < -d.tol_eig) {
        d.verdict = Verdict::UnstableTheorem1;
        d.witness.rule = "centroid at origin with a negative eigenvalue";
        d.witness.xi = form.eigenvectors.front();
        d.witness.q_value = form.lambda_min();
        d.witness.xi_mass = mass_of(d.witness.xi);
        return d;
    }

    if (form.eigenvalues.size() >= 2 && form.eigenvalues[1] < -d.tol_eig) {
        const auto& xi1 = form.eigenvectors[0];
        const auto& xi2 = form.eigenvectors[1];
        const double m1 = mass_of(xi1);
        const double m2 = mass_of(xi2);
        double c1, c2;
        const double r = std::hypot(m1, m2);
        if (r > 1e-14) {
            c1 = -m2 / r;
            c2 = m1 / r;
        } else {
            c1 = c2 = 1.0 / std::sqrt(2.0);
        }
        d.verdict = Verdict::UnstableTwoEigenvalues;
        d.witness.rule = "mean-zero combination of two negative-eigenvalue directions";
        d.witness.c1 = c1;
        d.witness.c2 = c2;
        d.witness.xi.assign(xi1.size(), 0.0);
        for (std::size_t i = 0; i < xi1.size(); ++i)
            d.witness.xi[i] = c1 * xi1[i] + c2 * xi2[i];
        d.witness.q_value =
            c1 * c1 * form.eigenvalues[0] + c2 * c2 * form.eigenvalues[1];
        d.witness.xi_mass = mass_of(d.witness.xi);
        return d;
    }

    d.verdict = Verdict::Inconclusive;
    d.witness.rule = "no hypothesis applied at the given tolerances";
    return d;
}

}  // namespace capstab::stability
