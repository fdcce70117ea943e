#pragma once

#include <cmath>
#include <stdexcept>

#include "capstab/vec.hpp"

namespace capstab::conformal {

namespace detail {

inline void check_pair(const Vec& a, const Vec& x) {
    if (a.size() != x.size())
        throw std::invalid_argument("conformal: dimension mismatch");
    if (norm(a) >= 1.0)
        throw std::domain_error("conformal: |a| must be < 1");
    if (norm(x) > 1.0 + 1e-12)
        throw std::domain_error("conformal: |x| must be <= 1");
}

inline double denominator(const Vec& a, const Vec& x) {
    return 1.0 - 2.0 * dot(a, x) + norm_sq(a) * norm_sq(x);
}

}  // namespace detail

/// Mobius map of the closed unit ball determined by a pole a with |a| < 1.
/// Maps the ball to itself and the unit sphere to itself.
inline Vec mobius_map(const Vec& a, const Vec& x) {
    detail::check_pair(a, x);
    const double den = detail::denominator(a, x);
    const double na2 = norm_sq(a);
    const double t = 1.0 - 2.0 * dot(a, x) + norm_sq(x);
    return (1.0 / den) * ((1.0 - na2) * x - t * a);
}

/// Linear conformal scale of the Mobius map at x.
inline double conformal_factor(const Vec& a, const Vec& x) {
    detail::check_pair(a, x);
    return (1.0 - norm_sq(a)) / detail::denominator(a, x);
}

/// One-parameter conformal flow f_t = mobius_map with pole t*xi, |t| < 1.
inline Vec flow(const Direction& xi, double t, const Vec& x) {
    if (!(std::abs(t) < 1.0))
        throw std::domain_error("flow: |t| must be < 1");
    return mobius_map(t * xi.vec(), x);
}

/// Generator of the flow: Y[xi](x) = -(1+|x|^2) xi + 2<xi,x> x.
/// Tangent to the unit sphere wherever |x| = 1.
inline Vec killing_field(const Direction& xi, const Vec& x) {
    if (xi.size() != x.size())
        throw std::invalid_argument("killing_field: dimension mismatch");
    return -(1.0 + norm_sq(x)) * xi.vec() + 2.0 * dot(xi, x) * x;
}

/// Ambient divergence of the field: 2(n+1) <xi, x>.
inline double field_divergence(const Direction& xi, const Vec& x) {
    if (xi.size() != x.size())
        throw std::invalid_argument("field_divergence: dimension mismatch");
    return 2.0 * static_cast<double>(x.size()) * dot(xi, x);
}

/// Normal component of the field at a surface point with unit normal N:
/// phi[xi] = <xi, -(1+|x|^2) N + 2 <x,N> x>.
inline double test_function(const Direction& xi, const Vec& x, const Direction& N) {
    const double xx = norm_sq(x);
    const double xN = dot(x, N.vec());
    return dot(xi.vec(), -(1.0 + xx) * N.vec() + 2.0 * xN * x);
}

/// Closed form of (Laplacian + |sigma|^2) applied to phi[xi] on a CMC
/// hypersurface with mean curvature H: -2n <xi, N + H x>.
inline double jacobi_image(const Direction& xi, const Vec& x, const Direction& N,
                           double H, int n) {
    return -2.0 * static_cast<double>(n) *
           dot(xi.vec(), N.vec() + H * x);
}

/// Central-difference derivative of the flow in t; with `richardson` the
/// h and h/2 evaluations are combined for two extra orders.
inline Vec flow_derivative_fd(const Direction& xi, const Vec& x, double h,
                              bool richardson = false) {
    auto central = [&](double hh) {
        return (1.0 / (2.0 * hh)) * (flow(xi, hh, x) - flow(xi, -hh, x));
    };
    if (!richardson) return central(h);
    const Vec d1 = central(h);
    const Vec d2 = central(0.5 * h);
    return (1.0 / 3.0) * (4.0 * d2 - d1);
}

}  // namespace capstab::conformal
