#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace capstab {

/// Dense ambient vector in R^{n+1}. Value type, dimension fixed at construction.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t dim) : c_(dim, 0.0) {}
    Vec(std::initializer_list<double> init) : c_(init) {}

    static Vec zero(std::size_t dim) { return Vec(dim); }
    static Vec basis(std::size_t dim, std::size_t k) {
        Vec v(dim);
        v[k] = 1.0;
        return v;
    }

    std::size_t size() const { return c_.size(); }
    double& operator[](std::size_t i) { return c_[i]; }
    double operator[](std::size_t i) const { return c_[i]; }

    auto begin() { return c_.begin(); }
    auto end() { return c_.end(); }
    auto begin() const { return c_.begin(); }
    auto end() const { return c_.end(); }

    Vec& operator+=(const Vec& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Vec& operator*=(double t) {
        for (double& x : c_) x *= t;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double t, Vec a) { return a *= t; }
    friend Vec operator*(Vec a, double t) { return a *= t; }
    friend Vec operator-(Vec a) { return a *= -1.0; }

private:
    std::vector<double> c_;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

/// Unit vector in R^{n+1}; the constructor enforces |v| = 1 within 1e-12.
class Direction {
public:
    explicit Direction(Vec v) : v_(std::move(v)) {
        if (std::abs(norm(v_) - 1.0) > 1e-12)
            throw std::invalid_argument("Direction: vector is not unit length");
    }

    static Direction axis(std::size_t dim, std::size_t k) {
        return Direction(Vec::basis(dim, k));
    }
    /// Normalizes v; rejects vectors too short to normalize reliably.
    static Direction normalized(Vec v) {
        const double r = norm(v);
        if (!(r > 1e-300)) throw std::invalid_argument("Direction: zero vector");
        return Direction((1.0 / r) * v);
    }

    const Vec& vec() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    operator const Vec&() const { return v_; }

private:
    Vec v_;
};

/// Surface measure of the unit sphere S^m in R^{m+1}.
inline double sphere_measure(int m) {
    if (m < 0) throw std::invalid_argument("sphere_measure: negative dimension");
    const double p = 0.5 * static_cast<double>(m + 1);
    return 2.0 * std::pow(std::acos(-1.0), p) / std::tgamma(p);
}

/// Errors raised by surface construction (clipping, symmetric starts, containment).
class construction_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature failed its grid-halving certification.
class precision_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A check was invoked on a surface outside its preconditions.
class not_applicable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace capstab
