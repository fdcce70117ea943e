#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace capstab {

/// Dense symmetric matrix in row-major storage, sized for (n+1) <= ~10.
struct SymMatrix {
    int dim = 0;
    std::vector<double> a;  // dim*dim

    SymMatrix() = default;
    explicit SymMatrix(int d) : dim(d), a(static_cast<std::size_t>(d) * d, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * dim + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim; ++i) t += (*this)(i, i);
        return t;
    }
    double norm_inf() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

struct EigenDecomposition {
    std::vector<double> values;               ///< ascending
    std::vector<std::vector<double>> vectors; ///< vectors[k] pairs with values[k], unit length
};

/// Cyclic Jacobi rotations on a small dense symmetric matrix. Sweeps run until
/// the largest off-diagonal entry falls below tol * max(1, |A|_inf).
inline EigenDecomposition jacobi_eigen(SymMatrix m, double tol = 1e-12) {
    const int d = m.dim;
    std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) v[i][i] = 1.0;  // v[col] = eigenvector accumulator

    const double gate = tol * std::max(1.0, m.norm_inf());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off = std::max(off, std::abs(m(p, q)));
        if (off <= gate) break;

        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < d; ++k) {
                    const double akp = m(k, p);
                    const double akq = m(k, q);
                    m(k, p) = c * akp - s * akq;
                    m(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = m(p, k);
                    const double aqk = m(q, k);
                    m(p, k) = c * apk - s * aqk;
                    m(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = v[p][k];
                    const double vkq = v[q][k];
                    v[p][k] = c * vkp - s * vkq;
                    v[q][k] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return m(i, i) < m(j, j); });

    EigenDecomposition out;
    out.values.reserve(d);
    out.vectors.reserve(d);
    for (int k : order) {
        out.values.push_back(m(k, k));
        out.vectors.push_back(v[k]);
    }
    return out;
}

}  // namespace capstab
