#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

#include "billiards/errors.hpp"

namespace billiards {

// Dense univariate polynomial over C, coefficients in increasing degree.
struct Poly {
    std::vector<std::complex<double>> c;

    Poly() = default;
    explicit Poly(std::vector<std::complex<double>> coeffs) : c(std::move(coeffs)) {}

    static Poly constant(std::complex<double> v) { return Poly({v}); }

    int degree() const { return static_cast<int>(c.size()) - 1; }

    std::complex<double> eval(std::complex<double> t) const {
        std::complex<double> acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly({std::complex<double>(0.0)});
        std::vector<std::complex<double>> d(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * double(k);
        return Poly(std::move(d));
    }

    Poly operator*(const Poly& o) const {
        std::vector<std::complex<double>> r(c.size() + o.c.size() - 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
        return Poly(std::move(r));
    }

    Poly operator+(const Poly& o) const {
        std::vector<std::complex<double>> r(std::max(c.size(), o.c.size()), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
        for (std::size_t i = 0; i < o.c.size(); ++i) r[i] += o.c[i];
        return Poly(std::move(r));
    }

    Poly scaled(std::complex<double> s) const {
        Poly r = *this;
        for (auto& v : r.c) v *= s;
        return r;
    }

    double max_coeff_modulus() const {
        double m = 0.0;
        for (const auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }

    // degree after dropping trailing coefficients below a relative threshold
    int effective_degree(double rel_tol = 1e-12) const {
        const double scale = max_coeff_modulus();
        if (scale == 0.0) return -1;
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
            if (std::abs(c[k]) > rel_tol * scale) return k;
        return -1;
    }
};

// Roots via the companion matrix, polished by Newton steps. The variable is
// rescaled by a Fujiwara-type root bound first: companion eigenvalues of
// badly scaled coefficients are ill-conditioned without it.
inline std::vector<std::complex<double>> poly_roots(const Poly& p, double rel_tol = 1e-12) {
    using Cxd = std::complex<double>;
    const int n = p.effective_degree(rel_tol);
    if (n <= 0) return {};
    const Cxd lead_raw = p.c[n];
    double scale = 0.0;
    for (int k = 0; k < n; ++k) {
        const double m = std::abs(p.c[k] / lead_raw);
        if (m > 0.0) scale = std::max(scale, std::pow(m, 1.0 / (n - k)));
    }
    if (!(scale > 1e-150 && scale < 1e150)) scale = 1.0;
    Poly q = p;
    for (int k = 0; k <= n; ++k) q.c[k] *= std::pow(scale, k);
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    const Cxd lead = q.c[n];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -q.c[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, /*computeEigenvectors=*/false);
    std::vector<Cxd> roots(n);
    Poly d = p.derivative();
    for (int i = 0; i < n; ++i) {
        Cxd r = solver.eigenvalues()(i) * scale;
        double best = std::abs(p.eval(r));
        for (int k = 0; k < 2; ++k) {
            const Cxd dv = d.eval(r);
            if (std::abs(dv) < 1e-300) break;
            const Cxd step = p.eval(r) / dv;
            if (!std::isfinite(std::abs(step))) break;
            const Cxd cand = r - step;
            const double cand_abs = std::abs(p.eval(cand));
            // at multiple roots Newton divides noise by noise; only accept
            // steps that actually reduce the residual
            if (cand_abs >= best) break;
            r = cand;
            best = cand_abs;
        }
        roots[i] = r;
    }
    std::sort(roots.begin(), roots.end(), [](const Cxd& a, const Cxd& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

// All solutions of s^k = w.
inline std::vector<std::complex<double>> all_kth_roots(std::complex<double> w, int k) {
    std::vector<std::complex<double>> out;
    if (k <= 0) throw InvalidExponent("k-th roots need k >= 1");
    const double r = std::pow(std::abs(w), 1.0 / k);
    const double th = std::arg(w);
    out.reserve(k);
    for (int j = 0; j < k; ++j) {
        const double a = (th + 2.0 * M_PI * j) / k;
        out.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    return out;
}

} // namespace billiards
