#pragma once

// One-dimensional Gauss rules: Hermite for the standard Gaussian (weights
// sum to 1) and Legendre on intervals, plus composite panel rules.

#include "cosub/linalg.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cosub {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

namespace detail {

/// Nodes and squared-first-component weights of a symmetric Jacobi matrix
/// with zero diagonal.
inline Rule1D golub_welsch(const std::vector<double>& offdiag, double mass) {
    const auto n = static_cast<Eigen::Index>(offdiag.size() + 1);
    Matrix J = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) J(k, k + 1) = J(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Matrix> es(J);
    Rule1D r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        r.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
        const double v = es.eigenvectors()(0, k);
        r.weights[static_cast<std::size_t>(k)] = mass * v * v;
    }
    return r;
}

/// Normalized probabilists' Hermite values h_{n-1}(x), h_n(x).
inline std::pair<double, double> hermite_pair(std::size_t n, double x) {
    double prev = 0.0, cur = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
        prev = cur;
        cur = next;
    }
    return {prev, cur};
}

inline std::pair<double, double> legendre_pair(std::size_t n, double x) {
    double prev = 1.0, cur = x;
    if (n == 0) return {0.0, 1.0};
    for (std::size_t k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - static_cast<double>(k) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return {prev, cur};
}

}  // namespace detail

/// n-point Gauss–Hermite rule for the standard normal density: exact for
/// polynomials of degree <= 2n-1, weights sum to 1.
inline Rule1D gauss_hermite_uncached(std::size_t n) {
    if (n == 0) throw std::invalid_argument("quadrature order must be positive");
    std::vector<double> off(n - 1);
    for (std::size_t k = 1; k < n; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
    Rule1D r = detail::golub_welsch(off, 1.0);
    const double sn = std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double x = r.nodes[k];
        for (int it = 0; it < 3; ++it) {
            const auto [hm1, h] = detail::hermite_pair(n, x);
            // h_n' = sqrt(n) h_{n-1}
            const double dx = h / (sn * hm1);
            if (!std::isfinite(dx)) break;
            x -= dx;
        }
        const auto [hm1, h] = detail::hermite_pair(n, x);
        (void)h;
        r.nodes[k] = x;
        r.weights[k] = 1.0 / (static_cast<double>(n) * hm1 * hm1);
    }
    // symmetrize to remove eigen-solver asymmetry
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double x = 0.5 * (r.nodes[n - 1 - k] - r.nodes[k]);
        const double w = 0.5 * (r.weights[k] + r.weights[n - 1 - k]);
        r.nodes[k] = -x;
        r.nodes[n - 1 - k] = x;
        r.weights[k] = r.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

/// Cached Gauss–Hermite rule; thread-safe.
inline const Rule1D& gauss_hermite(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<Rule1D>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Rule1D>(gauss_hermite_uncached(n));
    return *slot;
}

/// n-point Gauss–Legendre rule on [-1, 1].
inline Rule1D gauss_legendre_uncached(std::size_t n) {
    if (n == 0) throw std::invalid_argument("quadrature order must be positive");
    std::vector<double> off(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        off[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    Rule1D r = detail::golub_welsch(off, 2.0);
    for (std::size_t k = 0; k < n; ++k) {
        double x = r.nodes[k];
        for (int it = 0; it < 3; ++it) {
            const auto [pm1, p] = detail::legendre_pair(n, x);
            const double dp = static_cast<double>(n) * (x * p - pm1) / (x * x - 1.0);
            x -= p / dp;
        }
        const auto [pm1, p] = detail::legendre_pair(n, x);
        const double dp = static_cast<double>(n) * (x * p - pm1) / (x * x - 1.0);
        r.nodes[k] = x;
        r.weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

inline const Rule1D& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<Rule1D>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Rule1D>(gauss_legendre_uncached(n));
    return *slot;
}

/// Composite Gauss–Legendre on [a, b]: `panels` equal panels of `order`
/// points each.
inline Rule1D composite_legendre(double a, double b, std::size_t panels, std::size_t order = 10) {
    if (!(b > a)) throw std::invalid_argument("empty interval");
    if (panels == 0) throw std::invalid_argument("need at least one panel");
    const Rule1D& base = gauss_legendre(order);
    Rule1D r;
    r.nodes.reserve(panels * order);
    r.weights.reserve(panels * order);
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        for (std::size_t k = 0; k < order; ++k) {
            r.nodes.push_back(lo + 0.5 * h * (base.nodes[k] + 1.0));
            r.weights.push_back(0.5 * h * base.weights[k]);
        }
    }
    return r;
}

inline double standard_normal_density(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal mass of [-k, k].
inline double centered_normal_mass(double k) { return std::erf(k / std::numbers::sqrt2); }

/// Visits every point of the tensor grid rule^d in lexicographic order,
/// passing the point and the product weight.
template <class F>
void for_each_tensor_point(const std::vector<const Rule1D*>& rules, F&& f) {
    const std::size_t d = rules.size();
    std::vector<std::size_t> idx(d, 0);
    Vector x(static_cast<Eigen::Index>(d));
    for (const Rule1D* r : rules)
        if (r->size() == 0) return;
    for (;;) {
        double w = 1.0;
        for (std::size_t c = 0; c < d; ++c) {
            x(static_cast<Eigen::Index>(c)) = rules[c]->nodes[idx[c]];
            w *= rules[c]->weights[idx[c]];
        }
        f(x, w);
        std::size_t c = d;
        while (c > 0) {
            --c;
            if (++idx[c] < rules[c]->size()) break;
            idx[c] = 0;
            if (c == 0) return;
        }
        if (d == 0) return;
    }
}

}  // namespace cosub
