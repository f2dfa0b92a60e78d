#pragma once

// Gaussian measure on R^kappa, Radon–Nikodym derivatives of linear maps,
// box-restricted L2 norms of those derivatives, infinite products with
// certified remainders and the singular-scaling construction.

#include "cosub/banded.hpp"
#include "cosub/linalg.hpp"
#include "cosub/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cosub {

// ---------------------------------------------------------------------------
// GaussianSpace
// ---------------------------------------------------------------------------

/// Standard Gaussian measure on R^kappa.
class GaussianSpace {
public:
    explicit GaussianSpace(std::size_t kappa) : kappa_(kappa) {
        if (kappa == 0) throw std::invalid_argument("dimension must be positive");
    }
    [[nodiscard]] std::size_t dim() const { return kappa_; }

    [[nodiscard]] double log_density(const Vector& x) const {
        check(x);
        return -0.5 * x.squaredNorm() - 0.5 * static_cast<double>(kappa_) * std::log(2.0 * std::numbers::pi);
    }
    [[nodiscard]] double density(const Vector& x) const { return std::exp(log_density(x)); }

    /// Lebesgue integral of the density over [-half_width, half_width]^kappa
    /// with a composite Gauss–Legendre rule.
    [[nodiscard]] double total_mass(double half_width = 12.0, std::size_t panels = 24) const {
        const Rule1D r = composite_legendre(-half_width, half_width, panels);
        std::vector<const Rule1D*> rules(kappa_, &r);
        CompensatedSum s;
        for_each_tensor_point(rules, [&](const Vector& x, double w) { s.add(w * density(x)); });
        return s.value();
    }

    /// Seeded standard normal draws.
    [[nodiscard]] std::vector<Vector> sample(std::size_t count, std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        std::vector<Vector> out(count, Vector(static_cast<Eigen::Index>(kappa_)));
        for (auto& v : out)
            for (Eigen::Index c = 0; c < v.size(); ++c) v(c) = nd(rng);
        return out;
    }

private:
    void check(const Vector& x) const {
        if (static_cast<std::size_t>(x.size()) != kappa_) throw std::invalid_argument("point has wrong dimension");
    }
    std::size_t kappa_;
};

// ---------------------------------------------------------------------------
// RnDerivative
// ---------------------------------------------------------------------------

/// h_A(x) = |det A^{-1}| exp((|x|^2 - |A^{-1}x|^2)/2), the density of
/// mu_G o A^{-1} with respect to mu_G.
class RnDerivative {
public:
    /// From the inverse matrix directly.
    static RnDerivative from_inverse(Matrix a_inv) {
        if (a_inv.rows() != a_inv.cols()) throw std::invalid_argument("matrix not square");
        const LogDet d = log_det(a_inv);
        if (d.is_zero()) throw std::domain_error("matrix is not invertible");
        RnDerivative h;
        h.a_inv_ = std::move(a_inv);
        h.log_abs_det_ = d.log_abs;
        return h;
    }

    static RnDerivative of(const Matrix& a) { return from_inverse(checked_inverse(a)); }

    /// h_{A^i}, using (A^{-1})^i.
    static RnDerivative of_power(const Matrix& a, int i) { return from_inverse(matrix_power(checked_inverse(a), i)); }

    [[nodiscard]] double log_eval(const Vector& x) const {
        if (x.size() != a_inv_.rows()) throw std::invalid_argument("point has wrong dimension");
        return log_abs_det_ + 0.5 * (x.squaredNorm() - (a_inv_ * x).squaredNorm());
    }
    [[nodiscard]] double eval(const Vector& x) const { return std::exp(log_eval(x)); }

    [[nodiscard]] const Matrix& inverse() const { return a_inv_; }
    [[nodiscard]] double log_abs_det_inverse() const { return log_abs_det_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(a_inv_.rows()); }

private:
    RnDerivative() = default;
    Matrix a_inv_;
    double log_abs_det_ = 0.0;
};

/// Worst relative deviation between h_{A^n} evaluated directly and the
/// product h_A * h_A o A^{-1} * ... * h_A o A^{-(n-1)} over the points.
inline double rn_power_factorization_check(const Matrix& a, int n, const std::vector<Vector>& points) {
    if (n < 1) throw std::invalid_argument("power must be at least 1");
    const RnDerivative h = RnDerivative::of(a);
    const RnDerivative hn = RnDerivative::of_power(a, n);
    double worst = 0.0;
    for (const Vector& x : points) {
        const double direct = hn.log_eval(x);
        double factored = 0.0;
        Vector y = x;
        for (int k = 0; k < n; ++k) {
            factored += h.log_eval(y);
            y = h.inverse() * y;
        }
        worst = std::max(worst, std::abs(std::expm1(direct - factored)));
    }
    return worst;
}

/// Integral of h_A against mu_G, evaluated by Gauss–Hermite quadrature in
/// coordinates matched to the transported measure; equals 1 for every
/// invertible A.
inline double transport_mass(const Matrix& a, std::size_t order = 8) {
    const RnDerivative h = RnDerivative::of(a);
    const Matrix& b = h.inverse();
    const auto k = b.rows();
    Eigen::LLT<Matrix> llt(b.transpose() * b);
    if (llt.info() != Eigen::Success) throw std::domain_error("transport: Gram matrix not positive definite");
    // x = L^{-T} y maps N(0, I) onto N(0, (B^T B)^{-1}).
    const Matrix T = llt.matrixU().solve(Matrix::Identity(k, k));
    const double log_det_t = log_det(T).log_abs;
    const GaussianSpace g(static_cast<std::size_t>(k));
    const Rule1D& r = gauss_hermite(order);
    std::vector<const Rule1D*> rules(static_cast<std::size_t>(k), &r);
    CompensatedSum s;
    for_each_tensor_point(rules, [&](const Vector& y, double w) {
        const Vector x = T * y;
        s.add(w * std::exp(log_det_t + h.log_eval(x) + g.log_density(x) - g.log_density(y)));
    });
    return s.value();
}

// ---------------------------------------------------------------------------
// Box-restricted norms
// ---------------------------------------------------------------------------

/// Axis-aligned box in the leading coordinates.
struct Box {
    std::vector<std::pair<double, double>> sides;

    static Box cube(std::size_t d, double k) {
        if (!(k > 0)) throw std::invalid_argument("box radius must be positive");
        return Box{std::vector<std::pair<double, double>>(d, {-k, k})};
    }
    [[nodiscard]] std::size_t dim() const { return sides.size(); }
    [[nodiscard]] bool contains(const Box& o) const {
        if (o.dim() != dim()) return false;
        for (std::size_t c = 0; c < dim(); ++c)
            if (o.sides[c].first < sides[c].first || o.sides[c].second > sides[c].second) return false;
        return true;
    }
};

enum class ChiMethod {
    schur,    ///< unrestricted coordinates integrated in closed form
    hermite,  ///< unrestricted coordinates by tensor Gauss–Hermite
};

struct QuadSpec {
    std::size_t order = 40;  ///< box nodes per coordinate (multiple of panel_points)
    std::size_t panel_points = 10;
    double tol = 1e-9;  ///< relative agreement between successive doublings
    std::size_t max_nodes = 4'000'000;
    ChiMethod method = ChiMethod::schur;
    std::size_t hermite_order = 40;
};

struct ChiNormResult {
    double value = 0.0;
    double log_value = 0.0;
    bool divergent = false;
    bool converged = false;
    std::size_t order = 0;        ///< box nodes per coordinate at the reported value
    double last_change = 0.0;     ///< relative change at the last doubling
    double min_eigenvalue = 0.0;  ///< of the exponent matrix on unrestricted coordinates
};

namespace detail {

/// log of sum_k w_k exp(e_k), two passes with a fixed visiting order.
template <class Visit>
double log_sum_exp(Visit&& visit) {
    double mx = -std::numeric_limits<double>::infinity();
    visit([&](double, double e) { mx = std::max(mx, e); });
    if (!std::isfinite(mx)) return mx;
    CompensatedSum s;
    visit([&](double w, double e) { s.add(w * std::exp(e - mx)); });
    return mx + std::log(s.value());
}

}  // namespace detail

/// Integral over mu_G^kappa of chi_{box x R^{kappa-d}} h^2, where h is the
/// Radon–Nikodym derivative whose inverse matrix is `b` (so h = h_{A^i}
/// when b = A^{-i}). The integrand times the Gaussian density is
/// |det b|^2 (2 pi)^{-kappa/2} exp(-x^T Q x / 2) with Q = 2 b^T b - I; the
/// integral is infinite unless Q is positive definite on the unrestricted
/// coordinates.
inline ChiNormResult chi_norm_sq_from_inverse(const Matrix& b, const Box& box, const QuadSpec& quad = {}) {
    const auto kappa = b.rows();
    const auto d = static_cast<Eigen::Index>(box.dim());
    if (d > kappa) throw std::invalid_argument("box has more coordinates than the space");
    if (quad.panel_points == 0 || quad.order < quad.panel_points || quad.order % quad.panel_points != 0)
        throw std::invalid_argument("box order must be a positive multiple of the panel size");
    const LogDet ld = log_det(b);
    if (ld.is_zero()) throw std::domain_error("matrix is not invertible");
    const Matrix Q = 2.0 * b.transpose() * b - Matrix::Identity(kappa, kappa);
    const auto u = kappa - d;

    ChiNormResult res;
    double log_pref = 2.0 * ld.log_abs - 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
    Matrix S = Q.topLeftCorner(d, d);
    Matrix cross;   // Q_uu^{-1} Q_ub
    Matrix whiten;  // L^{-T} with Q_uu = L L^T
    if (u > 0) {
        const Matrix Quu = Q.bottomRightCorner(u, u);
        res.min_eigenvalue = min_symmetric_eigenvalue(Quu);
        if (res.min_eigenvalue <= 1e-12) {
            res.divergent = true;
            res.value = res.log_value = std::numeric_limits<double>::infinity();
            return res;
        }
        Eigen::LLT<Matrix> llt(Quu);
        const Matrix Qub = Q.bottomLeftCorner(u, d);
        cross = llt.solve(Qub);
        S -= Qub.transpose() * cross;
        const double log_det_uu = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        log_pref -= 0.5 * log_det_uu;
        whiten = llt.matrixU().solve(Matrix::Identity(u, u));
    } else {
        res.min_eigenvalue = std::numeric_limits<double>::infinity();
    }

    // Gauss–Hermite factor for the unrestricted block: E_y[exp(-(W y)^T Q_ub x_b)],
    // which is exp(x_b^T Q_bu Q_uu^{-1} Q_ub x_b / 2) in closed form.
    const Rule1D* gh = (quad.method == ChiMethod::hermite && u > 0) ? &gauss_hermite(quad.hermite_order) : nullptr;
    auto unrestricted_log = [&](const Vector& xb) -> double {
        if (u == 0) return 0.0;
        if (!gh) return 0.0;  // already folded into S
        const Vector shift = Q.bottomLeftCorner(u, d) * xb;
        const Vector coef = whiten.transpose() * shift;
        std::vector<const Rule1D*> rules(static_cast<std::size_t>(u), gh);
        CompensatedSum s;
        for_each_tensor_point(rules, [&](const Vector& y, double w) { s.add(w * std::exp(-coef.dot(y))); });
        // undo the closed-form correction that S already contains
        return std::log(s.value()) - 0.5 * xb.dot(cross.transpose() * Q.bottomLeftCorner(u, d) * xb);
    };

    if (d == 0) {
        res.log_value = log_pref;
        res.value = std::exp(res.log_value);
        res.converged = true;
        return res;
    }

    auto evaluate = [&](std::size_t order) {
        const std::size_t panels = order / quad.panel_points;
        std::vector<Rule1D> rs;
        rs.reserve(static_cast<std::size_t>(d));
        for (Eigen::Index c = 0; c < d; ++c) {
            const auto [lo, hi] = box.sides[static_cast<std::size_t>(c)];
            rs.push_back(composite_legendre(lo, hi, panels, quad.panel_points));
        }
        std::vector<const Rule1D*> rules;
        for (const auto& r : rs) rules.push_back(&r);
        return detail::log_sum_exp([&](auto&& sink) {
            for_each_tensor_point(rules, [&](const Vector& x, double w) {
                sink(w, -0.5 * x.dot(S * x) + unrestricted_log(x));
            });
        });
    };

    auto nodes = [&](std::size_t order) {
        double n = 1.0;
        for (Eigen::Index c = 0; c < d; ++c) n *= static_cast<double>(order);
        return n;
    };

    std::size_t order = quad.order;
    double prev = evaluate(order);
    res.order = order;
    res.log_value = log_pref + prev;
    while (nodes(2 * order) <= static_cast<double>(quad.max_nodes)) {
        order *= 2;
        const double cur = evaluate(order);
        res.last_change = std::abs(std::expm1(cur - prev));
        res.order = order;
        res.log_value = log_pref + cur;
        prev = cur;
        if (res.last_change <= quad.tol) {
            res.converged = true;
            break;
        }
    }
    res.value = std::exp(res.log_value);
    return res;
}

/// ||chi_{box x R^{kappa-d}} h_{A^i}||^2 in L2(mu_G^kappa).
inline ChiNormResult chi_norm_sq(const Matrix& a, int i, const Box& box, const QuadSpec& quad = {}) {
    if (i < 1) throw std::invalid_argument("power must be at least 1");
    return chi_norm_sq_from_inverse(matrix_power(checked_inverse(a), i), box, quad);
}

// ---------------------------------------------------------------------------
// Diagonal closed form
// ---------------------------------------------------------------------------

/// Imaginary error function by its Maclaurin series (all terms positive).
inline double erfi(double z) {
    if (z < 0) return -erfi(-z);
    double term = z, sum = z;
    const double z2 = z * z;
    for (int n = 1; n < 500; ++n) {
        term *= z2 / n;
        const double add = term / (2.0 * n + 1.0);
        sum += add;
        if (add < 1e-17 * sum) break;
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

struct DiagClosedForm {
    double value = 0.0;
    double log_value = 0.0;
    double box_factor = 1.0;   ///< product over the first n+r coordinates
    double tail_factor = 1.0;  ///< prod_{j=n+r+1}^{l} (alpha_j^i sqrt(2 - alpha_j^{2i}))^{-1}
};

/// One-coordinate factor (1/a) * int_{-k}^{k} exp(-x^2 (1-a)/a) dmu_G^1
/// with a = alpha^{2i}.
inline double diag_box_factor(double alpha, int i, double k) {
    const double a = std::pow(alpha, 2 * i);
    const double c = (2.0 - a) / (2.0 * a);
    if (c > 0) return std::sqrt(a / (2.0 - a)) * std::erf(k * std::sqrt(c)) / a;
    if (c == 0) return 2.0 * k / std::sqrt(2.0 * std::numbers::pi) / a;
    return std::sqrt(a / (a - 2.0)) * erfi(k * std::sqrt(-c)) / a;
}

/// Closed form of ||chi_{[-k,k]^{n+r} x R^{l-n-r}} h_{A_l^i}||^2 for the
/// diagonal symbol diag(alpha_j); requires l >= n+r.
inline DiagClosedForm diag_closed_form(const std::function<double(std::size_t)>& alpha, int i,
                                       std::size_t n_plus_r, double k, std::size_t l) {
    if (i < 1) throw std::invalid_argument("power must be at least 1");
    if (l < n_plus_r) throw std::invalid_argument("truncation must cover the box coordinates");
    DiagClosedForm out;
    double log_box = 0.0, log_tail = 0.0;
    for (std::size_t j = 1; j <= l; ++j) {
        const double aj = alpha(j);
        if (!(aj > 0)) throw std::domain_error("alpha_" + std::to_string(j) + " must be positive");
        if (j <= n_plus_r) {
            log_box += std::log(diag_box_factor(aj, i, k));
        } else {
            const double rest = 2.0 - std::pow(aj, 2 * i);
            if (rest <= 0)
                throw std::domain_error("tail factor undefined: 2 - alpha_" + std::to_string(j) + "^(2i) <= 0");
            log_tail -= i * std::log(aj) + 0.5 * std::log(rest);
        }
    }
    out.box_factor = std::exp(log_box);
    out.tail_factor = std::exp(log_tail);
    out.log_value = log_box + log_tail;
    out.value = std::exp(out.log_value);
    return out;
}

// ---------------------------------------------------------------------------
// Infinite products
// ---------------------------------------------------------------------------

enum class ProductStatus { convergent, divergent_to_zero, indeterminate };

inline std::string to_string(ProductStatus s) {
    switch (s) {
        case ProductStatus::convergent: return "convergent";
        case ProductStatus::divergent_to_zero: return "divergent_to_zero";
        case ProductStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

/// Bounds on the tail beyond N: sum_{j>N} |1 - t_j| <= sum and
/// sup_{j>N} |1 - t_j| <= sup.
struct TailBound {
    double sum = 0.0;
    double sup = 0.0;
};

struct ProductCertificate {
    enum class Kind { summable, nonsummable };
    Kind kind = Kind::summable;
    std::function<TailBound(std::size_t)> tail;  ///< summable only
    std::string description;

    static ProductCertificate summable(std::function<TailBound(std::size_t)> tail, std::string description) {
        return {Kind::summable, std::move(tail), std::move(description)};
    }
    /// Caller asserts t_j in (0, 1] for all j and sum (1 - t_j) = infinity.
    static ProductCertificate nonsummable(std::string description) {
        return {Kind::nonsummable, {}, std::move(description)};
    }
    /// |1 - t_j| <= c r^j.
    static ProductCertificate geometric(double c, double r) {
        if (!(r > 0 && r < 1) || !(c >= 0)) throw std::invalid_argument("geometric certificate needs c >= 0, 0 < r < 1");
        return summable(
            [c, r](std::size_t N) {
                const double head = c * std::pow(r, static_cast<double>(N + 1));
                return TailBound{head / (1.0 - r), head};
            },
            "|1-t_j| <= c r^j");
    }
};

struct ProductResult {
    ProductStatus status = ProductStatus::indeterminate;
    double partial = 1.0;
    double log_partial = 0.0;
    double lower = 0.0;  ///< certified bounds for the full product (convergent case)
    double upper = std::numeric_limits<double>::infinity();
    double log_remainder_bound = std::numeric_limits<double>::infinity();
    std::size_t last = 0;
};

/// Partial product t_first * ... * t_last together with a classification
/// of the full product. With a summable certificate (R, u) at N = last and
/// u < 1, |log prod_{j>N} t_j| <= R / (1 - u).
inline ProductResult infinite_product(const std::function<double(std::size_t)>& t, std::size_t first,
                                      std::size_t last, const std::optional<ProductCertificate>& cert = {}) {
    if (last < first) throw std::invalid_argument("empty product window");
    ProductResult out;
    out.last = last;
    CompensatedSum log_sum;
    double abs_log_sum = 0.0;
    bool all_le_one = true;
    for (std::size_t j = first; j <= last; ++j) {
        const double tj = t(j);
        if (!(tj > 0)) throw std::domain_error("product terms must be positive (t_" + std::to_string(j) + ")");
        all_le_one = all_le_one && tj <= 1.0;
        const double lj = std::log(tj);
        log_sum.add(lj);
        abs_log_sum += std::abs(lj);
    }
    out.log_partial = log_sum.value();
    out.partial = std::exp(out.log_partial);
    if (!cert) return out;
    if (cert->kind == ProductCertificate::Kind::nonsummable) {
        if (!all_le_one) throw std::invalid_argument("nonsummable certificate requires terms in (0, 1]");
        out.status = ProductStatus::divergent_to_zero;
        out.lower = 0.0;
        out.upper = out.partial;
        return out;
    }
    const TailBound tb = cert->tail(last);
    if (!(tb.sup < 1.0) || !(tb.sum >= 0)) return out;
    const double eps = tb.sum / (1.0 - tb.sup);
    // one ulp per log term plus exp, so the bounds survive rounding
    const double ulp = std::numeric_limits<double>::epsilon();
    const double rounding = 2.0 * ulp * (abs_log_sum + 1.0);
    out.status = ProductStatus::convergent;
    out.log_remainder_bound = eps;
    out.lower = std::exp(out.log_partial - eps - rounding) * (1.0 - 2.0 * ulp);
    out.upper = std::exp(out.log_partial + eps + rounding) * (1.0 + 2.0 * ulp);
    return out;
}

// ---------------------------------------------------------------------------
// Poisson bounds and the singular-scaling construction
// ---------------------------------------------------------------------------

struct PoissonBounds {
    double lower = 0.0;         ///< 1 - exp(-a^2/2)
    double upper = 0.0;         ///< 1 - exp(-a^2)
    double box_mass_sq = 0.0;   ///< mu_G^1([-a, a])^2
    bool bracketed = false;     ///< strict lower < mass^2 < upper
};

inline PoissonBounds poisson_bounds(double a) {
    if (!(a > 0)) throw std::invalid_argument("poisson bounds need a > 0");
    PoissonBounds p;
    p.lower = -std::expm1(-0.5 * a * a);
    p.upper = -std::expm1(-a * a);
    const double ec = std::erfc(a / std::numbers::sqrt2);
    p.box_mass_sq = (1.0 - ec) * (1.0 - ec);
    // compare complements, which keeps precision when all three are near 1
    const double deficit = ec * (2.0 - ec);
    p.bracketed = std::exp(-0.5 * a * a) > deficit && deficit > std::exp(-a * a);
    return p;
}

struct SingularScalingReport {
    double alpha = 0.0;
    double beta = 0.0;              ///< x_n = (n+1)^{-beta}
    double sum_exponent = 0.0;      ///< beta: sum x_n converges iff > 1
    double root_exponent = 0.0;     ///< beta * sqrt(alpha): sum x_n^{sqrt(alpha)} diverges iff <= 1
    double q_exponent = 0.0;        ///< 2 alpha^2 beta: Q_N -> 0 iff <= 1
    std::size_t N = 0;
    std::vector<double> log_p;      ///< log P_n, n = 1..N
    std::vector<double> log_q;      ///< log Q_n
    double p_tail_sum_bound = 0.0;  ///< >= sum_{n>N} x_n
    double p_tail_sup = 0.0;        ///< x_{N+1}
    double p_infinity_lower = 0.0;  ///< certified lower bound of prod (1 - x_n)
    double log_q_upper_bound = 0.0; ///< integral-test upper bound for log Q_N
    bool p_monotone = true;
    bool q_monotone = true;
    bool q_divergence_certified = false;
    bool near_degenerate = false;
};

/// Partial products P_N = prod (1 - x_n) and Q_N = prod (1 - x_n^{2 alpha^2})
/// for x_n = (n+1)^{-beta}, beta = (1 + 1/sqrt(alpha))/2, so that
/// exp(-a_n^2/2) = x_n and exp(-alpha^2 a_n^2) = x_n^{2 alpha^2} with
/// a_n = sqrt(2 ln(1/x_n)).
inline SingularScalingReport singular_scaling_demo(double alpha, std::size_t N) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (N == 0) throw std::invalid_argument("N must be positive");
    SingularScalingReport r;
    r.alpha = alpha;
    r.N = N;
    r.beta = 0.5 * (1.0 + 1.0 / std::sqrt(alpha));
    r.sum_exponent = r.beta;
    r.root_exponent = r.beta * std::sqrt(alpha);
    r.q_exponent = 2.0 * alpha * alpha * r.beta;
    r.log_p.reserve(N);
    r.log_q.reserve(N);
    CompensatedSum lp, lq;
    for (std::size_t n = 1; n <= N; ++n) {
        const double logx = -r.beta * std::log(static_cast<double>(n + 1));
        const double dp = std::log1p(-std::exp(logx));
        const double dq = std::log1p(-std::exp(2.0 * alpha * alpha * logx));
        r.p_monotone = r.p_monotone && dp < 0;
        r.q_monotone = r.q_monotone && dq < 0;
        lp.add(dp);
        lq.add(dq);
        r.log_p.push_back(lp.value());
        r.log_q.push_back(lq.value());
    }
    const double Nd = static_cast<double>(N);
    r.p_tail_sum_bound = std::pow(Nd + 1.0, 1.0 - r.beta) / (r.beta - 1.0);
    r.p_tail_sup = std::pow(Nd + 2.0, -r.beta);
    r.p_infinity_lower = std::exp(r.log_p.back() - r.p_tail_sum_bound / (1.0 - r.p_tail_sup));
    const double e = r.q_exponent;
    r.q_divergence_certified = e <= 1.0;
    // log Q_N <= -sum_{m=2}^{N+1} m^{-e} <= -int_2^{N+2} t^{-e} dt
    r.log_q_upper_bound = std::abs(1.0 - e) < 1e-12
                              ? -(std::log(Nd + 2.0) - std::log(2.0))
                              : -(std::pow(Nd + 2.0, 1.0 - e) - std::pow(2.0, 1.0 - e)) / (1.0 - e);
    r.near_degenerate = r.beta - 1.0 < 0.05 || std::abs(1.0 - e) < 0.05;
    return r;
}

// ---------------------------------------------------------------------------
// Weighted sequence spaces
// ---------------------------------------------------------------------------

inline double ell2p_norm_sq(const Vector& x, const Vector& p) {
    if (x.size() != p.size()) throw std::invalid_argument("sequence and weights differ in length");
    CompensatedSum s;
    for (Eigen::Index j = 0; j < x.size(); ++j) s.add(x(j) * x(j) * p(j));
    return s.value();
}

/// l^kappa(p) with kappa in {1, 2}: sum |x_n|^kappa p_n < infinity.
class WeightedSeqSpace {
public:
    WeightedSeqSpace(int exponent, std::function<double(std::size_t)> weight, double weight_sum_bound)
        : exponent_(exponent), weight_(std::move(weight)), weight_sum_(weight_sum_bound) {
        if (exponent != 1 && exponent != 2) throw std::invalid_argument("exponent must be 1 or 2");
        if (!(weight_sum_bound > 0) || !std::isfinite(weight_sum_bound))
            throw std::invalid_argument("weights need a finite summability certificate");
    }
    /// Norm of a finitely supported sequence x_1..x_n.
    [[nodiscard]] double norm(const Vector& x) const {
        CompensatedSum s;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double w = weight_(static_cast<std::size_t>(j + 1));
            if (!(w > 0)) throw std::domain_error("weights must be positive");
            s.add(std::pow(std::abs(x(j)), exponent_) * w);
        }
        return exponent_ == 2 ? std::sqrt(s.value()) : s.value();
    }
    [[nodiscard]] double weight(std::size_t j) const { return weight_(j); }
    [[nodiscard]] double weight_sum_bound() const { return weight_sum_; }
    [[nodiscard]] int exponent() const { return exponent_; }

private:
    int exponent_;
    std::function<double(std::size_t)> weight_;
    double weight_sum_;
};

// ---------------------------------------------------------------------------
// Perturbation bound
// ---------------------------------------------------------------------------

struct PerturbationConstants {
    int power = 1;
    std::size_t bandwidth = 0;  ///< k * eta
    double row_factor = 1.0;    ///< ((1+S)^k - 1)/S: row bounds of b^k - I relative to alpha
    double c = 0.0;             ///< max(sup alpha/p, sup alpha), scaled by row_factor
    double shift_sq = 1.0;      ///< C^2 = max(1, M^{k eta}, m^{-k eta})
    double c_tilde = 0.0;       ///< (2w+1)^2 c^2 C^2 + 2 (2w+1) c C, w = k eta
    double c_tilde_two_factor = 0.0;  ///< 2 c^2 (2w+1) C^2 + 2 sqrt(2 c^2 (2w+1) C^2)
};

/// Constant in |sum x_j^2 - (b^k x)_j^2| <= C~ sum x_j^2 p_j. The power b^k
/// is again identity plus a symmetric (k eta)-banded perturbation whose row
/// bounds are alpha_i ((1+S)^k - 1)/S with S = sum alpha, since
/// |(bhat^m)_ij| <= S^{m-1} alpha_i.
inline PerturbationConstants perturbation_constants(const PerturbedIdentity& b, int k) {
    if (k < 1) throw std::invalid_argument("power must be at least 1");
    const auto& cert = b.certificates();
    if (!cert.ratio_bounds) throw std::invalid_argument("perturbation bound needs ratio bounds (m, M)");
    if (!cert.sup_alpha_over_weight) throw std::invalid_argument("perturbation bound needs sup alpha/p");
    if (!cert.sup_alpha) throw std::invalid_argument("perturbation bound needs sup alpha");
    PerturbationConstants pc;
    pc.power = k;
    pc.bandwidth = static_cast<std::size_t>(k) * b.bandwidth();
    const double S = cert.alpha_sum;
    pc.row_factor = (std::pow(1.0 + S, k) - 1.0) / S;
    pc.c = std::max(*cert.sup_alpha_over_weight, *cert.sup_alpha) * pc.row_factor;
    const auto [m, M] = *cert.ratio_bounds;
    const double w = static_cast<double>(pc.bandwidth);
    pc.shift_sq = std::max({1.0, std::pow(M, w), std::pow(m, -w)});
    const double width = 2.0 * w + 1.0;
    const double cc = pc.c * std::sqrt(pc.shift_sq);
    pc.c_tilde = width * width * cc * cc + 2.0 * width * cc;
    const double inner = 2.0 * pc.c * pc.c * width * pc.shift_sq;
    pc.c_tilde_two_factor = inner + 2.0 * std::sqrt(inner);
    return pc;
}

struct PerturbationCheck {
    PerturbationConstants constants;
    double worst_ratio = 0.0;  ///< max |LHS| / (C~ * RHS)
    double worst_ratio_two_factor = 0.0;
    std::size_t samples = 0;
    bool holds = true;
};

/// Checks the perturbation inequality for b^k on finitely supported x
/// (x_1..x_n with n = x.size()). b^k x is computed exactly on the finite
/// support.
inline PerturbationCheck perturbation_bound_check(const PerturbedIdentity& b, int k, const std::vector<Vector>& xs) {
    PerturbationCheck out;
    out.constants = perturbation_constants(b, k);
    const BandedSymbol full = b.full();
    const std::size_t eta = b.bandwidth();
    for (const Vector& x : xs) {
        const auto n = static_cast<std::size_t>(x.size());
        const std::size_t big = n + static_cast<std::size_t>(k) * eta;
        const Matrix M = full.window(big);
        Vector y = Vector::Zero(static_cast<Eigen::Index>(big));
        y.head(x.size()) = x;
        for (int step = 0; step < k; ++step) y = M * y;
        Vector p(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) p(j) = b.weight(static_cast<std::size_t>(j + 1));
        const double lhs = std::abs(x.squaredNorm() - y.squaredNorm());
        const double rhs = ell2p_norm_sq(x, p);
        if (rhs == 0.0) {
            if (lhs != 0.0) out.holds = false;
            ++out.samples;
            continue;
        }
        const double ratio = lhs / (out.constants.c_tilde * rhs);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        out.worst_ratio_two_factor = std::max(out.worst_ratio_two_factor, lhs / (out.constants.c_tilde_two_factor * rhs));
        ++out.samples;
    }
    out.holds = out.holds && out.worst_ratio <= 1.0;
    return out;
}

/// Seeded finitely supported sequences: `nonzeros` standard normal entries
/// on the leading coordinates.
inline std::vector<Vector> random_finite_sequences(std::size_t count, std::size_t nonzeros, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Vector> out(count, Vector(static_cast<Eigen::Index>(nonzeros)));
    for (auto& v : out)
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = nd(rng);
    return out;
}

}  // namespace cosub
