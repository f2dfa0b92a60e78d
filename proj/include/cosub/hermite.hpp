#pragma once

// Truncated tensor Hermite basis of L2(mu_G^kappa), cylindrical functions
// in that basis and the actions of C_A (f -> f o A) and its adjoint
// S = C_A^* (f -> h_A * (f o A^{-1})).
//
// Every inner product of the form <S^a f, S^b g> with polynomial f, g is a
// Gaussian integral with a polynomial integrand after whitening, so it is
// evaluated exactly by Gauss–Hermite quadrature of sufficient order.

#include "cosub/gaussmeas.hpp"
#include "cosub/linalg.hpp"
#include "cosub/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace cosub {

using MultiIndex = std::vector<int>;

/// Orthonormal products of probabilists' Hermite polynomials h_beta with
/// |beta| <= D, in graded lexicographic order (degree ascending, then the
/// first coordinate descending).
class HermiteModel {
public:
    static std::shared_ptr<const HermiteModel> create(std::size_t kappa, int degree, std::size_t order = 0) {
        if (kappa == 0 || kappa > 4) throw std::invalid_argument("model dimension must be in 1..4");
        if (degree < 0) throw std::invalid_argument("degree must be nonnegative");
        return std::shared_ptr<const HermiteModel>(
            new HermiteModel(kappa, degree, order ? order : static_cast<std::size_t>(degree) + 2));
    }

    [[nodiscard]] std::size_t dim() const { return kappa_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] std::size_t order() const { return order_; }
    [[nodiscard]] std::size_t size() const { return indices_.size(); }
    [[nodiscard]] const MultiIndex& index(std::size_t k) const { return indices_.at(k); }
    [[nodiscard]] int total_degree(std::size_t k) const { return totals_.at(k); }

    [[nodiscard]] std::optional<std::size_t> find(const MultiIndex& beta) const {
        auto it = lookup_.find(beta);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// Values of all basis functions at x.
    [[nodiscard]] Vector basis_values(const Vector& x) const {
        if (static_cast<std::size_t>(x.size()) != kappa_) throw std::invalid_argument("point has wrong dimension");
        // table(c, t) = h_t(x_c)
        Matrix table(static_cast<Eigen::Index>(kappa_), degree_ + 1);
        for (std::size_t c = 0; c < kappa_; ++c) {
            const auto cc = static_cast<Eigen::Index>(c);
            double prev = 0.0, cur = 1.0;
            table(cc, 0) = 1.0;
            for (int t = 0; t < degree_; ++t) {
                const double next = (x(cc) * cur - std::sqrt(static_cast<double>(t)) * prev) / std::sqrt(t + 1.0);
                prev = cur;
                cur = next;
                table(cc, t + 1) = cur;
            }
        }
        Vector out(static_cast<Eigen::Index>(size()));
        for (std::size_t k = 0; k < size(); ++k) {
            double v = 1.0;
            for (std::size_t c = 0; c < kappa_; ++c) v *= table(static_cast<Eigen::Index>(c), indices_[k][c]);
            out(static_cast<Eigen::Index>(k)) = v;
        }
        return out;
    }

    /// Gram matrix of the basis under mu_G by the model's tensor rule.
    [[nodiscard]] Matrix quadrature_gram() const {
        const Rule1D& r = gauss_hermite(order_);
        std::vector<const Rule1D*> rules(kappa_, &r);
        const auto n = static_cast<Eigen::Index>(size());
        Matrix G = Matrix::Zero(n, n);
        for_each_tensor_point(rules, [&](const Vector& x, double w) {
            const Vector v = basis_values(x);
            G.noalias() += w * v * v.transpose();
        });
        return G;
    }

private:
    HermiteModel(std::size_t kappa, int degree, std::size_t order) : kappa_(kappa), degree_(degree), order_(order) {
        for (int t = 0; t <= degree; ++t) {
            MultiIndex cur(kappa, 0);
            enumerate(cur, 0, t);
        }
        for (std::size_t k = 0; k < indices_.size(); ++k) lookup_[indices_[k]] = k;
    }

    void enumerate(MultiIndex& cur, std::size_t pos, int remaining) {
        if (pos + 1 == kappa_) {
            cur[pos] = remaining;
            indices_.push_back(cur);
            int tot = 0;
            for (int v : cur) tot += v;
            totals_.push_back(tot);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            cur[pos] = v;
            enumerate(cur, pos + 1, remaining - v);
        }
    }

    std::size_t kappa_;
    int degree_;
    std::size_t order_;
    std::vector<MultiIndex> indices_;
    std::vector<int> totals_;
    std::map<MultiIndex, std::size_t> lookup_;
};

using ModelPtr = std::shared_ptr<const HermiteModel>;

/// Element of the truncated space: coefficients over the model basis.
class CylFunction {
public:
    CylFunction(ModelPtr model, Vector coef) : model_(std::move(model)), coef_(std::move(coef)) {
        if (!model_) throw std::invalid_argument("null model");
        if (static_cast<std::size_t>(coef_.size()) != model_->size())
            throw std::invalid_argument("coefficient vector does not match model size");
    }

    static CylFunction zero(ModelPtr model) {
        const auto n = static_cast<Eigen::Index>(model->size());
        return {std::move(model), Vector::Zero(n)};
    }
    static CylFunction basis(ModelPtr model, std::size_t k) {
        CylFunction f = zero(std::move(model));
        f.coef_(static_cast<Eigen::Index>(k)) = 1.0;
        return f;
    }
    /// Unit-norm function with standard normal coefficients.
    template <class Rng>
    static CylFunction random_unit(ModelPtr model, Rng& rng) {
        std::normal_distribution<double> nd;
        Vector c(static_cast<Eigen::Index>(model->size()));
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = nd(rng);
        c /= c.norm();
        return {std::move(model), c};
    }

    [[nodiscard]] const ModelPtr& model() const { return model_; }
    [[nodiscard]] const Vector& coefficients() const { return coef_; }
    [[nodiscard]] double eval(const Vector& x) const { return coef_.dot(model_->basis_values(x)); }
    [[nodiscard]] double norm_sq() const { return coef_.squaredNorm(); }
    [[nodiscard]] double norm() const { return coef_.norm(); }

    /// Highest total degree carrying a nonzero coefficient (-1 for zero).
    [[nodiscard]] int degree() const {
        int d = -1;
        for (std::size_t k = 0; k < model_->size(); ++k)
            if (coef_(static_cast<Eigen::Index>(k)) != 0.0) d = std::max(d, model_->total_degree(k));
        return d;
    }

    /// Same function in a model of the same dimension and degree >= this degree.
    [[nodiscard]] CylFunction embed(const ModelPtr& target) const {
        if (target->dim() != model_->dim()) throw std::invalid_argument("model dimension mismatch");
        CylFunction out = zero(target);
        for (std::size_t k = 0; k < model_->size(); ++k) {
            const double c = coef_(static_cast<Eigen::Index>(k));
            if (c == 0.0) continue;
            const auto pos = target->find(model_->index(k));
            if (!pos) throw std::invalid_argument("target model too small to embed function");
            out.coef_(static_cast<Eigen::Index>(*pos)) = c;
        }
        return out;
    }

    friend CylFunction operator+(const CylFunction& a, const CylFunction& b) {
        a.require_same(b);
        return {a.model_, a.coef_ + b.coef_};
    }
    friend CylFunction operator-(const CylFunction& a, const CylFunction& b) {
        a.require_same(b);
        return {a.model_, a.coef_ - b.coef_};
    }
    friend CylFunction operator*(double s, const CylFunction& a) { return {a.model_, s * a.coef_}; }
    CylFunction operator-() const { return {model_, -coef_}; }

    void require_same(const CylFunction& o) const {
        if (model_ != o.model_) throw std::invalid_argument("cylindrical functions live in different models");
    }

private:
    ModelPtr model_;
    Vector coef_;
};

// ---------------------------------------------------------------------------
// Gaussian rules matched to a quadratic exponent
// ---------------------------------------------------------------------------

/// Points x and weights w with sum w F(x) = (2 pi)^{-k/2} e^{log_factor}
/// int F(x) exp(-x^T P x / 2) dx for polynomial F of degree <= 2*order - 1.
struct MatchedRule {
    std::vector<Vector> points;
    std::vector<double> weights;
};

inline MatchedRule matched_rule(const Matrix& P, double log_factor, std::size_t order) {
    Eigen::LLT<Matrix> llt(P);
    if (llt.info() != Eigen::Success || min_symmetric_eigenvalue(P) <= 1e-12)
        throw std::domain_error("Gaussian integral diverges: exponent matrix not positive definite");
    const auto k = P.rows();
    const Matrix T = llt.matrixU().solve(Matrix::Identity(k, k));  // L^{-T}
    const double log_det_p = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double scale = std::exp(log_factor - 0.5 * log_det_p);
    const Rule1D& r = gauss_hermite(order);
    std::vector<const Rule1D*> rules(static_cast<std::size_t>(k), &r);
    MatchedRule out;
    for_each_tensor_point(rules, [&](const Vector& y, double w) {
        out.points.push_back(T * y);
        out.weights.push_back(scale * w);
    });
    return out;
}

inline std::size_t exact_order(int total_degree) { return static_cast<std::size_t>(std::max(total_degree, 0) / 2 + 1); }

/// <S^a f, S^b g> where S^a f = h_{A^a} (f o A^{-a}); the maps are given by
/// their inverses Ba = A^{-a}, Bb = A^{-b}. Exact for polynomial f, g.
inline double weighted_inner(const Matrix& Ba, const CylFunction& f, const Matrix& Bb, const CylFunction& g,
                             std::size_t min_order = 0) {
    const auto k = Ba.rows();
    const Matrix P = Ba.transpose() * Ba + Bb.transpose() * Bb - Matrix::Identity(k, k);
    const double lf = log_det(Ba).log_abs + log_det(Bb).log_abs;
    const MatchedRule rule =
        matched_rule(P, lf, std::max(min_order, exact_order(std::max(f.degree(), 0) + std::max(g.degree(), 0))));
    CompensatedSum s;
    for (std::size_t q = 0; q < rule.points.size(); ++q)
        s.add(rule.weights[q] * f.eval(Ba * rule.points[q]) * g.eval(Bb * rule.points[q]));
    return s.value();
}

/// <C_A^a f, C_A^b g> = E[f(A^a x) g(A^b x)], maps given as matrices Ma, Mb.
inline double plain_inner(const Matrix& Ma, const CylFunction& f, const Matrix& Mb, const CylFunction& g,
                          std::size_t min_order = 0) {
    const auto k = Ma.rows();
    const MatchedRule rule = matched_rule(Matrix::Identity(k, k), 0.0,
                                          std::max(min_order, exact_order(std::max(f.degree(), 0) + std::max(g.degree(), 0))));
    CompensatedSum s;
    for (std::size_t q = 0; q < rule.points.size(); ++q)
        s.add(rule.weights[q] * f.eval(Ma * rule.points[q]) * g.eval(Mb * rule.points[q]));
    return s.value();
}

/// <S^a f, S^b g> for the adjoint S = C_A^*; throws std::domain_error when
/// the integral diverges.
inline double adjoint_power_inner(const Matrix& A, int a, const CylFunction& f, int b, const CylFunction& g) {
    if (a < 0 || b < 0) throw std::invalid_argument("powers must be nonnegative");
    const Matrix Binv = checked_inverse(A);
    return weighted_inner(matrix_power(Binv, a), f, matrix_power(Binv, b), g);
}

/// <C_A^a f, C_A^b g>.
inline double composition_power_inner(const Matrix& A, int a, const CylFunction& f, int b, const CylFunction& g) {
    if (a < 0 || b < 0) throw std::invalid_argument("powers must be nonnegative");
    return plain_inner(matrix_power(A, a), f, matrix_power(A, b), g);
}

// ---------------------------------------------------------------------------
// Projected actions
// ---------------------------------------------------------------------------

struct ProjectedAction {
    CylFunction value;
    double image_norm_sq = 0.0;  ///< exact squared norm of the unprojected image
    double leakage = 0.0;        ///< image_norm_sq - ||value||^2 (mass outside the target model)
    bool quadrature_ok = true;   ///< coefficients stable under doubling the rule order
};

namespace detail {

template <class Coefficients>
ProjectedAction project(const ModelPtr& target, double image_norm_sq, Coefficients&& coefficients_at_order,
                        std::size_t base_order) {
    const Vector c1 = coefficients_at_order(base_order);
    const Vector c2 = coefficients_at_order(2 * base_order);
    ProjectedAction out{CylFunction(target, c1), image_norm_sq, image_norm_sq - c1.squaredNorm(), true};
    out.quadrature_ok = (c1 - c2).cwiseAbs().maxCoeff() <= 1e-8;
    return out;
}

}  // namespace detail

/// Projection of S f = h_A (f o A^{-1}) onto a model of degree `target_degree`.
/// Coefficients are <S f, H_beta> = <f, H_beta o A>, exact polynomial
/// integrals; the leakage is the part of ||S f||^2 outside the model.
inline ProjectedAction adjoint_apply(const Matrix& A, const CylFunction& f, int target_degree) {
    const ModelPtr& src = f.model();
    if (static_cast<std::size_t>(A.rows()) != src->dim()) throw std::invalid_argument("matrix and model dimension differ");
    const ModelPtr target = HermiteModel::create(src->dim(), target_degree, src->order());
    const Matrix B = checked_inverse(A);
    const double norm_sq = weighted_inner(B, f, B, f);
    const Matrix P = B.transpose() * B;
    const double lf = log_det(B).log_abs;
    auto coeffs = [&](std::size_t order) {
        const MatchedRule rule = matched_rule(P, lf, order);
        Vector c = Vector::Zero(static_cast<Eigen::Index>(target->size()));
        for (std::size_t q = 0; q < rule.points.size(); ++q)
            c += rule.weights[q] * f.eval(B * rule.points[q]) * target->basis_values(rule.points[q]);
        return c;
    };
    return detail::project(target, norm_sq, coeffs,
                           std::max(src->order(), exact_order(std::max(f.degree(), 0) + target_degree)));
}

/// Projection of C_A f = f o A onto a model of degree `target_degree`.
/// Composition with a linear map preserves degree, so the leakage vanishes
/// whenever target_degree >= deg f.
inline ProjectedAction composition_apply(const Matrix& A, const CylFunction& f, int target_degree) {
    const ModelPtr& src = f.model();
    if (static_cast<std::size_t>(A.rows()) != src->dim()) throw std::invalid_argument("matrix and model dimension differ");
    const ModelPtr target = HermiteModel::create(src->dim(), target_degree, src->order());
    const auto k = A.rows();
    const double norm_sq = plain_inner(A, f, A, f);
    auto coeffs = [&](std::size_t order) {
        const MatchedRule rule = matched_rule(Matrix::Identity(k, k), 0.0, order);
        Vector c = Vector::Zero(static_cast<Eigen::Index>(target->size()));
        for (std::size_t q = 0; q < rule.points.size(); ++q)
            c += rule.weights[q] * f.eval(A * rule.points[q]) * target->basis_values(rule.points[q]);
        return c;
    };
    return detail::project(target, norm_sq, coeffs,
                           std::max(src->order(), exact_order(std::max(f.degree(), 0) + target_degree)));
}

/// S^i f by i successive projections, degree head-room pad per step.
struct ProjectedPower {
    CylFunction value;
    std::vector<double> leakage;  ///< per step
    bool quadrature_ok = true;
};

inline ProjectedPower adjoint_power_projected(const Matrix& A, const CylFunction& f, int i, int pad) {
    ProjectedPower out{f, {}, true};
    for (int step = 0; step < i; ++step) {
        ProjectedAction a = adjoint_apply(A, out.value, out.value.model()->degree() + pad);
        out.leakage.push_back(a.leakage);
        out.quadrature_ok = out.quadrature_ok && a.quadrature_ok;
        out.value = a.value;
    }
    return out;
}

/// Matrix of coefficient inner products <f_i, g_j>; all functions must
/// share one model.
inline Matrix gram(const std::vector<CylFunction>& fs, const std::vector<CylFunction>& gs) {
    Matrix G(static_cast<Eigen::Index>(fs.size()), static_cast<Eigen::Index>(gs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = 0; j < gs.size(); ++j) {
            fs[i].require_same(gs[j]);
            G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fs[i].coefficients().dot(gs[j].coefficients());
        }
    return G;
}

/// Inner product by the model's tensor quadrature (independent of the
/// coefficient dot product).
inline double quadrature_inner(const CylFunction& f, const CylFunction& g) {
    f.require_same(g);
    const Rule1D& r = gauss_hermite(std::max(f.model()->order(), exact_order(2 * f.model()->degree())));
    std::vector<const Rule1D*> rules(f.model()->dim(), &r);
    CompensatedSum s;
    for_each_tensor_point(rules, [&](const Vector& x, double w) { s.add(w * f.eval(x) * g.eval(x)); });
    return s.value();
}

}  // namespace cosub
