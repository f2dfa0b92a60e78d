#pragma once

// Infinite real matrix symbols with finite bandwidth or block-3-diagonal
// structure: truncations, blocks, powers, determinants and class tests.
//
// All indices in this header are 1-based, matching the usual matrix
// notation a_{ij}; storage inside Eigen matrices is 0-based.

#include "cosub/expr.hpp"
#include "cosub/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cosub {

// ---------------------------------------------------------------------------
// BlockPartition
// ---------------------------------------------------------------------------

/// Strictly increasing sequence s(1) < s(2) < ... of positive integers with
/// the convention s(0) = 0. Either finitely materialized or the unbounded
/// arithmetic rule s(k) = k * step.
class BlockPartition {
public:
    explicit BlockPartition(std::vector<std::size_t> s) : s_(std::move(s)) {
        std::size_t prev = 0;
        for (std::size_t k = 0; k < s_.size(); ++k) {
            if (s_[k] <= prev)
                throw std::invalid_argument("partition must be strictly increasing positive integers (at position " +
                                            std::to_string(k + 1) + ")");
            prev = s_[k];
        }
    }

    static BlockPartition uniform(std::size_t step = 1) {
        if (step == 0) throw std::invalid_argument("partition step must be positive");
        BlockPartition p{std::vector<std::size_t>{}};
        p.step_ = step;
        return p;
    }

    [[nodiscard]] std::size_t operator()(std::size_t k) const {
        if (k == 0) return 0;
        if (step_) return k * *step_;
        if (k > s_.size())
            throw std::out_of_range("partition index " + std::to_string(k) + " exceeds materialized length " +
                                    std::to_string(s_.size()));
        return s_[k - 1];
    }

    /// Materialized length; nullopt for rule-based (unbounded) partitions.
    [[nodiscard]] std::optional<std::size_t> length() const {
        if (step_) return std::nullopt;
        return s_.size();
    }
    [[nodiscard]] bool has_index(std::size_t k) const { return step_.has_value() || k <= s_.size(); }

    [[nodiscard]] std::size_t block_size(std::size_t p) const { return (*this)(p) - (*this)(p - 1); }

    /// Block index p with s(p-1) < i <= s(p).
    [[nodiscard]] std::size_t block_of(std::size_t i) const {
        if (i == 0) throw std::out_of_range("coordinate indices are 1-based");
        if (step_) return (i + *step_ - 1) / *step_;
        for (std::size_t k = 0; k < s_.size(); ++k)
            if (i <= s_[k]) return k + 1;
        throw std::out_of_range("coordinate beyond materialized partition");
    }

    [[nodiscard]] std::string describe() const {
        if (step_) return *step_ == 1 ? "s(k)=k" : "s(k)=" + std::to_string(*step_) + "k";
        std::ostringstream os;
        for (std::size_t k = 0; k < s_.size(); ++k) os << (k ? " " : "") << s_[k];
        return os.str();
    }

private:
    std::vector<std::size_t> s_;
    std::optional<std::size_t> step_;
};

// ---------------------------------------------------------------------------
// BandedSymbol
// ---------------------------------------------------------------------------

enum class SymbolKind { diagonal, banded, block3diag };

inline std::string to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::diagonal: return "diagonal";
        case SymbolKind::banded: return "banded";
        case SymbolKind::block3diag: return "block3diag";
    }
    return "?";
}

inline SymbolKind parse_symbol_kind(const std::string& s) {
    if (s == "diagonal") return SymbolKind::diagonal;
    if (s == "banded") return SymbolKind::banded;
    if (s == "block3diag") return SymbolKind::block3diag;
    throw std::invalid_argument("unknown symbol kind '" + s + "'");
}

/// How entries beyond a finite window are defined.
///  - rule: generator symbol, defined everywhere;
///  - zero: explicit entries, everything not listed is zero;
///  - none: a materialized window of a larger object; reading beyond it is an error.
enum class Extension { rule, zero, none };

/// Certificate |a_{ij}| <= C * lambda^{|i-j|}.
struct DecayCertificate {
    double C = 1.0;
    double lambda = 0.5;
};

struct Triplet {
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
};

class BandedSymbol {
public:
    using Rule = std::function<double(std::size_t, std::size_t)>;

    /// Generator symbol. `rule` is only queried for |i-j| <= eta (all (i,j)
    /// for block3diag) and must be a pure function.
    static BandedSymbol from_rule(SymbolKind kind, std::size_t eta, Rule rule, std::string description) {
        if (kind == SymbolKind::diagonal && eta != 0) throw std::invalid_argument("diagonal symbol must have bandwidth 0");
        BandedSymbol s;
        s.kind_ = kind;
        s.eta_ = eta;
        s.rule_ = std::move(rule);
        s.ext_ = Extension::rule;
        s.description_ = std::move(description);
        return s;
    }

    static BandedSymbol diagonal(std::function<double(std::size_t)> alpha, std::string description = "diagonal") {
        return from_rule(
            SymbolKind::diagonal, 0, [alpha = std::move(alpha)](std::size_t i, std::size_t) { return alpha(i); },
            std::move(description));
    }

    static BandedSymbol identity() {
        return diagonal([](std::size_t) { return 1.0; }, "identity");
    }

    /// Tridiagonal symbol with constant diagonal and a_{j,j+1} = a_{j+1,j} = q^j.
    static BandedSymbol geometric_tridiagonal(double q, double diag = 1.0) {
        std::ostringstream os;
        os << "geometric tridiagonal q=" << q << " diag=" << diag;
        return from_rule(
            SymbolKind::banded, 1,
            [q, diag](std::size_t i, std::size_t j) {
                if (i == j) return diag;
                return std::pow(q, static_cast<double>(std::min(i, j)));
            },
            os.str());
    }

    /// Explicit entries. With Extension::zero every unlisted entry is zero;
    /// with Extension::none the symbol is only defined on [1, window]^2.
    static BandedSymbol from_triplets(SymbolKind kind, std::size_t eta, const std::vector<Triplet>& entries,
                                      Extension ext = Extension::zero, std::optional<std::size_t> window = {}) {
        if (ext == Extension::rule) throw std::invalid_argument("explicit symbols cannot use rule extension");
        if (kind == SymbolKind::diagonal && eta != 0) throw std::invalid_argument("diagonal symbol must have bandwidth 0");
        auto table = std::make_shared<std::map<std::pair<std::size_t, std::size_t>, double>>();
        std::size_t max_index = 0;
        for (const auto& t : entries) {
            if (t.i == 0 || t.j == 0) throw std::invalid_argument("matrix indices are 1-based");
            const std::size_t dist = t.i > t.j ? t.i - t.j : t.j - t.i;
            if (kind != SymbolKind::block3diag && dist > eta && t.value != 0.0)
                throw std::invalid_argument("entry (" + std::to_string(t.i) + "," + std::to_string(t.j) +
                                            ") lies outside bandwidth " + std::to_string(eta));
            if (!table->emplace(std::make_pair(t.i, t.j), t.value).second)
                throw std::invalid_argument("duplicate entry (" + std::to_string(t.i) + "," + std::to_string(t.j) + ")");
            max_index = std::max({max_index, t.i, t.j});
        }
        if (ext == Extension::none && !window) window = max_index;
        if (window && max_index > *window) throw std::invalid_argument("entry outside declared window");
        BandedSymbol s;
        s.kind_ = kind;
        s.eta_ = eta;
        s.ext_ = ext;
        s.window_ = window;
        s.rule_ = [table](std::size_t i, std::size_t j) {
            auto it = table->find({i, j});
            return it == table->end() ? 0.0 : it->second;
        };
        s.description_ = "explicit " + std::to_string(entries.size()) + " entries";
        return s;
    }

    /// Leading n x n window given as a dense matrix.
    static BandedSymbol from_window(const Matrix& m, SymbolKind kind, std::size_t eta, Extension ext,
                                    std::string description = "materialized window") {
        if (m.rows() != m.cols()) throw std::invalid_argument("window must be square");
        auto data = std::make_shared<Matrix>(m);
        BandedSymbol s;
        s.kind_ = kind;
        s.eta_ = eta;
        s.ext_ = ext;
        s.window_ = static_cast<std::size_t>(m.rows());
        s.rule_ = [data](std::size_t i, std::size_t j) {
            return (*data)(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
        };
        s.description_ = std::move(description);
        return s;
    }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        if (i == 0 || j == 0) throw std::out_of_range("matrix indices are 1-based");
        if (window_ && (i > *window_ || j > *window_)) {
            if (ext_ == Extension::none)
                throw std::out_of_range("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") outside materialized window " + std::to_string(*window_));
            return 0.0;
        }
        if (kind_ != SymbolKind::block3diag) {
            const std::size_t dist = i > j ? i - j : j - i;
            if (dist > eta_) return 0.0;
        }
        return rule_(i, j);
    }

    /// Leading n x n corner.
    [[nodiscard]] Matrix window(std::size_t n) const { return sub(1, n, 1, n); }

    /// Rows r0..r1, columns c0..c1 (inclusive, 1-based). Empty ranges give
    /// zero-sized matrices.
    [[nodiscard]] Matrix sub(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
        const auto rows = static_cast<Eigen::Index>(r1 >= r0 ? r1 - r0 + 1 : 0);
        const auto cols = static_cast<Eigen::Index>(c1 >= c0 ? c1 - c0 + 1 : 0);
        Matrix m = Matrix::Zero(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const std::size_t i = r0 + static_cast<std::size_t>(r);
            std::size_t jlo = c0, jhi = c1;
            if (kind_ != SymbolKind::block3diag) {
                jlo = std::max(c0, i > eta_ ? i - eta_ : std::size_t{1});
                jhi = std::min(c1, i + eta_);
            }
            for (std::size_t j = jlo; j <= jhi && j >= c0; ++j) m(r, static_cast<Eigen::Index>(j - c0)) = (*this)(i, j);
        }
        return m;
    }

    [[nodiscard]] SymbolKind kind() const { return kind_; }
    [[nodiscard]] std::size_t bandwidth() const { return eta_; }
    [[nodiscard]] Extension extension() const { return ext_; }
    [[nodiscard]] std::optional<std::size_t> materialized_window() const { return window_; }
    [[nodiscard]] const std::optional<DecayCertificate>& certificate() const { return cert_; }
    [[nodiscard]] const std::string& description() const { return description_; }

    [[nodiscard]] BandedSymbol with_certificate(DecayCertificate c) const {
        if (!(c.C > 0) || !(c.lambda > 0 && c.lambda < 1))
            throw std::invalid_argument("decay certificate needs C > 0 and lambda in (0,1)");
        BandedSymbol s = *this;
        s.cert_ = c;
        return s;
    }

    [[nodiscard]] BandedSymbol with_description(std::string d) const {
        BandedSymbol s = *this;
        s.description_ = std::move(d);
        return s;
    }

    [[nodiscard]] BandedSymbol scaled(double factor) const {
        BandedSymbol s = *this;
        s.rule_ = [inner = rule_, factor](std::size_t i, std::size_t j) { return factor * inner(i, j); };
        s.cert_.reset();
        s.description_ = description_ + " (scaled)";
        return s;
    }

    /// Window size needed to read rows/cols up to n of this symbol.
    [[nodiscard]] bool readable_up_to(std::size_t n) const {
        return !(window_ && ext_ == Extension::none && n > *window_);
    }

private:
    BandedSymbol() = default;

    SymbolKind kind_ = SymbolKind::banded;
    std::size_t eta_ = 0;
    Rule rule_;
    Extension ext_ = Extension::rule;
    std::optional<std::size_t> window_;
    std::optional<DecayCertificate> cert_;
    std::string description_;
};

// ---------------------------------------------------------------------------
// Truncations and blocks
// ---------------------------------------------------------------------------

/// Leading s(p) x s(p) corner a_p.
inline Matrix truncate(const BandedSymbol& a, const BlockPartition& s, std::size_t p) {
    if (p == 0 || !s.has_index(p)) throw std::out_of_range("partition index " + std::to_string(p) + " out of range");
    return a.window(s(p));
}

/// Block a_{pq}: rows s(p-1)+1..s(p), columns s(q-1)+1..s(q); the zero
/// matrix of that shape when |p-q| > 1.
inline Matrix block(const BandedSymbol& a, const BlockPartition& s, std::size_t p, std::size_t q) {
    if (p == 0 || q == 0 || !s.has_index(p) || !s.has_index(q))
        throw std::out_of_range("partition index out of range");
    const std::size_t r0 = s(p - 1) + 1, r1 = s(p), c0 = s(q - 1) + 1, c1 = s(q);
    if ((p > q ? p - q : q - p) > 1)
        return Matrix::Zero(static_cast<Eigen::Index>(r1 - r0 + 1), static_cast<Eigen::Index>(c1 - c0 + 1));
    return a.sub(r0, r1, c0, c1);
}

/// Numerical rank: singular values below tol * sigma_max count as zero.
inline std::size_t numerical_rank(const Matrix& m, double tol, double* sigma_max = nullptr) {
    if (m.size() == 0) {
        if (sigma_max) *sigma_max = 0.0;
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (sigma_max) *sigma_max = smax;
    if (smax == 0.0) return 0;
    std::size_t r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > tol * smax) ++r;
    return r;
}

struct BlockRank {
    std::size_t p = 0;  ///< block a_{p,p+1}
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t rank = 0;
    double sigma_max = 0.0;
    bool admissible = false;  ///< rank in {0, rows}
};

struct StructuralViolation {
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
};

struct ClassFReport {
    bool member = false;
    bool structural_ok = false;
    std::optional<StructuralViolation> violation;  ///< first nonzero outside the allowed blocks
    std::vector<BlockRank> ranks;
};

/// Membership test for the block-3-diagonal class on the window s(K): the
/// zero pattern a_{ij} = a_{ji} = 0 for i in block n and j > s(n+1), and
/// rank a_{p,p+1} in {0, s(p)-s(p-1)} for p <= K-1. Pattern violations are
/// reported separately from rank failures.
inline ClassFReport in_class_F(const BandedSymbol& a, const BlockPartition& s, std::size_t K, double tol = 1e-10) {
    if (K == 0 || !s.has_index(K)) throw std::out_of_range("partition index out of range");
    ClassFReport rep;
    rep.structural_ok = true;
    const std::size_t n_max = s(K);
    for (std::size_t n = 1; n + 1 < K && rep.structural_ok; ++n) {
        for (std::size_t i = s(n - 1) + 1; i <= s(n) && rep.structural_ok; ++i) {
            for (std::size_t j = s(n + 1) + 1; j <= n_max; ++j) {
                const double aij = a(i, j), aji = a(j, i);
                if (aij != 0.0) {
                    rep.violation = StructuralViolation{i, j, aij};
                    rep.structural_ok = false;
                    break;
                }
                if (aji != 0.0) {
                    rep.violation = StructuralViolation{j, i, aji};
                    rep.structural_ok = false;
                    break;
                }
            }
        }
    }
    bool ranks_ok = true;
    for (std::size_t p = 1; p < K; ++p) {
        const Matrix b = block(a, s, p, p + 1);
        BlockRank br;
        br.p = p;
        br.rows = static_cast<std::size_t>(b.rows());
        br.cols = static_cast<std::size_t>(b.cols());
        br.rank = numerical_rank(b, tol, &br.sigma_max);
        br.admissible = br.rank == 0 || br.rank == br.rows;
        ranks_ok = ranks_ok && br.admissible;
        rep.ranks.push_back(br);
    }
    rep.member = rep.structural_ok && ranks_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// Determinants
// ---------------------------------------------------------------------------

enum class DetMethod { automatic, recursion, factorization };

/// Three-term continuant det of leading corners 1..n of a tridiagonal
/// symbol, carried with a running log scale.
inline std::vector<LogDet> tridiagonal_determinants(const BandedSymbol& a, std::size_t n) {
    std::vector<LogDet> out;
    out.reserve(n);
    // D_k = d_cur * exp(scale), D_{k-1} = d_prev * exp(scale)
    double d_prev = 1.0, d_cur = 1.0, scale = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        double next = a(k, k) * d_cur;
        if (k >= 2) next -= a(k, k - 1) * a(k - 1, k) * d_prev;
        d_prev = d_cur;
        d_cur = next;
        if (d_cur == 0.0) {
            out.push_back(LogDet::zero());
        } else {
            out.push_back({d_cur > 0 ? 1 : -1, std::log(std::abs(d_cur)) + scale});
        }
        const double big = std::max(std::abs(d_cur), std::abs(d_prev));
        if (big > 1e100 || (big < 1e-100 && big > 0.0)) {
            d_cur /= big;
            d_prev /= big;
            scale += std::log(big);
        }
    }
    return out;
}

/// det a_p for p = 1..K. Tridiagonal symbols use the continuant recursion
/// (unless factorization is forced); everything else uses pivoted LU in
/// log-magnitude form. Exact zero determinants are returned, not thrown.
inline std::vector<LogDet> det_sequence(const BandedSymbol& a, const BlockPartition& s, std::size_t K,
                                        DetMethod method = DetMethod::automatic) {
    if (K == 0) return {};
    if (!s.has_index(K)) throw std::out_of_range("partition index out of range");
    const bool tridiagonal = a.kind() != SymbolKind::block3diag && a.bandwidth() <= 1;
    if (method == DetMethod::recursion && !tridiagonal)
        throw std::invalid_argument("recursion determinants need a tridiagonal symbol");
    std::vector<LogDet> out;
    out.reserve(K);
    if (tridiagonal && method != DetMethod::factorization) {
        const auto all = tridiagonal_determinants(a, s(K));
        for (std::size_t p = 1; p <= K; ++p) out.push_back(all[s(p) - 1]);
        return out;
    }
    for (std::size_t p = 1; p <= K; ++p) out.push_back(log_det(truncate(a, s, p)));
    return out;
}

// ---------------------------------------------------------------------------
// Powers
// ---------------------------------------------------------------------------

/// k-th power of the infinite matrix, exact on [1, window]^2: computed by
/// repeated squaring on a window enlarged by k*eta so no path through
/// truncated indices is lost.
inline BandedSymbol power(const BandedSymbol& a, int k, std::size_t window) {
    if (k < 1) throw std::invalid_argument("power exponent must be positive");
    const std::size_t eta = a.bandwidth();
    std::size_t big = window + static_cast<std::size_t>(k) * eta;
    if (!a.readable_up_to(big)) {
        if (a.readable_up_to(window)) big = *a.materialized_window();
        else throw std::out_of_range("power window exceeds materialized symbol");
    }
    const Matrix full = matrix_power(a.window(big), k);
    const auto w = static_cast<Eigen::Index>(window);
    const SymbolKind kind = a.kind() == SymbolKind::diagonal ? SymbolKind::diagonal : SymbolKind::banded;
    return BandedSymbol::from_window(full.topLeftCorner(w, w), kind, static_cast<std::size_t>(k) * eta,
                                     Extension::none, a.description() + "^" + std::to_string(k));
}

// ---------------------------------------------------------------------------
// Decay certificates
// ---------------------------------------------------------------------------

struct DecayCheck {
    bool holds = true;
    std::optional<StructuralViolation> first_violation;
    double worst_ratio = 0.0;  ///< max |a_ij| / (C lambda^{|i-j|})
};

/// Checks |a_ij| <= C lambda^{|i-j|} on [1, window]^2.
inline DecayCheck decay_certificate_check(const BandedSymbol& a, std::size_t window) {
    if (!a.certificate()) throw std::invalid_argument("symbol carries no decay certificate");
    const auto [C, lambda] = *a.certificate();
    const Matrix m = a.window(window);
    DecayCheck out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = std::abs(m(i, j));
            if (v == 0.0) continue;
            const double bound = C * std::pow(lambda, static_cast<double>(std::abs(i - j)));
            out.worst_ratio = std::max(out.worst_ratio, v / bound);
            if (v > bound && out.holds) {
                out.holds = false;
                out.first_violation =
                    StructuralViolation{static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1), m(i, j)};
            }
        }
    }
    return out;
}

/// Smallest C with |a_ij| <= C lambda^{|i-j|} on the window. For a banded
/// symbol with bounded entries this is at most max|a_ij| * lambda^{-eta}.
inline DecayCertificate auto_certificate(const BandedSymbol& a, std::size_t window, double lambda = 0.5) {
    const Matrix m = a.window(window);
    double C = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            C = std::max(C, std::abs(m(i, j)) / std::pow(lambda, static_cast<double>(std::abs(i - j))));
    return {C > 0 ? C : 1.0, lambda};
}

// ---------------------------------------------------------------------------
// PerturbedIdentity
// ---------------------------------------------------------------------------

/// Named family-specific precondition carried alongside a symbol.
struct Precondition {
    std::string name;
    bool holds = true;
    std::string detail;
};

/// b = (delta_ij + bhat_ij) with a symmetric eta-banded perturbation bhat,
/// row bounds |bhat_ij| <= alpha_i and weights p with ratio bounds (m, M).
/// Certified constants (series sums and suprema) are upper bounds for the
/// whole infinite sequences; they are spot-checked on the materialized
/// window at construction and whenever the window grows.
class PerturbedIdentity {
public:
    struct Certificates {
        double alpha_sum = 0.0;   ///< >= sum_j alpha_j
        double weight_sum = 0.0;  ///< >= sum_j p_j
        std::optional<std::pair<double, double>> ratio_bounds;  ///< (m, M): p_{j+1}/p_j in (m, M)
        std::optional<double> sup_alpha_over_weight;
        std::optional<double> sup_alpha;
    };

    PerturbedIdentity(BandedSymbol perturbation, std::function<double(std::size_t)> row_bound,
                      std::function<double(std::size_t)> weight, Certificates cert, std::size_t window,
                      std::vector<Precondition> preconditions = {})
        : bhat_(std::move(perturbation)),
          alpha_(std::move(row_bound)),
          p_(std::move(weight)),
          cert_(std::move(cert)),
          window_(window),
          preconditions_(std::move(preconditions)) {
        validate();
    }

    [[nodiscard]] PerturbedIdentity grown(std::size_t new_window) const {
        PerturbedIdentity g = *this;
        g.window_ = new_window;
        g.validate();
        return g;
    }

    [[nodiscard]] const BandedSymbol& perturbation() const { return bhat_; }
    [[nodiscard]] double row_bound(std::size_t i) const { return alpha_(i); }
    [[nodiscard]] double weight(std::size_t i) const { return p_(i); }
    [[nodiscard]] const Certificates& certificates() const { return cert_; }
    [[nodiscard]] std::size_t window() const { return window_; }
    [[nodiscard]] std::size_t bandwidth() const { return bhat_.bandwidth(); }
    [[nodiscard]] const std::vector<Precondition>& preconditions() const { return preconditions_; }

    /// The full symbol delta + bhat.
    [[nodiscard]] BandedSymbol full() const {
        return BandedSymbol::from_rule(
            SymbolKind::banded, bhat_.bandwidth(),
            [bhat = bhat_](std::size_t i, std::size_t j) { return (i == j ? 1.0 : 0.0) + bhat(i, j); },
            "identity + (" + bhat_.description() + ")");
    }

private:
    void validate() const {
        if (window_ == 0) throw std::invalid_argument("validation window must be positive");
        if (bhat_.kind() == SymbolKind::block3diag) throw std::invalid_argument("perturbation must be banded");
        if (!(cert_.alpha_sum > 0) || !std::isfinite(cert_.alpha_sum))
            throw std::invalid_argument("row bounds need a finite summability certificate");
        if (!(cert_.weight_sum > 0) || !std::isfinite(cert_.weight_sum))
            throw std::invalid_argument("weights need a finite summability certificate");
        if (cert_.ratio_bounds) {
            const auto [m, M] = *cert_.ratio_bounds;
            if (!(0 < m && m < M)) throw std::invalid_argument("ratio bounds need 0 < m < M");
        }
        const Matrix w = bhat_.window(window_);
        const double rel = 1e-14;
        CompensatedSum sa, sp;
        for (std::size_t i = 1; i <= window_; ++i) {
            const double ai = alpha_(i), pi = p_(i);
            if (!(ai > 0)) throw std::invalid_argument("row bound alpha_" + std::to_string(i) + " must be positive");
            if (!(pi > 0)) throw std::invalid_argument("weight p_" + std::to_string(i) + " must be positive");
            sa.add(ai);
            sp.add(pi);
            if (cert_.ratio_bounds) {
                const double ratio = p_(i + 1) / pi;
                const auto [m, M] = *cert_.ratio_bounds;
                if (!(ratio > m && ratio < M))
                    throw std::invalid_argument("p_{j+1}/p_j outside (m, M) at j=" + std::to_string(i));
            }
            if (cert_.sup_alpha_over_weight && ai / pi > *cert_.sup_alpha_over_weight * (1 + rel))
                throw std::invalid_argument("sup alpha/p certificate violated at j=" + std::to_string(i));
            if (cert_.sup_alpha && ai > *cert_.sup_alpha * (1 + rel))
                throw std::invalid_argument("sup alpha certificate violated at j=" + std::to_string(i));
            for (std::size_t j = 1; j <= window_; ++j) {
                const double bij = w(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
                const double bji = w(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(i - 1));
                if (std::abs(bij - bji) > rel * std::max(std::abs(bij), std::abs(bji)))
                    throw std::invalid_argument("perturbation not symmetric at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
                if (std::abs(bij) > ai * (1 + rel))
                    throw std::invalid_argument("|bhat_ij| <= alpha_i violated at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
            }
        }
        if (sa.value() > cert_.alpha_sum * (1 + 1e-12))
            throw std::invalid_argument("partial sum of alpha exceeds its certificate");
        if (sp.value() > cert_.weight_sum * (1 + 1e-12))
            throw std::invalid_argument("partial sum of p exceeds its certificate");
    }

    BandedSymbol bhat_;
    std::function<double(std::size_t)> alpha_;
    std::function<double(std::size_t)> p_;
    Certificates cert_;
    std::size_t window_;
    std::vector<Precondition> preconditions_;
};

struct EntryBoundCheck {
    bool holds = true;
    int power = 1;
    double alpha_sum = 0.0;
    double worst_ratio = 0.0;  ///< max |(bhat^k)_ij| / (S^{k-1} alpha_i)
    std::size_t worst_i = 0;
    std::size_t worst_j = 0;
};

/// |(bhat^k)_ij| <= (sum alpha)^{k-1} alpha_i on [1, window]^2, using the
/// certified alpha sum. The comparison allows only floating-point rounding
/// of the k-fold product (relative 1e-13).
inline EntryBoundCheck power_entry_bound_check(const PerturbedIdentity& b, int k, std::size_t window) {
    const BandedSymbol pk = power(b.perturbation(), k, window);
    const Matrix m = pk.window(window);
    EntryBoundCheck out;
    out.power = k;
    out.alpha_sum = b.certificates().alpha_sum;
    const double factor = std::pow(out.alpha_sum, k - 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double bound = factor * b.row_bound(static_cast<std::size_t>(i + 1));
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double ratio = std::abs(m(i, j)) / bound;
            if (ratio > out.worst_ratio) {
                out.worst_ratio = ratio;
                out.worst_i = static_cast<std::size_t>(i + 1);
                out.worst_j = static_cast<std::size_t>(j + 1);
            }
        }
    }
    out.holds = out.worst_ratio <= 1.0 + 1e-13;
    return out;
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------
//
// Matrix file:
//   <kind> <eta>
//   rule identity | rule diag <expr in j> | rule geometric <q> [diag]
//   -- or --
//   i j value          (one triplet per line, zero extension)
// Lines starting with '#' are comments.
//
// Partition file: whitespace-separated strictly increasing positive integers.

inline BandedSymbol parse_symbol(std::istream& in) {
    std::string line;
    std::optional<std::pair<SymbolKind, std::size_t>> header;
    std::vector<Triplet> triplets;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> BandedSymbol {
        throw std::invalid_argument("matrix file line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (!header) {
            std::string kind;
            long long eta = -1;
            if (!(ls >> kind >> eta) || eta < 0) return fail("expected header '<kind> <eta>'");
            header = std::make_pair(parse_symbol_kind(kind), static_cast<std::size_t>(eta));
            continue;
        }
        std::string word;
        ls >> word;
        if (word == "rule") {
            if (!triplets.empty()) return fail("cannot mix rule and triplets");
            std::string name;
            ls >> name;
            std::string rest;
            std::getline(ls, rest);
            const auto [kind, eta] = *header;
            if (name == "identity") return BandedSymbol::identity();
            if (name == "diag") {
                if (kind != SymbolKind::diagonal) return fail("diag rule needs kind 'diagonal'");
                const Expression e = Expression::parse(rest, "j");
                return BandedSymbol::diagonal([e](std::size_t j) { return e(static_cast<double>(j)); },
                                              "diag " + rest);
            }
            if (name == "geometric") {
                std::istringstream ps(rest);
                double q = 0.0, d = 1.0;
                if (!(ps >> q)) return fail("geometric rule needs q");
                ps >> d;
                if (eta != 1) return fail("geometric rule is tridiagonal (eta = 1)");
                return BandedSymbol::geometric_tridiagonal(q, d);
            }
            return fail("unknown rule '" + name + "'");
        }
        std::istringstream ts(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(ts >> i >> j >> v) || i < 1 || j < 1) return fail("expected triplet 'i j value'");
        triplets.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), v});
    }
    if (!header) throw std::invalid_argument("matrix file: missing header");
    return BandedSymbol::from_triplets(header->first, header->second, triplets, Extension::zero);
}

inline BandedSymbol load_symbol(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file '" + path + "'");
    return parse_symbol(in).with_description("file " + path);
}

inline BlockPartition parse_partition(std::istream& in) {
    std::vector<std::size_t> s;
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size() || v < 1) throw std::invalid_argument("partition entries must be positive integers");
        s.push_back(static_cast<std::size_t>(v));
    }
    if (s.empty()) throw std::invalid_argument("partition file is empty");
    return BlockPartition(std::move(s));
}

inline BlockPartition load_partition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open partition file '" + path + "'");
    return parse_partition(in);
}

}  // namespace cosub
