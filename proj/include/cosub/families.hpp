#pragma once

// Builtin symbol families: identity, diagonal rules, the diagonal family
// with summable deficits and the geometric tridiagonal perturbed identity.

#include "cosub/banded.hpp"
#include "cosub/checker.hpp"
#include "cosub/expr.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cosub {

/// Diagonal family diag(alpha_j); `tail_expr` (in N) bounds sum_{j>N} |1 - alpha_j|.
inline DiagonalData diagonal_data(const std::string& alpha_expr, const std::string& tail_expr = "") {
    const Expression alpha = Expression::parse(alpha_expr, "j");
    DiagonalData d;
    d.alpha = [alpha](std::size_t j) { return alpha(static_cast<double>(j)); };
    d.alpha_text = alpha_expr;
    if (!tail_expr.empty()) {
        const Expression tail = Expression::parse(tail_expr, "N");
        d.deficit_tail = [tail](std::size_t N) { return tail(static_cast<double>(N)); };
        d.tail_text = tail_expr;
    }
    return d;
}

inline SymbolFamily identity_family() {
    DiagonalData d;
    d.alpha = [](std::size_t) { return 1.0; };
    d.deficit_tail = [](std::size_t) { return 0.0; };
    d.alpha_text = "1";
    d.tail_text = "0";
    SymbolFamily f = SymbolFamily::from_diagonal(std::move(d));
    f.description = "identity";
    return f;
}

/// Identity plus the symmetric tridiagonal perturbation bhat_{j,j+1} = q^j,
/// with alpha_j = q^{j-1} and weights p_j = q^j.
inline PerturbedIdentity geometric_perturbed_identity(double q, std::size_t window = 12) {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("q must lie in (0, 1)");
    std::vector<Precondition> pre;
    const double limit = std::numbers::sqrt2 / 2.0;
    std::ostringstream os;
    os << "q=" << q << (q < limit ? " lies in" : " is outside") << " (0, sqrt(2)/2)";
    pre.push_back({"q∈(0, √2/2)", q < limit, os.str()});
    PerturbedIdentity::Certificates cert;
    cert.alpha_sum = 1.0 / (1.0 - q);
    cert.weight_sum = q / (1.0 - q);
    cert.ratio_bounds = std::make_pair(0.999 * q, 1.001 * q);
    cert.sup_alpha_over_weight = 1.0 / q;
    cert.sup_alpha = 1.0;
    std::ostringstream desc;
    desc << "ex59 q=" << q;
    return PerturbedIdentity(BandedSymbol::geometric_tridiagonal(q, 0.0).with_description(desc.str() + " perturbation"),
                             [q](std::size_t j) { return std::pow(q, static_cast<double>(j) - 1.0); },
                             [q](std::size_t j) { return std::pow(q, static_cast<double>(j)); }, cert, window,
                             std::move(pre));
}

/// Determinant floor 1 - q^2/(1 - q^2) of the geometric tridiagonal family.
inline double geometric_det_floor(double q) { return 1.0 - q * q / (1.0 - q * q); }

/// The composition symbol A = B^{-1} where B is induced by identity + bhat.
inline SymbolFamily geometric_family(double q) {
    SymbolFamily f = SymbolFamily::from_inverse_symbol(BandedSymbol::geometric_tridiagonal(q, 1.0));
    std::ostringstream os;
    os << "ex59 q=" << q;
    f.description = os.str();
    f.inverse_symbol = f.inverse_symbol->with_certificate({1.0, q});
    return f;
}

/// b = identity with bhat = 0, alpha_j = p_j = 2^{-j}.
inline PerturbedIdentity trivial_perturbed_identity(std::size_t window = 12) {
    PerturbedIdentity::Certificates cert;
    cert.alpha_sum = 1.0;
    cert.weight_sum = 1.0;
    cert.ratio_bounds = std::make_pair(0.49, 0.51);
    cert.sup_alpha_over_weight = 1.0;
    cert.sup_alpha = 0.5;
    return PerturbedIdentity(BandedSymbol::from_rule(SymbolKind::banded, 1, [](std::size_t, std::size_t) { return 0.0; },
                                                     "zero perturbation"),
                             [](std::size_t j) { return std::ldexp(1.0, -static_cast<int>(j)); },
                             [](std::size_t j) { return std::ldexp(1.0, -static_cast<int>(j)); }, cert, window);
}

}  // namespace cosub
