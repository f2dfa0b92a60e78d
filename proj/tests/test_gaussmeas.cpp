#include "cosub/gaussmeas.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cosub;

namespace {

Matrix random_well_conditioned(std::size_t k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Matrix A = Matrix::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) += u(rng);
    return A;
}

}  // namespace

TEST(Quadrature, HermiteMoments) {
    const Rule1D& r = gauss_hermite(12);
    double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double x = r.nodes[k], w = r.weights[k];
        m0 += w;
        m2 += w * x * x;
        m4 += w * std::pow(x, 4);
        m6 += w * std::pow(x, 6);
    }
    EXPECT_NEAR(m0, 1.0, 1e-14);
    EXPECT_NEAR(m2, 1.0, 1e-13);
    EXPECT_NEAR(m4, 3.0, 1e-12);
    EXPECT_NEAR(m6, 15.0, 1e-11);
}

TEST(Quadrature, CompositeLegendre) {
    const Rule1D r = composite_legendre(0.0, std::numbers::pi, 4);
    double s = 0;
    for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * std::sin(r.nodes[k]);
    EXPECT_NEAR(s, 2.0, 1e-14);
    EXPECT_THROW(composite_legendre(1.0, 0.0, 2), std::invalid_argument);
}

TEST(Quadrature, NormalMassOracle) {
    EXPECT_NEAR(centered_normal_mass(1.0), 0.682689492137086, 1e-15);
}

TEST(GaussianSpace, DensityIntegratesToOne) {
    EXPECT_NEAR(GaussianSpace(1).total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(GaussianSpace(2).total_mass(), 1.0, 1e-12);
    const auto xs = GaussianSpace(3).sample(4, 11);
    const auto ys = GaussianSpace(3).sample(4, 11);
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_EQ(xs[k], ys[k]);
}

TEST(RnDerivative, IdentityAndDiagonal) {
    const auto h = RnDerivative::of(Matrix::Identity(2, 2));
    EXPECT_DOUBLE_EQ(h.eval(Vector::Zero(2)), 1.0);
    Vector x(2);
    x << 0.3, -1.2;
    EXPECT_NEAR(h.eval(x), 1.0, 1e-15);
    Matrix A(1, 1);
    A << 0.5;
    const auto g = RnDerivative::of(A);
    EXPECT_DOUBLE_EQ(g.eval(Vector::Zero(1)), 2.0);
    Vector y(1);
    y << 0.2;
    // |det A^{-1}| exp((x^2 - 4x^2)/2)
    EXPECT_NEAR(g.eval(y), 2.0 * std::exp(-1.5 * 0.04), 1e-15);
    EXPECT_THROW(RnDerivative::of(Matrix::Zero(2, 2)), std::domain_error);
}

TEST(RnDerivative, PowerFactorization) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        const std::size_t k = 1 + t % 3;
        const Matrix A = random_well_conditioned(k, rng);
        const auto pts = GaussianSpace(k).sample(8, 100 + t);
        EXPECT_LT(rn_power_factorization_check(A, 1 + t % 4, pts), 1e-10);
    }
}

TEST(RnDerivative, TransportMassIsOne) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 6; ++t) {
        const Matrix A = random_well_conditioned(1 + t % 3, rng);
        EXPECT_NEAR(transport_mass(A), 1.0, 1e-10);
    }
}

TEST(ChiNorm, UnrestrictedDiagonalClosedForm) {
    Matrix A(1, 1);
    A << 0.5;
    const auto r = chi_norm_sq(A, 1, Box{});
    EXPECT_NEAR(r.value, 1.5118578920369089, 1e-12);
    EXPECT_NEAR(r.value, 1.0 / (0.5 * std::sqrt(1.75)), 1e-12);
}

TEST(ChiNorm, IdentityGivesBoxMass) {
    const auto r = chi_norm_sq(Matrix::Identity(2, 2), 1, Box::cube(1, 1.0));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 0.682689492137086, 1e-12);
}

TEST(ChiNorm, DivergentWhenExponentNotDefinite) {
    Matrix A(1, 1);
    A << 2.0;  // A^{-1} = 1/2, Q = 2/4 - 1 < 0
    const auto r = chi_norm_sq(A, 1, Box{});
    EXPECT_TRUE(r.divergent);
    EXPECT_TRUE(std::isinf(r.value));
    // restricted to a box the integral is finite
    EXPECT_FALSE(chi_norm_sq(A, 1, Box::cube(1, 1.0)).divergent);
}

TEST(ChiNorm, HermiteModeAgreesWithSchur) {
    Matrix A(3, 3);
    A << 1.0, 0.1, 0.0, 0.1, 0.9, 0.05, 0.0, 0.05, 1.1;
    QuadSpec h;
    h.method = ChiMethod::hermite;
    h.hermite_order = 20;
    const auto a = chi_norm_sq(A, 1, Box::cube(1, 1.5));
    const auto b = chi_norm_sq(A, 1, Box::cube(1, 1.5), h);
    EXPECT_NEAR(a.value, b.value, 1e-9 * a.value);
}

TEST(DiagClosedForm, MatchesQuadratureSmall) {
    const auto alpha = [](std::size_t j) { return 1.0 - std::ldexp(1.0, -static_cast<int>(j)); };
    for (int i = 1; i <= 2; ++i) {
        const auto cf = diag_closed_form(alpha, i, 2, 1.0, 4);
        Matrix A = Matrix::Zero(4, 4);
        for (std::size_t j = 1; j <= 4; ++j) A(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(j - 1)) = alpha(j);
        const auto q = chi_norm_sq(A, i, Box::cube(2, 1.0));
        EXPECT_LT(relative_difference(cf.value, q.value), 1e-9);
    }
}

TEST(DiagClosedForm, BoxFactorBranches) {
    // a = 1: plain box mass
    EXPECT_NEAR(diag_box_factor(1.0, 1, 1.0), 0.682689492137086, 1e-15);
    // a = 2 boundary vs its neighbours
    const double at = diag_box_factor(std::pow(2.0, 0.5), 1, 1.0);
    EXPECT_NEAR(at, 2.0 / std::sqrt(2.0 * std::numbers::pi) / 2.0, 1e-12);
    EXPECT_NEAR(diag_box_factor(std::pow(2.0, 0.5) * (1 + 1e-9), 1, 1.0), at, 1e-8);
    EXPECT_NEAR(diag_box_factor(std::pow(2.0, 0.5) * (1 - 1e-9), 1, 1.0), at, 1e-8);
    EXPECT_THROW(diag_closed_form([](std::size_t) { return 1.5; }, 1, 0, 1.0, 2), std::domain_error);
    EXPECT_THROW(diag_closed_form([](std::size_t) { return 0.5; }, 1, 3, 1.0, 2), std::invalid_argument);
}

TEST(InfiniteProduct, GeometricCertificate) {
    const auto p = infinite_product([](std::size_t j) { return 1.0 - std::ldexp(1.0, -static_cast<int>(j)); }, 1, 60,
                                    ProductCertificate::geometric(1.0, 0.5));
    EXPECT_EQ(p.status, ProductStatus::convergent);
    EXPECT_NEAR(p.partial, 0.2887880950866024, 1e-13);
    EXPECT_LE(p.lower, 0.2887880950866024);
    EXPECT_GE(p.upper, 0.2887880950866024);
}

TEST(InfiniteProduct, NonsummableAndIndeterminate) {
    const auto t = [](std::size_t j) { return 1.0 - 1.0 / (static_cast<double>(j) + 1.0); };
    const auto d = infinite_product(t, 1, 100, ProductCertificate::nonsummable("harmonic"));
    EXPECT_EQ(d.status, ProductStatus::divergent_to_zero);
    EXPECT_NEAR(d.partial, 1.0 / 101.0, 1e-14);
    EXPECT_EQ(infinite_product(t, 1, 100).status, ProductStatus::indeterminate);
    EXPECT_THROW(infinite_product([](std::size_t) { return 1.5; }, 1, 3, ProductCertificate::nonsummable("x")),
                 std::invalid_argument);
}

TEST(PoissonBounds, StrictBracket) {
    for (double a : {0.1, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        const auto p = poisson_bounds(a);
        EXPECT_TRUE(p.bracketed) << a;
        EXPECT_LT(p.lower, p.upper);
    }
    const auto p1 = poisson_bounds(1.0);
    EXPECT_NEAR(p1.lower, 1.0 - std::exp(-0.5), 1e-15);
    EXPECT_NEAR(p1.upper, 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(p1.box_mass_sq, 0.682689492137086 * 0.682689492137086, 1e-15);
    EXPECT_THROW(poisson_bounds(0.0), std::invalid_argument);
}

TEST(SingularScaling, DichotomyAtHalf) {
    const auto r = singular_scaling_demo(0.5, 2000);
    EXPECT_NEAR(r.beta, 0.5 * (1.0 + std::sqrt(2.0)), 1e-15);
    EXPECT_GT(r.sum_exponent, 1.0);
    EXPECT_LE(r.root_exponent, 1.0);
    EXPECT_TRUE(r.q_divergence_certified);
    EXPECT_TRUE(r.p_monotone);
    EXPECT_TRUE(r.q_monotone);
    EXPECT_LE(r.log_q.back(), r.log_q_upper_bound);
    EXPECT_THROW(singular_scaling_demo(1.0, 10), std::invalid_argument);
}

TEST(WeightedSeqSpace, Norms) {
    WeightedSeqSpace l2(2, [](std::size_t j) { return std::ldexp(1.0, -static_cast<int>(j)); }, 1.0);
    Vector x(2);
    x << 2.0, 2.0;
    EXPECT_NEAR(l2.norm(x), std::sqrt(2.0 + 1.0), 1e-15);
    WeightedSeqSpace l1(1, [](std::size_t) { return 1.0; }, 1.0);
    EXPECT_NEAR(l1.norm(x), 4.0, 1e-15);
    EXPECT_THROW(WeightedSeqSpace(3, [](std::size_t) { return 1.0; }, 1.0), std::invalid_argument);
}
