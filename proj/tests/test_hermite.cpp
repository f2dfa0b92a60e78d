#include "cosub/hermite.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cosub;

TEST(HermiteModel, SizeAndOrdering) {
    const auto m = HermiteModel::create(2, 3);
    EXPECT_EQ(m->size(), 10u);
    EXPECT_EQ(m->index(0), (MultiIndex{0, 0}));
    EXPECT_EQ(m->index(1), (MultiIndex{1, 0}));
    EXPECT_EQ(m->index(2), (MultiIndex{0, 1}));
    EXPECT_EQ(m->total_degree(9), 3);
    EXPECT_TRUE(m->find({2, 1}).has_value());
    EXPECT_FALSE(m->find({4, 0}).has_value());
    EXPECT_THROW(HermiteModel::create(5, 2), std::invalid_argument);
    EXPECT_THROW(HermiteModel::create(1, -1), std::invalid_argument);
}

TEST(HermiteModel, OrthonormalUnderQuadrature) {
    for (std::size_t k = 1; k <= 3; ++k) {
        const auto m = HermiteModel::create(k, 6);
        const Matrix G = m->quadrature_gram();
        EXPECT_LT((G - Matrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-12) << "kappa=" << k;
    }
}

TEST(CylFunction, ArithmeticAndEmbedding) {
    const auto m = HermiteModel::create(2, 2);
    const auto big = HermiteModel::create(2, 4);
    const auto f = CylFunction::basis(m, 3);
    const auto g = CylFunction::basis(m, 1);
    EXPECT_DOUBLE_EQ((f + g).norm_sq(), 2.0);
    EXPECT_DOUBLE_EQ((2.0 * f - g).norm_sq(), 5.0);
    EXPECT_EQ(f.degree(), 2);
    EXPECT_EQ(CylFunction::zero(m).degree(), -1);
    const auto fe = f.embed(big);
    Vector x(2);
    x << 0.7, -0.4;
    EXPECT_NEAR(fe.eval(x), f.eval(x), 1e-15);
    EXPECT_THROW(f + fe, std::invalid_argument);
    EXPECT_THROW(CylFunction::basis(big, 14).embed(m), std::invalid_argument);
}

TEST(CylFunction, QuadratureInnerAgreesWithCoefficients) {
    std::mt19937_64 rng(3);
    const auto m = HermiteModel::create(2, 5);
    const auto f = CylFunction::random_unit(m, rng);
    const auto g = CylFunction::random_unit(m, rng);
    EXPECT_NEAR(quadrature_inner(f, g), f.coefficients().dot(g.coefficients()), 1e-13);
}

TEST(AdjointAction, AdjointIdentity) {
    // <S f, g> = <f, C_A g> for S = C_A^*
    std::mt19937_64 rng(17);
    Matrix A(2, 2);
    A << 0.8, 0.2, -0.1, 0.9;
    const auto m = HermiteModel::create(2, 4);
    for (int t = 0; t < 5; ++t) {
        const auto f = CylFunction::random_unit(m, rng);
        const auto g = CylFunction::random_unit(m, rng);
        const double lhs = adjoint_power_inner(A, 1, f, 0, g);
        const double rhs = composition_power_inner(A, 0, f, 1, g);
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
}

TEST(AdjointAction, NormOfSfOneDimensional) {
    // A = 1/2: ||S 1||^2 = 1/(alpha sqrt(2 - alpha^2)) with alpha = 1/2
    Matrix A(1, 1);
    A << 0.5;
    const auto m = HermiteModel::create(1, 0);
    const auto one = CylFunction::basis(m, 0);
    EXPECT_NEAR(adjoint_power_inner(A, 1, one, 1, one), 1.5118578920369089, 1e-12);
}

TEST(AdjointAction, DivergentPowerThrows) {
    Matrix A(1, 1);
    A << 2.0;
    const auto one = CylFunction::basis(HermiteModel::create(1, 0), 0);
    EXPECT_THROW(adjoint_power_inner(A, 1, one, 1, one), std::domain_error);
}

TEST(ProjectedActions, CompositionHasNoLeakage) {
    std::mt19937_64 rng(4);
    Matrix A(2, 2);
    A << 0.6, 0.1, 0.0, 0.4;
    const auto m = HermiteModel::create(2, 4);
    const auto f = CylFunction::random_unit(m, rng);
    const auto pa = composition_apply(A, f, 4);
    EXPECT_TRUE(pa.quadrature_ok);
    EXPECT_NEAR(pa.leakage, 0.0, 1e-12);
    EXPECT_NEAR(pa.value.norm_sq(), plain_inner(A, f, A, f), 1e-12);
}

TEST(ProjectedActions, AdjointProjectionMatchesInnerProducts) {
    std::mt19937_64 rng(8);
    Matrix A(1, 1);
    A << 0.7;
    const auto m = HermiteModel::create(1, 3);
    const auto f = CylFunction::random_unit(m, rng);
    const auto pa = adjoint_apply(A, f, 9);
    EXPECT_GE(pa.leakage, -1e-12);
    EXPECT_LE(pa.value.norm_sq(), pa.image_norm_sq + 1e-12);
    // projection coefficients are <S f, h_beta>
    const auto target = pa.value.model();
    for (std::size_t k = 0; k < target->size(); ++k) {
        const auto hb = CylFunction::basis(target, k);
        EXPECT_NEAR(pa.value.coefficients()(static_cast<Eigen::Index>(k)), adjoint_power_inner(A, 1, f, 0, hb), 1e-10);
    }
}

TEST(ProjectedActions, PowerLeakageRecorded) {
    Matrix A(1, 1);
    A << 0.5;
    const auto f = CylFunction::basis(HermiteModel::create(1, 2), 2);
    const auto pp = adjoint_power_projected(A, f, 2, 4);
    ASSERT_EQ(pp.leakage.size(), 2u);
    EXPECT_GT(pp.leakage[0], 0.0);
    EXPECT_EQ(pp.value.model()->degree(), 10);
}

TEST(MatchedRule, RejectsIndefinite) {
    Matrix P(2, 2);
    P << 1.0, 0.0, 0.0, -0.5;
    EXPECT_THROW(matched_rule(P, 0.0, 3), std::domain_error);
}
