#include "cosub/banded.hpp"
#include "cosub/families.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cosub;

TEST(BlockPartition, UniformAndExplicit) {
    const auto u = BlockPartition::uniform();
    EXPECT_EQ(u(0), 0u);
    EXPECT_EQ(u(7), 7u);
    EXPECT_EQ(u.block_of(5), 5u);
    const BlockPartition s({2, 3, 6});
    EXPECT_EQ(s(2), 3u);
    EXPECT_EQ(s.block_size(3), 3u);
    EXPECT_EQ(s.block_of(4), 3u);
    EXPECT_THROW(s(4), std::out_of_range);
    EXPECT_THROW(BlockPartition({2, 2}), std::invalid_argument);
    EXPECT_THROW(BlockPartition::uniform(0), std::invalid_argument);
}

TEST(BandedSymbol, GeometricWindowAndBlock) {
    const auto b = BandedSymbol::geometric_tridiagonal(0.5);
    const Matrix w = b.window(2);
    EXPECT_DOUBLE_EQ(w(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(w(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(w(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(w(1, 1), 1.0);
    const Matrix blk = block(b, BlockPartition::uniform(), 1, 2);
    ASSERT_EQ(blk.rows(), 1);
    EXPECT_DOUBLE_EQ(blk(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(b(3, 4), 0.125);
    EXPECT_DOUBLE_EQ(b(1, 3), 0.0);
    EXPECT_EQ(block(b, BlockPartition::uniform(), 1, 3).norm(), 0.0);
}

TEST(BandedSymbol, TripletValidation) {
    EXPECT_THROW(BandedSymbol::from_triplets(SymbolKind::banded, 1, {{1, 3, 1.0}}), std::invalid_argument);
    EXPECT_THROW(BandedSymbol::from_triplets(SymbolKind::banded, 1, {{1, 1, 1.0}, {1, 1, 2.0}}), std::invalid_argument);
    EXPECT_THROW(BandedSymbol::from_triplets(SymbolKind::banded, 1, {{0, 1, 1.0}}), std::invalid_argument);
    const auto t = BandedSymbol::from_triplets(SymbolKind::banded, 1, {{1, 1, 2.0}, {1, 2, 3.0}}, Extension::none);
    EXPECT_DOUBLE_EQ(t(1, 2), 3.0);
    EXPECT_THROW(t(3, 3), std::out_of_range);
}

TEST(ClassF, GeometricTridiagonalIsMember) {
    const auto rep = in_class_F(BandedSymbol::geometric_tridiagonal(0.5), BlockPartition::uniform(), 8);
    EXPECT_TRUE(rep.member);
    for (const auto& br : rep.ranks) EXPECT_EQ(br.rank, 1u);
}

TEST(ClassF, RankBreakFails) {
    // blocks of size 2; a_{1,2} has rank 1 < 2
    Matrix m = Matrix::Identity(6, 6);
    m(0, 2) = 1.0;
    m(1, 2) = 1.0;
    const auto a = BandedSymbol::from_window(m, SymbolKind::block3diag, 0, Extension::zero);
    const auto rep = in_class_F(a, BlockPartition::uniform(2), 3);
    EXPECT_TRUE(rep.structural_ok);
    EXPECT_FALSE(rep.member);
    EXPECT_EQ(rep.ranks[0].rank, 1u);
    EXPECT_FALSE(rep.ranks[0].admissible);
}

TEST(ClassF, StructuralViolationReported) {
    Matrix m = Matrix::Identity(5, 5);
    m(0, 3) = 0.25;
    const auto a = BandedSymbol::from_window(m, SymbolKind::block3diag, 0, Extension::zero);
    const auto rep = in_class_F(a, BlockPartition::uniform(), 5);
    EXPECT_FALSE(rep.structural_ok);
    ASSERT_TRUE(rep.violation.has_value());
    EXPECT_EQ(rep.violation->i, 1u);
    EXPECT_EQ(rep.violation->j, 4u);
}

TEST(Determinants, GeometricHalfFirstTerms) {
    const auto d = det_sequence(BandedSymbol::geometric_tridiagonal(0.5), BlockPartition::uniform(), 3);
    EXPECT_NEAR(d[0].value(), 1.0, 1e-15);
    EXPECT_NEAR(d[1].value(), 0.75, 1e-15);
    EXPECT_NEAR(d[2].value(), 0.6875, 1e-15);
}

TEST(Determinants, RecursionMatchesFactorization) {
    const auto b = BandedSymbol::geometric_tridiagonal(0.6);
    const auto s = BlockPartition::uniform();
    const auto r = det_sequence(b, s, 30, DetMethod::recursion);
    const auto f = det_sequence(b, s, 30, DetMethod::factorization);
    for (std::size_t k = 0; k < r.size(); ++k) EXPECT_NEAR(r[k].value(), f[k].value(), 1e-12);
}

TEST(Determinants, RecursionNeedsTridiagonal) {
    const auto a = BandedSymbol::from_rule(SymbolKind::banded, 2, [](std::size_t, std::size_t) { return 0.1; }, "band2");
    EXPECT_THROW(det_sequence(a, BlockPartition::uniform(), 4, DetMethod::recursion), std::invalid_argument);
}

TEST(Determinants, SingularTruncationReturnsZero) {
    Matrix m(2, 2);
    m << 1, 1, 1, 1;
    const auto a = BandedSymbol::from_window(m, SymbolKind::banded, 1, Extension::none);
    const auto d = det_sequence(a, BlockPartition::uniform(), 2, DetMethod::factorization);
    EXPECT_TRUE(d[1].is_zero());
}

TEST(Powers, SquareOfGeometricPerturbation) {
    const double q = 0.5;
    const auto bhat = BandedSymbol::geometric_tridiagonal(q, 0.0);
    const auto p2 = power(bhat, 2, 5);
    EXPECT_NEAR(p2(1, 1), q * q, 1e-15);
    EXPECT_NEAR(p2(1, 3), q * q * q, 1e-15);
    EXPECT_EQ(p2.bandwidth(), 2u);
    // row 5 needs column 6 of the original: the enlarged window keeps it exact
    EXPECT_NEAR(p2(5, 5), std::pow(q, 8) + std::pow(q, 10), 1e-15);
}

TEST(Powers, EntryBoundHoldsForGeometricData) {
    const auto b = geometric_perturbed_identity(0.5);
    for (int k = 1; k <= 4; ++k) EXPECT_TRUE(power_entry_bound_check(b, k, 12).holds) << "k=" << k;
}

TEST(Decay, CertificateCheck) {
    const auto b = BandedSymbol::geometric_tridiagonal(0.5).with_certificate({1.0, 0.5});
    EXPECT_TRUE(decay_certificate_check(b, 20).holds);
    const auto bad = BandedSymbol::geometric_tridiagonal(0.5).with_certificate({1.0, 0.1});
    const auto r = decay_certificate_check(bad, 20);
    EXPECT_FALSE(r.holds);
    ASSERT_TRUE(r.first_violation.has_value());
    EXPECT_THROW(BandedSymbol::identity().with_certificate({1.0, 1.5}), std::invalid_argument);
    EXPECT_THROW(decay_certificate_check(BandedSymbol::identity(), 3), std::invalid_argument);
}

TEST(PerturbedIdentity, RejectsViolatedRowBound) {
    PerturbedIdentity::Certificates c;
    c.alpha_sum = 2.0;
    c.weight_sum = 1.0;
    EXPECT_THROW(PerturbedIdentity(BandedSymbol::geometric_tridiagonal(0.5, 0.0),
                                   [](std::size_t j) { return std::pow(0.5, static_cast<double>(j) + 1.0); },
                                   [](std::size_t j) { return std::pow(0.5, static_cast<double>(j)); }, c, 8),
                 std::invalid_argument);
}

TEST(PerturbedIdentity, GrowingRevalidates) {
    const auto b = geometric_perturbed_identity(0.3);
    EXPECT_NO_THROW(b.grown(100));
    EXPECT_EQ(b.grown(100).window(), 100u);
}

TEST(TextFormat, TripletsAndRules) {
    std::istringstream t("# tridiagonal\nbanded 1\n1 1 1.0\n1 2 0.5\n2 1 0.5\n2 2 1.0\n");
    const auto a = parse_symbol(t);
    EXPECT_DOUBLE_EQ(a(1, 2), 0.5);
    EXPECT_DOUBLE_EQ(a(3, 3), 0.0);
    std::istringstream r("diagonal 0\nrule diag 1-2^-j\n");
    const auto d = parse_symbol(r);
    EXPECT_DOUBLE_EQ(d(3, 3), 0.875);
    std::istringstream g("banded 1\nrule geometric 0.5\n");
    EXPECT_DOUBLE_EQ(parse_symbol(g)(2, 3), 0.25);
    std::istringstream bad("banded\n1 1 1\n");
    EXPECT_THROW(parse_symbol(bad), std::invalid_argument);
    std::istringstream band("banded 0\n1 2 1.0\n");
    EXPECT_THROW(parse_symbol(band), std::invalid_argument);
    std::istringstream part("1 3 # comment\n 4\n");
    const auto s = parse_partition(part);
    EXPECT_EQ(s(2), 3u);
    EXPECT_EQ(s(3), 4u);
    std::istringstream badpart("3 2");
    EXPECT_THROW(parse_partition(badpart), std::invalid_argument);
}
