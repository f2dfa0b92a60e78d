#include "cosub/checker.hpp"
#include "cosub/families.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cosub;

namespace {

const CheckReport& by_anchor(const std::vector<CheckReport>& reps, const std::string& anchor) {
    for (const auto& r : reps)
        if (r.anchor == anchor) return r;
    throw std::logic_error("no report " + anchor);
}

Matrix diag2(double a, double b) {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = a;
    A(1, 1) = b;
    return A;
}

}  // namespace

TEST(CoefficientTensor, EffectiveDegree) {
    CoefficientTensor c(1, 3);
    EXPECT_EQ(compute_n_a(c), 0u);
    c.at(0, 0, 1, 1) = 1.0;
    EXPECT_EQ(compute_n_a(c), 0u);
    c.at(0, 2, 1, 1) = 0.5;
    EXPECT_EQ(compute_n_a(c), 2u);
    EXPECT_EQ(compute_n_a(c.scaled({0.0, -3.0})), 2u);
    EXPECT_THROW(c.at(4, 0, 1, 1), std::out_of_range);
    EXPECT_THROW(c.at(0, 0, 0, 1), std::out_of_range);
}

TEST(FormPositivity, DisprovesIndefiniteTensor) {
    CoefficientTensor c(1, 1);
    c.at(0, 0, 1, 1) = 1.0;
    c.at(1, 1, 1, 1) = -1.0;
    const auto ev = form_evidence(c);
    ASSERT_TRUE(ev.violated);
    EXPECT_GT(std::abs(*ev.first_violation), 1.0);
    EXPECT_EQ(form_positivity_evidence(c).verdict, Verdict::fail);
}

TEST(FormPositivity, GramTensorsNeverFlagged) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const auto gf = GramFactor::random(1 + t % 3, 1 + t % 2, 3, rng);
        const auto c = gram_construct(gf);
        const auto ev = form_evidence(c);
        EXPECT_FALSE(ev.violated) << "trial " << t;
        EXPECT_TRUE(ev.hermitian);
        EXPECT_EQ(form_positivity_evidence(c).verdict, Verdict::evidence_only);
    }
}

TEST(FormPositivity, WitnessGridSize) {
    FormWitnessSpec spec;
    EXPECT_EQ(witness_points(spec).size(), 20u * 64u + 256u);
}

TEST(SnrForm, NormalDiagonalSuiteNonnegative) {
    const auto s = snr_form_suite(diag2(0.5, 1.0 / 3.0), 24, 5, 2, 2, 4);
    EXPECT_EQ(s.retained, s.trials);
    EXPECT_EQ(s.violations, 0u);
    EXPECT_LT(s.max_abs_imag, 1e-10);
}

TEST(SnrForm, RZeroMatchesSumOfSquares) {
    // r = 0: value = sum_t || sum_{p,i} conj? c S^p f_i ||^2 computed directly
    std::mt19937_64 rng(2);
    const Matrix A = diag2(0.5, 0.25);
    const auto model = HermiteModel::create(2, 3);
    GramFactor gf(1, 1, 1);
    gf.at(0, 1, 0) = 1.0;
    gf.at(1, 1, 0) = -0.5;
    const auto c = gram_construct(gf);
    std::vector<std::vector<CylFunction>> fs{{CylFunction::random_unit(model, rng)}};
    const auto res = snr_form_value(A, c, 0, fs);
    const auto& f = fs[0][0];
    // ||f - 0.5 S f||^2
    const double direct = adjoint_power_inner(A, 0, f, 0, f) - adjoint_power_inner(A, 0, f, 1, f) +
                          0.25 * adjoint_power_inner(A, 1, f, 1, f);
    EXPECT_NEAR(res.value, direct, 1e-12);
    EXPECT_GE(res.value, 0.0);
}

TEST(SnrForm, ProjectedModeReportsLeakage) {
    std::mt19937_64 rng(1);
    const auto model = HermiteModel::create(1, 3);
    CoefficientTensor c(1, 1);
    c.at(1, 1, 1, 1) = 1.0;
    std::vector<std::vector<CylFunction>> fs{{CylFunction::random_unit(model, rng)}};
    Matrix A(1, 1);
    A << 0.5;
    SnrFormOptions opt;
    opt.mode = PowerMode::projected;
    const auto res = snr_form_value(A, c, 0, fs, opt);
    EXPECT_GT(res.max_leakage, 0.0);
    const auto exact = snr_form_value(A, c, 0, fs);
    EXPECT_EQ(exact.max_leakage, 0.0);
    EXPECT_TRUE(exact.retained);
}

TEST(Normality, Oracles) {
    Matrix J(2, 2);
    J << 1, 1, 0, 1;
    const auto rep = normality_test(J);
    EXPECT_EQ(rep.verdict, Verdict::fail);
    EXPECT_NEAR(rep.payload["commutator_frobenius"].get<double>(), std::numbers::sqrt2, 1e-15);
    EXPECT_EQ(normality_test(Matrix(J.transpose())).verdict, Verdict::fail);
    Matrix S(2, 2);
    S << 2, 1, 1, 3;
    EXPECT_EQ(normality_test(S).verdict, Verdict::pass);
    const double t = 0.7;
    Matrix R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    EXPECT_EQ(normality_test(R).verdict, Verdict::pass);
}

TEST(Hyponormality, DiagonalHalf) {
    Matrix A(1, 1);
    A << 0.5;
    const auto s = hyponormality_trials(A, HermiteModel::create(1, 5), 40, 12);
    EXPECT_EQ(s.retained, s.trials);
    EXPECT_EQ(s.form_violations, 0u);
    EXPECT_EQ(s.norm_violations, 0u);
    EXPECT_LT(s.max_substitution_error, 1e-10);
    EXPECT_EQ(hyponormality_consequence(A, HermiteModel::create(1, 3), 10, 1).verdict, Verdict::evidence_only);
}

TEST(Thm51, IdentityPassesWithBoxMasses) {
    SuiteOptions o;
    o.L = 4;
    const auto reps = thm51_suite(identity_family(), BlockPartition::uniform(), o);
    for (const auto& r : reps) EXPECT_EQ(r.verdict, Verdict::pass) << r.anchor;
    const auto& cells = by_anchor(reps, "thm51/iii").payload["cells"];
    EXPECT_NEAR(cells[0]["value"].get<double>(), std::pow(0.682689492137086, 2), 1e-12);
}

TEST(Thm51, DiagonalFamilyConsistent) {
    SuiteOptions o;
    o.L = 6;
    const auto fam = SymbolFamily::from_diagonal(diagonal_data("1-2^-j", "2^-N"));
    const auto reps = thm51_suite(fam, BlockPartition::uniform(), o);
    EXPECT_EQ(by_anchor(reps, "thm51/v").verdict, Verdict::pass);
    EXPECT_EQ(by_anchor(reps, "thm51/iii").verdict, Verdict::pass);
}

TEST(Thm51, GeometricInverseStructural) {
    SuiteOptions o;
    o.L = 8;
    const auto reps = thm51_suite(geometric_family(0.5), BlockPartition::uniform(), o);
    EXPECT_EQ(by_anchor(reps, "thm51/vi").verdict, Verdict::pass);
    EXPECT_EQ(by_anchor(reps, "thm51/vii").verdict, Verdict::pass);
    EXPECT_EQ(by_anchor(reps, "thm51/v").verdict, Verdict::evidence_only);
    EXPECT_EQ(by_anchor(reps, "thm51/v").payload["cells"][0]["l"].size(), 7u);
}

TEST(Thm51, NonBandedInverseNotCheckable) {
    SuiteOptions o;
    o.L = 3;
    const auto fam = SymbolFamily::from_symbol(BandedSymbol::geometric_tridiagonal(0.3));
    const auto reps = thm51_suite(fam, BlockPartition::uniform(), o);
    EXPECT_EQ(by_anchor(reps, "thm51/vi").verdict, Verdict::evidence_only);
}

TEST(Prop52, DiagonalDataAllPass) {
    SuiteOptions o;
    const auto reps = prop52_suite(SymbolFamily::from_diagonal(diagonal_data("1-2^-j", "2^-N")),
                                   BlockPartition::uniform(), o);
    ASSERT_EQ(reps.size(), 5u);
    for (const auto& r : reps) EXPECT_EQ(r.verdict, Verdict::pass) << r.anchor;
}

TEST(Prop52, NilpotentBlockFailsNormality) {
    const auto inv = BandedSymbol::from_rule(
        SymbolKind::banded, 1, [](std::size_t i, std::size_t j) { return i == j ? 1.0 : (i == 1 && j == 2 ? 1.0 : 0.0); },
        "identity + e12");
    SuiteOptions o;
    o.L = 4;
    const auto reps = prop52_suite(SymbolFamily::from_inverse_symbol(inv), BlockPartition::uniform(), o);
    EXPECT_EQ(by_anchor(reps, "prop52/d").verdict, Verdict::fail);
}

TEST(Prop52, RankBreakFailsClass) {
    Matrix m = Matrix::Identity(8, 8);
    m(0, 2) = 0.5;  // block (1,2) of size 2x2 with rank 1
    const auto inv = BandedSymbol::from_window(m, SymbolKind::block3diag, 0, Extension::zero, "rank break");
    SuiteOptions o;
    o.L = 3;
    o.kappa = 1;
    o.boxes = {1.0};
    const auto reps = prop52_suite(SymbolFamily::from_inverse_symbol(inv), BlockPartition::uniform(2), o);
    EXPECT_EQ(by_anchor(reps, "prop52/b").verdict, Verdict::fail);
}

TEST(Prop52, NeedsInverse) {
    const auto fam = SymbolFamily::from_symbol(BandedSymbol::geometric_tridiagonal(0.3));
    EXPECT_THROW(prop52_suite(fam, BlockPartition::uniform(), SuiteOptions{}), std::invalid_argument);
}

TEST(Prop56, GeometricHalfPasses) {
    const auto reps = prop56_suite(geometric_perturbed_identity(0.5), BlockPartition::uniform(), 1, 1,
                                   geometric_det_floor(0.5), 64);
    EXPECT_EQ(combined_verdict(reps), Verdict::pass);
    EXPECT_NEAR(by_anchor(reps, "prop56/f").payload["rho"].get<double>(), 2.0 / 3.0, 1e-15);
}

TEST(Prop56, PreconditionFailureStopsEarly) {
    const auto reps = prop56_suite(geometric_perturbed_identity(0.8), BlockPartition::uniform(), 1, 1,
                                   geometric_det_floor(0.8), 64);
    ASSERT_EQ(reps.size(), 2u);
    EXPECT_EQ(reps[0].verdict, Verdict::fail);
    EXPECT_EQ(reps[0].payload["precondition"].get<std::string>(), "q∈(0, √2/2)");
    EXPECT_EQ(reps[1].verdict, Verdict::fail);
}

TEST(Prop56, TrivialPerturbation) {
    const auto reps = prop56_suite(trivial_perturbed_identity(), BlockPartition::uniform(), 2, 1, 1.0, 16);
    EXPECT_EQ(combined_verdict(reps), Verdict::pass);
    for (const auto& d : by_anchor(reps, "prop56/f").payload["determinants"]) EXPECT_EQ(d.get<double>(), 1.0);
}

TEST(Prop56, FloorAboveDeterminantsFails) {
    const auto reps = prop56_suite(geometric_perturbed_identity(0.5), BlockPartition::uniform(), 1, 1, 0.9, 16);
    EXPECT_EQ(by_anchor(reps, "prop56/f").verdict, Verdict::fail);
}

TEST(DetFloor, GeometricGridStrictlyDecreasing) {
    for (double q = 0.05; q < std::numbers::sqrt2 / 2.0; q += 0.05) {
        const auto d = det_sequence(BandedSymbol::geometric_tridiagonal(q), BlockPartition::uniform(), 64);
        for (std::size_t k = 1; k < d.size(); ++k) {
            // the decrement q^{2l-2} det b_{l-2} drops below rounding for large l
            if (std::pow(q, 2.0 * static_cast<double>(k)) > 1e-14)
                EXPECT_LT(d[k].value(), d[k - 1].value()) << "q=" << q << " k=" << k + 1;
            else
                EXPECT_LE(d[k].value(), d[k - 1].value()) << "q=" << q << " k=" << k + 1;
            EXPECT_GT(d[k].value(), geometric_det_floor(q)) << "q=" << q;
        }
    }
}
