#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hadamard/nnmatrix.hpp"
#include "hadamard/random.hpp"
#include "hadamard/spectral.hpp"
#include "oracles.hpp"

using namespace hadamard;

namespace {

const NonNegativeMatrix kA{{1, 2}, {3, 4}};
const NonNegativeMatrix kOnes{{1, 1}, {1, 1}};
const NonNegativeMatrix kNil{{0, 1}, {0, 0}};

double rho(const NonNegativeMatrix& a) { return spectral_radius(a).value; }

}  // namespace

TEST(SpectralRadius, Examples) {
    EXPECT_NEAR(rho(kOnes), 2.0, 1e-12);
    EXPECT_EQ(rho(kNil), 0.0);
    EXPECT_NEAR(rho(kA), (5.0 + std::sqrt(33.0)) / 2.0, 1e-9);
    EXPECT_NEAR(rho(kA), 5.372281, 1e-6);
}

TEST(SpectralRadius, ZeroMatrixIsExact) {
    const auto e = spectral_radius(NonNegativeMatrix::zeros(3, 3));
    EXPECT_EQ(e.value, 0.0);
    EXPECT_TRUE(e.converged);
    EXPECT_EQ(e.method, Method::gelfand);
}

TEST(SpectralRadius, NonSquareRejected) {
    EXPECT_THROW(spectral_radius(NonNegativeMatrix::ones(2, 3)), dimension_error);
}

TEST(SpectralRadius, HardCases) {
    // periodic
    EXPECT_NEAR(rho(NonNegativeMatrix{{0, 1}, {1, 0}}), 1.0, 1e-12);
    // nearly nilpotent shift: ||B^2|| = ||B||^2 for the first squarings
    const NonNegativeMatrix shift{{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1e-4, 0, 0, 0}};
    EXPECT_NEAR(rho(shift), 0.1, 1e-11);
    // pure shift chain of length 5: nilpotent
    std::vector<double> d(25, 0.0);
    for (std::size_t i = 0; i + 1 < 5; ++i) d[i * 5 + i + 1] = 1.0;
    EXPECT_EQ(rho(NonNegativeMatrix(5, 5, d)), 0.0);
    // Jordan block: only polynomially slow Gelfand convergence
    const auto jb = spectral_radius(NonNegativeMatrix{{1, 1}, {0, 1}});
    EXPECT_TRUE(jb.converged);
    EXPECT_NEAR(jb.value, 1.0, 1e-9);
    // reducible with a dominant lower block
    EXPECT_NEAR(rho(NonNegativeMatrix{{0.5, 7}, {0, 0.75}}), 0.75, 1e-10);
}

TEST(SpectralRadius, ReportsNonConvergence) {
    ToleranceConfig cfg;
    cfg.max_squarings = 2;
    const auto e = spectral_radius(kA, cfg);
    EXPECT_FALSE(e.converged);
    EXPECT_GE(e.value, (5.0 + std::sqrt(33.0)) / 2.0 - 1e-12);  // Gelfand iterates bound from above
}

TEST(SpectralRadius, ConvergedImpliesResidualWithinTolerance) {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_matrix(rng.integer(1, 6), rng.integer(1, 6), trial % 2 ? 1.0 : 0.3, rng);
        if (!a.square()) continue;
        const auto e = spectral_radius(a);
        EXPECT_TRUE(e.converged);
        EXPECT_LE(e.residual, ToleranceConfig{}.rel_tol);
    }
}

TEST(SpectralRadius, AgreesWithCharacteristicPolynomial) {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.integer(1, 4);
        const auto a = random_matrix(n, n, trial % 2 ? 1.0 : 0.3, rng);
        EXPECT_LE(oracle::rel_err(rho(a), oracle::rho_charpoly(a)), 1e-8) << "trial " << trial;
    }
}

TEST(SpectralRadius, ProductCommutes) {
    SplitMix64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.integer(1, 6);
        const auto a = random_matrix(n, n, 0.6, rng);
        const auto b = random_matrix(n, n, 0.6, rng);
        const double ab = rho(matmul(a, b));
        const double ba = rho(matmul(b, a));
        EXPECT_LE(std::fabs(ab - ba), 1e-8 * std::max(ab, 1e-300));
    }
}

TEST(SpectralRadiusOracle, Examples) {
    for (unsigned k : {0u, 1u, 5u, 20u}) EXPECT_DOUBLE_EQ(spectral_radius_oracle(NonNegativeMatrix::identity(3), k), 1.0);
    EXPECT_EQ(spectral_radius_oracle(kNil, 1), 0.0);
    EXPECT_EQ(spectral_radius_oracle(kNil, 7), 0.0);
    EXPECT_NEAR(spectral_radius_oracle(kA, 40), (5.0 + std::sqrt(33.0)) / 2.0, 1e-8);
    EXPECT_THROW(spectral_radius_oracle(NonNegativeMatrix::ones(1, 2), 3), dimension_error);
    EXPECT_THROW(spectral_radius_oracle(kA, 61), domain_error);
}

TEST(SpectralRadiusOracle, DecreasesTowardRho) {
    const double r = (5.0 + std::sqrt(33.0)) / 2.0;
    double prev = spectral_radius_oracle(kA, 0);
    for (unsigned k = 1; k <= 30; ++k) {
        const double cur = spectral_radius_oracle(kA, k);
        EXPECT_LE(cur, prev * (1 + 1e-15));
        EXPECT_GE(cur, r * (1 - 1e-14));
        prev = cur;
    }
}

TEST(OperatorNorm, Examples) {
    EXPECT_EQ(operator_norm(kA, NormKind::one).value, 6.0);
    EXPECT_EQ(operator_norm(kA, NormKind::inf).value, 7.0);
    EXPECT_EQ(operator_norm(kA, NormKind::one).method, Method::closed_form);
    const double want = std::sqrt((30.0 + std::sqrt(884.0)) / 2.0);
    EXPECT_NEAR(operator_norm(kA, NormKind::two).value, want, 1e-10);
    EXPECT_NEAR(want, 5.464986, 1e-6);
    EXPECT_NEAR(operator_norm(kOnes, NormKind::two).value, 2.0, 1e-10);
    // rectangular operands are allowed
    EXPECT_NEAR(operator_norm(NonNegativeMatrix{{3, 4}}, NormKind::two).value, 5.0, 1e-10);
}

TEST(OperatorNorm, PowerIterationMatchesGelfandOnGram) {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_matrix(rng.integer(1, 6), rng.integer(1, 6), trial % 2 ? 1.0 : 0.3, rng);
        const auto pi = operator_norm(a, NormKind::two);
        const double gel = std::sqrt(rho(matmul(a.transpose(), a)));
        EXPECT_TRUE(pi.converged);
        EXPECT_LE(std::fabs(pi.value - gel), 1e-8 * std::max(gel, 1e-300));
    }
}

TEST(NumericalRadius, Examples) {
    EXPECT_NEAR(numerical_radius(kNil).value, 0.5, 1e-12);
    EXPECT_NEAR(numerical_radius(NonNegativeMatrix::identity(3)).value, 1.0, 1e-12);
    EXPECT_NEAR(numerical_radius(kA).value, (5.0 + std::sqrt(34.0)) / 2.0, 1e-10);
    EXPECT_NEAR(numerical_radius(kA).value, 5.415475, 1e-6);
    EXPECT_EQ(numerical_radius(NonNegativeMatrix::zeros(2, 2)).value, 0.0);
    EXPECT_THROW(numerical_radius(NonNegativeMatrix::ones(2, 1)), dimension_error);
}

TEST(NumericalRadius, AgreesWithSymmetricPartEigenvalue) {
    SplitMix64 rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.integer(1, 4);
        const auto a = random_matrix(n, n, trial % 2 ? 1.0 : 0.3, rng);
        const double want = oracle::lambda_max_sym_part(a);
        EXPECT_LE(std::fabs(numerical_radius(a).value - want), 1e-8 * std::max(1.0, want));
    }
}

TEST(SpectralFunctionals, OrderingAndSymmetricCollapse) {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.integer(1, 6);
        const auto a = random_matrix(n, n, trial % 2 ? 1.0 : 0.3, rng);
        const double r = rho(a);
        const double w = numerical_radius(a).value;
        const double n2 = operator_norm(a, NormKind::two).value;
        const double mixed = std::sqrt(operator_norm(a, NormKind::one).value * operator_norm(a, NormKind::inf).value);
        const double tol = 1e-9 * std::max(1.0, mixed);
        EXPECT_LE(r, w + tol);
        EXPECT_LE(w, n2 + tol);
        EXPECT_LE(n2, mixed + tol);

        const auto s = add(a, a.transpose());
        const double rs = rho(s);
        EXPECT_LE(std::fabs(rs - numerical_radius(s).value), 1e-8 * std::max(rs, 1e-300));
        EXPECT_LE(std::fabs(rs - operator_norm(s, NormKind::two).value), 1e-8 * std::max(rs, 1e-300));
    }
}

TEST(SpectralFunctionals, Monotone) {
    SplitMix64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.integer(1, 6);
        const auto a = random_matrix(n, n, 0.5, rng);
        const auto b = add(a, random_matrix(n, n, 0.3, rng));
        const auto le = [](double x, double y) { return x <= y + 1e-9 * std::max(1.0, y); };
        EXPECT_TRUE(le(rho(a), rho(b)));
        EXPECT_TRUE(le(numerical_radius(a).value, numerical_radius(b).value));
        for (auto p : {NormKind::one, NormKind::two, NormKind::inf})
            EXPECT_TRUE(le(operator_norm(a, p).value, operator_norm(b, p).value));
    }
}

TEST(MaxTimesRadius, Examples) {
    const auto e = max_times_radius(kA);
    EXPECT_EQ(e.value, 4.0);
    EXPECT_EQ(e.method, Method::karp);
    EXPECT_EQ(max_times_radius(kNil).value, 0.0);
    EXPECT_EQ(max_times_radius(kOnes).value, 1.0);
    EXPECT_THROW(max_times_radius(NonNegativeMatrix::ones(1, 2)), dimension_error);
}

TEST(MaxTimesRadius, AgreesWithCycleEnumeration) {
    SplitMix64 rng(47);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = rng.integer(1, 6);
        const auto a = random_matrix(n, n, trial % 3 == 0 ? 1.0 : 0.3, rng);
        const double want = oracle::max_cycle_geomean(a);
        EXPECT_LE(std::fabs(max_times_radius(a).value - want), 1e-12 * std::max(1.0, want));
    }
}

TEST(MaxTimesRadius, LowerBoundsHadamardPowerRoots) {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.integer(1, 5);
        const auto a = random_matrix(n, n, 0.7, rng);
        const double mu = max_times_radius(a).value;
        double prev = std::numeric_limits<double>::infinity();
        for (double t : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            const double v = std::pow(rho(hadamard_power(a, t)), 1.0 / t);
            EXPECT_LE(mu, v * (1 + 1e-9) + 1e-12);
            EXPECT_LE(v, prev * (1 + 1e-9));
            prev = v;
        }
    }
}

TEST(MatrixExp, Examples) {
    EXPECT_EQ(matrix_exp(NonNegativeMatrix::zeros(3, 3)), NonNegativeMatrix::identity(3));
    const auto d = matrix_exp(NonNegativeMatrix{{1, 0}, {0, 2}});
    EXPECT_NEAR(d(0, 0), std::exp(1.0), 1e-14 * std::exp(1.0));
    EXPECT_NEAR(d(1, 1), std::exp(2.0), 1e-14 * std::exp(2.0));
    EXPECT_EQ(d(0, 1), 0.0);
    EXPECT_EQ(matrix_exp(kNil), (NonNegativeMatrix{{1, 1}, {0, 1}}));
    EXPECT_THROW(matrix_exp(NonNegativeMatrix{{800}}), range_error);
    EXPECT_THROW(matrix_exp(NonNegativeMatrix::ones(1, 2)), dimension_error);
}

TEST(MatrixExp, DominatesIdentityAndMatchesSpectralMapping) {
    SplitMix64 rng(59);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.integer(1, 5);
        const auto a = random_matrix(n, n, 0.5, rng);
        const auto e = matrix_exp(a);
        EXPECT_TRUE(elementwise_le(NonNegativeMatrix::identity(n), e, 0.0));
        EXPECT_LE(oracle::rel_err(rho(e), std::exp(rho(a))), 1e-9);
    }
}

TEST(Resolvent, Examples) {
    EXPECT_EQ(resolvent(NonNegativeMatrix{{1}}, 2.0), (NonNegativeMatrix{{1}}));
    EXPECT_EQ(resolvent(kNil, 1.0), (NonNegativeMatrix{{1, 1}, {0, 1}}));
    const auto r = resolvent(kOnes, 4.0);
    const NonNegativeMatrix want{{3.0 / 8, 1.0 / 8}, {1.0 / 8, 3.0 / 8}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(r(i, j), want(i, j), 1e-15);
}

TEST(Resolvent, Errors) {
    EXPECT_THROW(resolvent(kOnes, 2.0), spectral_constraint_error);
    EXPECT_THROW(resolvent(kOnes, 1.0), spectral_constraint_error);
    EXPECT_THROW(resolvent(NonNegativeMatrix::ones(2, 3), 9.0), dimension_error);
}

TEST(Resolvent, MatchesNeumannSeries) {
    SplitMix64 rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = rng.integer(1, 5);
        const auto a = random_matrix(n, n, 0.6, rng);
        const double lambda = rho(a) + 0.5;
        const auto r = resolvent(a, lambda);
        // sum_j lambda^{-j-1} A^j, truncated once the terms are negligible
        NonNegativeMatrix sum = NonNegativeMatrix::zeros(n, n);
        NonNegativeMatrix term = NonNegativeMatrix::identity(n).scaled(1.0 / lambda);
        for (int j = 0; j < 5000; ++j) {
            sum = add(sum, term);
            term = matmul(term, a).scaled(1.0 / lambda);
            if (term.max_entry() < 1e-18 * sum.max_entry()) break;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                EXPECT_NEAR(r(i, j), sum(i, j), 1e-8 * std::max(1.0, sum(i, j)));
    }
}
