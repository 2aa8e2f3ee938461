#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hadamard/explorer.hpp"
#include "oracles.hpp"

using namespace hadamard;

namespace {

double norm2_oracle(const NonNegativeMatrix& x) { return std::sqrt(oracle::rho_charpoly(matmul(x.transpose(), x))); }

std::string temp_path(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("hadamard_" + name + ".jsonl");
    std::filesystem::remove(p);
    return p.string();
}

SearchConfig config(std::size_t n, double density, std::uint64_t trials, std::uint64_t seed = 1) {
    SearchConfig c;
    c.seed = seed;
    c.n_min = c.n_max = n;
    c.density = density;
    c.trials = trials;
    return c;
}

}  // namespace

TEST(SearchConfig, Validation) {
    EXPECT_NO_THROW(SearchConfig{}.validate());
    auto c = config(3, 1.0, 10);
    c.n_min = 0;
    EXPECT_THROW(c.validate(), contract_error);
    c = config(65, 1.0, 10);
    EXPECT_THROW(c.validate(), contract_error);
    c = config(3, 0.0, 10);
    EXPECT_THROW(c.validate(), contract_error);
    c = config(3, 1.0, 0);
    EXPECT_THROW(c.validate(), contract_error);
    c = config(3, 1.0, 10'000'001);
    EXPECT_THROW(c.validate(), contract_error);
    c = config(3, 1.0, 10);
    c.target_gap = 0.0;
    EXPECT_THROW(c.validate(), contract_error);
    c.n_min = 4;
    c.n_max = 3;
    c.target_gap = 1e-6;
    EXPECT_THROW(c.validate(), contract_error);
}

TEST(Inequivalence, ScalarsAlwaysExhaust) {
    auto c = config(1, 1.0, 500);
    c.target_gap = 1e-15;  // below the noise floor; the floor still applies
    const auto o = search_inequivalence(c);
    EXPECT_TRUE(o.exhausted());
    EXPECT_EQ(o.trials_run, 500u);
}

TEST(Inequivalence, EqualOperandsGiveNoGap) {
    SplitMix64 rng(3);
    for (int k = 0; k < 20; ++k) {
        const auto a = random_matrix(4, 4, 1.0, rng);
        const auto s = add(a, a.transpose());
        EXPECT_EQ(evaluate_fixture(FindingKind::inequivalence, s, s).gap, 0.0);
        EXPECT_EQ(evaluate_fixture(FindingKind::inequivalence, a, a).gap, 0.0);
    }
}

TEST(Inequivalence, DenseThreeByThreeFindsOracleVerifiedGap) {
    const auto o = search_inequivalence(config(3, 1.0, 10'000));
    ASSERT_FALSE(o.exhausted());
    const auto& f = *o.finding;
    EXPECT_EQ(f.kind, FindingKind::inequivalence);
    EXPECT_GT(f.gap, 1e-6);
    const auto& a = f.matrices[0];
    const auto& b = f.matrices[1];
    const auto ab = matmul(a, b);
    const double l = oracle::rho_charpoly(hadamard_product(ab, matmul(b, a)));
    const double r = oracle::rho_charpoly(hadamard_product(ab, ab));
    EXPECT_GT(std::fabs(l - r) / std::max(1.0, r), 1e-6);
    EXPECT_NEAR(f.value("rho(AB∘BA)"), l, 1e-9 * l);
    EXPECT_NEAR(f.value("rho(AB∘AB)"), r, 1e-9 * r);
}

TEST(Search, DeterministicAndLowestTrialWins) {
    const auto c = config(3, 0.5, 2000, 99);
    const auto o1 = search_violation(ViolationTarget::sfirst_middle, c);
    const auto o2 = search_violation(ViolationTarget::sfirst_middle, c);
    ASSERT_FALSE(o1.exhausted());
    ASSERT_FALSE(o2.exhausted());
    EXPECT_EQ(o1.finding->matrices, o2.finding->matrices);
    EXPECT_EQ(o1.finding->values, o2.finding->values);
    EXPECT_EQ(o1.finding->seed_trail.trial, o2.finding->seed_trail.trial);
    const auto hit = o1.finding->seed_trail.trial;
    if (hit > 0) {
        auto before = c;
        before.trials = hit;
        EXPECT_TRUE(search_violation(ViolationTarget::sfirst_middle, before).exhausted());
    }
    EXPECT_EQ(regenerate_pair(o1.finding->seed_trail), o1.finding->matrices);
}

TEST(JordanNaive, FixtureIsAViolation) {
    const auto [a, b] = jordan_naive_fixture();
    const auto f = evaluate_fixture(FindingKind::jordan_naive_violation, a, b);
    EXPECT_EQ(f.value("||A∘B∘A||"), 1.0);
    EXPECT_EQ(f.value("||ABA||"), 0.0);
    EXPECT_EQ(f.gap, 1.0);
    EXPECT_EQ(matmul(matmul(a, b), a), NonNegativeMatrix::zeros(2, 2));
}

TEST(JordanNaive, RandomSearchFindsNormVerifiedViolation) {
    const auto o = search_violation(ViolationTarget::jordan_naive, config(2, 0.5, 1000));
    ASSERT_FALSE(o.exhausted());
    const auto& f = *o.finding;
    EXPECT_EQ(f.kind, FindingKind::jordan_naive_violation);
    const auto& a = f.matrices[0];
    const auto& b = f.matrices[1];
    const double l = norm2_oracle(hadamard_product(hadamard_product(a, b), a));
    const double r = norm2_oracle(matmul(matmul(a, b), a));
    EXPECT_GT(l - r, 1e-6);
    EXPECT_NEAR(f.gap, l - r, 1e-9);
}

TEST(SfirstMiddle, FindingIsOracleVerified) {
    const auto o = search_violation(ViolationTarget::sfirst_middle, config(3, 0.5, 1000));
    ASSERT_FALSE(o.exhausted());
    const auto& a = o.finding->matrices[0];
    const auto& b = o.finding->matrices[1];
    const double l = std::sqrt(oracle::rho_charpoly(matmul(hadamard_product(a, a), hadamard_product(b, b))));
    const double r = std::sqrt(oracle::rho_charpoly(hadamard_product(matmul(a, b), matmul(b, a))));
    EXPECT_GT(l - r, 1e-6);
    EXPECT_NEAR(o.finding->gap, l - r, 1e-9);
}

TEST(SfirstMiddle, EqualOperandsNeverViolate) {
    SplitMix64 rng(8);
    for (int k = 0; k < 50; ++k) {
        const auto a = random_matrix(3, 3, 1.0, rng);
        EXPECT_LE(evaluate_fixture(FindingKind::sfirst_violation, a, a).gap, 1e-9);
    }
}

TEST(SfirstMiddle, CommittedWitnessReverifies) {
    const auto corpus = load_corpus(HADAMARD_TEST_DATA "/sfirst_witness.jsonl");
    ASSERT_EQ(corpus.findings.size(), 1u);
    const auto& f = corpus.findings.front();
    EXPECT_EQ(f.kind, FindingKind::sfirst_violation);
    EXPECT_TRUE(reverify(f).ok);
    EXPECT_GT(f.gap, 1e-6);
    EXPECT_EQ(regenerate_pair(f.seed_trail), f.matrices);
}

TEST(Persistence, RoundTripAndReverify) {
    const auto path = temp_path("corpus");
    const auto o = search_violation(ViolationTarget::jordan_naive, config(2, 0.5, 1000));
    ASSERT_FALSE(o.exhausted());
    append_finding(path, *o.finding);
    const auto [a, b] = jordan_naive_fixture();
    append_finding(path, evaluate_fixture(FindingKind::jordan_naive_violation, a, b));
    const auto none = search_inequivalence(config(1, 1.0, 10));
    ASSERT_TRUE(none.exhausted());
    append_exhausted(path, exhausted_record("inequivalence", config(1, 1.0, 10), none));

    const auto corpus = load_corpus(path);
    ASSERT_EQ(corpus.findings.size(), 2u);
    ASSERT_EQ(corpus.exhausted.size(), 1u);
    EXPECT_EQ(corpus.exhausted[0].trials, 10u);
    EXPECT_EQ(corpus.exhausted[0].target, "inequivalence");
    const auto& back = corpus.findings[0];
    EXPECT_EQ(back.matrices, o.finding->matrices);
    EXPECT_EQ(back.values, o.finding->values);
    EXPECT_EQ(back.gap, o.finding->gap);
    EXPECT_EQ(back.seed_trail.trial_seed, o.finding->seed_trail.trial_seed);
    for (const auto& f : corpus.findings) {
        const auto rv = reverify(f);
        EXPECT_TRUE(rv.ok) << rv.max_rel_diff;
    }
    std::filesystem::remove(path);
}

TEST(Persistence, TamperedValueFailsReverification) {
    const auto [a, b] = jordan_naive_fixture();
    auto f = evaluate_fixture(FindingKind::jordan_naive_violation, a, b);
    f.values[0].second = 1.001;
    EXPECT_FALSE(reverify(f).ok);
}

TEST(Persistence, MissingFileIsAnError) {
    EXPECT_THROW(load_corpus("/nonexistent/dir/corpus.jsonl"), error);
}

TEST(Tightness, ScalarHuangHasZeroSlack) {
    auto c = config(1, 1.0, 200);
    const auto st = tightness_stats(ChainId::huang, c);
    EXPECT_EQ(st.evaluated, 200u);
    EXPECT_EQ(st.violations, 0u);
    EXPECT_LE(std::fabs(st.min_slack), 1e-12);
    EXPECT_LE(std::fabs(st.max_slack), 1e-12);
}

TEST(Tightness, IdenticalOperandsGeoMeanSlackIsZero) {
    SplitMix64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const auto a = random_matrix(3, 3, 1.0, rng);
        const auto r = evaluate_chain(ChainId::geo_mean, {a, a, a});
        EXPECT_LE(std::fabs(r.min_slack), 1e-9 * r.terms[1].value);
    }
}

TEST(Tightness, AudenaertHasNoViolations) {
    const auto st = tightness_stats(ChainId::audenaert, config(3, 1.0, 1000));
    EXPECT_EQ(st.trials, 1000u);
    EXPECT_EQ(st.violations, 0u);
    EXPECT_EQ(st.inconclusive, 0u);
    EXPECT_GE(st.min_slack, -1e-9);
    EXPECT_LE(st.min_slack, st.median_slack);
    EXPECT_LE(st.median_slack, st.max_slack);
    ASSERT_TRUE(st.extremal.has_value());
    EXPECT_EQ(st.extremal->gap, st.min_slack);
    EXPECT_TRUE(reverify(*st.extremal).ok);
}

TEST(Tightness, ExtremalFindingWithParamsRoundTrips) {
    const auto st = tightness_stats(ChainId::genP1_norm, config(3, 1.0, 50));
    ASSERT_TRUE(st.extremal.has_value());
    const auto back = finding_from_json(to_json(*st.extremal));
    ASSERT_TRUE(back.seed_trail.params.has_value());
    EXPECT_EQ(back.seed_trail.params->t, st.extremal->seed_trail.params->t);
    EXPECT_TRUE(reverify(back).ok);
}
