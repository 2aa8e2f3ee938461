#pragma once

// Random search for gaps and counterexamples, slack statistics, and a JSON-lines
// corpus of findings.
//
// Trial k of a search draws its instance from SplitMix64(derive_seed(seed, k)), so any
// finding is reproduced from (seed, trial) alone and the first hit is always the one
// with the lowest trial index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chains.hpp"
#include "errors.hpp"
#include "instances.hpp"
#include "json_io.hpp"
#include "nnmatrix.hpp"
#include "random.hpp"
#include "serialize.hpp"
#include "spectral.hpp"

namespace hadamard {

struct SearchConfig {
    std::uint64_t seed = 1;
    std::size_t n_min = 2;
    std::size_t n_max = 4;
    double density = 1.0;
    std::uint64_t trials = 1000;
    double target_gap = 1e-6;

    void validate() const {
        if (n_min < 1 || n_max > 64 || n_min > n_max) throw contract_error("n range must satisfy 1 <= min <= max <= 64");
        if (!(density > 0.0 && density <= 1.0)) throw contract_error("density must lie in (0, 1]");
        if (trials < 1 || trials > 10'000'000) throw contract_error("trials must lie in [1, 10^7]");
        if (!(target_gap > 0.0) || !std::isfinite(target_gap)) throw contract_error("target_gap must be > 0");
    }
};

enum class FindingKind { inequivalence, sfirst_violation, jordan_naive_violation, extremal_slack };

inline const char* to_string(FindingKind k) {
    switch (k) {
        case FindingKind::inequivalence: return "inequivalence";
        case FindingKind::sfirst_violation: return "sfirst_violation";
        case FindingKind::jordan_naive_violation: return "jordan_naive_violation";
        case FindingKind::extremal_slack: return "extremal_slack";
    }
    return "?";
}

inline FindingKind parse_finding_kind(const std::string& s) {
    for (auto k : {FindingKind::inequivalence, FindingKind::sfirst_violation, FindingKind::jordan_naive_violation,
                   FindingKind::extremal_slack})
        if (s == to_string(k)) return k;
    throw contract_error("unknown finding kind '" + s + "'");
}

enum class ViolationTarget { sfirst_middle, jordan_naive };

inline const char* to_string(ViolationTarget t) {
    return t == ViolationTarget::sfirst_middle ? "sfirst_middle" : "jordan_naive";
}

/// Everything needed to regenerate a finding's instance.
struct SeedTrail {
    std::string target;          // search target or chain name
    std::uint64_t base_seed = 0;
    std::uint64_t trial = 0;
    std::uint64_t trial_seed = 0;
    std::size_t n_min = 1;
    std::size_t n_max = 1;
    double density = 1.0;
    std::optional<ChainParams> params;  // extremal_slack only
};

struct Finding {
    FindingKind kind = FindingKind::inequivalence;
    std::vector<NonNegativeMatrix> matrices;
    std::vector<std::pair<std::string, double>> values;
    double gap = 0.0;
    SeedTrail seed_trail;

    double value(const std::string& label) const {
        for (const auto& [k, v] : values)
            if (k == label) return v;
        throw contract_error("finding has no value '" + label + "'");
    }
};

/// A search that ran all its trials without a hit.
struct ExhaustedRecord {
    std::string target;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::uint64_t inconclusive = 0;
    double target_gap = 0.0;
    double best_gap = 0.0;  // largest gap seen among converged trials
};

struct SearchOutcome {
    std::optional<Finding> finding;
    std::uint64_t trials_run = 0;
    std::uint64_t inconclusive = 0;
    double best_gap = -std::numeric_limits<double>::infinity();

    bool exhausted() const { return !finding.has_value(); }
};

namespace detail {

struct Evaluated {
    std::vector<std::pair<std::string, double>> values;
    double gap = 0.0;
    bool converged = true;
};

inline constexpr const char* kInequivLhs = "rho(AB∘BA)";
inline constexpr const char* kInequivRhs = "rho(AB∘AB)";
inline constexpr const char* kSfirstLhs = "rho^{1/2}((A∘A)(B∘B))";
inline constexpr const char* kSfirstRhs = "rho^{1/2}(AB∘BA)";
inline constexpr const char* kJordanLhs = "||A∘B∘A||";
inline constexpr const char* kJordanRhs = "||ABA||";

inline Evaluated evaluate_pair(FindingKind kind, const NonNegativeMatrix& a, const NonNegativeMatrix& b,
                               const ToleranceConfig& cfg) {
    Evaluated out;
    SpectralEstimate l, r;
    const char* ll = "";
    const char* rl = "";
    switch (kind) {
        case FindingKind::inequivalence: {
            const auto ab = matmul(a, b);
            l = spectral_radius(hadamard_product(ab, matmul(b, a)), cfg);
            r = spectral_radius(hadamard_product(ab, ab), cfg);
            ll = kInequivLhs;
            rl = kInequivRhs;
            out.gap = std::fabs(l.value - r.value) / std::max(1.0, r.value);
            break;
        }
        case FindingKind::sfirst_violation: {
            l = spectral_radius(matmul(hadamard_product(a, a), hadamard_product(b, b)), cfg);
            r = spectral_radius(hadamard_product(matmul(a, b), matmul(b, a)), cfg);
            l.value = std::sqrt(l.value);
            r.value = std::sqrt(r.value);
            ll = kSfirstLhs;
            rl = kSfirstRhs;
            out.gap = l.value - r.value;
            break;
        }
        case FindingKind::jordan_naive_violation: {
            l = operator_norm(hadamard_product(hadamard_product(a, b), a), NormKind::two, cfg);
            r = operator_norm(matmul(matmul(a, b), a), NormKind::two, cfg);
            ll = kJordanLhs;
            rl = kJordanRhs;
            out.gap = l.value - r.value;
            break;
        }
        case FindingKind::extremal_slack: throw contract_error("extremal_slack is not a pair search");
    }
    out.values = {{ll, l.value}, {rl, r.value}};
    out.converged = l.converged && r.converged;
    return out;
}

/// Shared driver: draws (A, B) per trial and keeps the lowest-index hit.
inline SearchOutcome pair_search(FindingKind kind, const std::string& target, const SearchConfig& cfg,
                                 const ToleranceConfig& tol) {
    cfg.validate();
    tol.validate();
    // genuine violations must clear numerical noise
    const double threshold = std::max(cfg.target_gap, 10.0 * tol.rel_tol);
    SearchOutcome out;
    for (std::uint64_t k = 0; k < cfg.trials; ++k) {
        const std::uint64_t s = derive_seed(cfg.seed, k);
        SplitMix64 rng(s);
        const std::size_t n = rng.integer(cfg.n_min, cfg.n_max);
        auto a = random_matrix(n, n, cfg.density, rng);
        auto b = random_matrix(n, n, cfg.density, rng);
        const auto ev = evaluate_pair(kind, a, b, tol);
        ++out.trials_run;
        if (!ev.converged) {
            ++out.inconclusive;
            continue;
        }
        out.best_gap = std::max(out.best_gap, ev.gap);
        if (ev.gap > threshold) {
            Finding f;
            f.kind = kind;
            f.matrices = {std::move(a), std::move(b)};
            f.values = ev.values;
            f.gap = ev.gap;
            f.seed_trail = {target, cfg.seed, k, s, cfg.n_min, cfg.n_max, cfg.density, std::nullopt};
            out.finding = std::move(f);
            return out;
        }
    }
    return out;
}

}  // namespace detail

/// Random pair with rho(AB∘BA) and rho(AB∘AB) separated by more than target_gap (relative).
inline SearchOutcome search_inequivalence(const SearchConfig& cfg, const ToleranceConfig& tol = {}) {
    return detail::pair_search(FindingKind::inequivalence, "inequivalence", cfg, tol);
}

/// Random pair violating a claimed inequality by more than target_gap:
/// sfirst_middle: rho^{1/2}((A∘A)(B∘B)) <= rho^{1/2}(AB∘BA);
/// jordan_naive: ||A∘B∘A||_2 <= ||ABA||_2.
inline SearchOutcome search_violation(ViolationTarget target, const SearchConfig& cfg, const ToleranceConfig& tol = {}) {
    return detail::pair_search(
        target == ViolationTarget::sfirst_middle ? FindingKind::sfirst_violation : FindingKind::jordan_naive_violation,
        to_string(target), cfg, tol);
}

/// Values and gap of a claimed-inequality pair on fixed operands.
inline Finding evaluate_fixture(FindingKind kind, const NonNegativeMatrix& a, const NonNegativeMatrix& b,
                                const ToleranceConfig& tol = {}) {
    const auto ev = detail::evaluate_pair(kind, a, b, tol);
    Finding f;
    f.kind = kind;
    f.matrices = {a, b};
    f.values = ev.values;
    f.gap = ev.gap;
    f.seed_trail.target = "fixture";
    return f;
}

/// The two-by-two pair with ||A∘B∘A|| = 1 and ||ABA|| = 0.
inline std::pair<NonNegativeMatrix, NonNegativeMatrix> jordan_naive_fixture() {
    return {NonNegativeMatrix{{0, 1}, {0, 1}}, NonNegativeMatrix{{1, 1}, {0, 0}}};
}

struct TightnessStats {
    ChainId chain{};
    std::uint64_t trials = 0;
    std::uint64_t evaluated = 0;   // converged trials
    std::uint64_t inconclusive = 0;
    std::uint64_t violations = 0;
    double min_slack = 0.0;
    double median_slack = 0.0;
    double max_slack = 0.0;
    std::optional<Finding> extremal;  // instance with the smallest min_slack
};

/// min_slack distribution of a chain over random instances.
inline TightnessStats tightness_stats(ChainId chain, const SearchConfig& cfg, const ToleranceConfig& tol = {},
                                      std::size_t m_max = 5) {
    cfg.validate();
    TightnessStats st;
    st.chain = chain;
    std::vector<double> slacks;
    InstanceShape shape;
    shape.n_min = cfg.n_min;
    shape.n_max = cfg.n_max;
    shape.density = cfg.density;
    shape.m_max = m_max;
    for (std::uint64_t k = 0; k < cfg.trials; ++k) {
        const std::uint64_t s = derive_seed(cfg.seed, k);
        SplitMix64 rng(s);
        auto inst = random_chain_instance(chain, shape, rng);
        const auto r = evaluate_chain(chain, inst.mats, inst.params, tol);
        ++st.trials;
        if (r.inconclusive) {
            ++st.inconclusive;
            continue;
        }
        ++st.evaluated;
        if (!r.holds) ++st.violations;
        if (slacks.empty() || r.min_slack < *std::min_element(slacks.begin(), slacks.end())) {
            Finding f;
            f.kind = FindingKind::extremal_slack;
            f.matrices = std::move(inst.mats);
            for (const auto& t : r.terms) f.values.emplace_back(t.label, t.value);
            f.gap = r.min_slack;
            f.seed_trail = {std::string(to_string(chain)), cfg.seed, k, s, cfg.n_min, cfg.n_max, cfg.density, r.params};
            st.extremal = std::move(f);
        }
        slacks.push_back(r.min_slack);
    }
    if (!slacks.empty()) {
        std::sort(slacks.begin(), slacks.end());
        st.min_slack = slacks.front();
        st.max_slack = slacks.back();
        const std::size_t h = slacks.size() / 2;
        st.median_slack = slacks.size() % 2 ? slacks[h] : 0.5 * (slacks[h - 1] + slacks[h]);
    }
    return st;
}

// ---- persistence ----

inline json to_json(const SeedTrail& s) {
    json j;
    j["target"] = s.target;
    j["base_seed"] = s.base_seed;
    j["trial"] = s.trial;
    j["trial_seed"] = s.trial_seed;
    j["n_min"] = s.n_min;
    j["n_max"] = s.n_max;
    j["density"] = s.density;
    if (s.params) j["params"] = to_json(*s.params);
    return j;
}

inline json to_json(const Finding& f) {
    json j;
    j["kind"] = to_string(f.kind);
    json mats = json::array();
    for (const auto& m : f.matrices) mats.push_back(matrix_to_json(m));
    j["matrices"] = std::move(mats);
    json vals = json::object();
    for (const auto& [k, v] : f.values) vals[k] = v;
    j["values"] = std::move(vals);
    j["gap"] = f.gap;
    j["seed_trail"] = to_json(f.seed_trail);
    return j;
}

inline Finding finding_from_json(const json& j) {
    Finding f;
    f.kind = parse_finding_kind(j.at("kind").get<std::string>());
    for (const auto& m : j.at("matrices")) f.matrices.push_back(matrix_from_json(m));
    for (const auto& [k, v] : j.at("values").items()) f.values.emplace_back(k, v.get<double>());
    f.gap = j.at("gap").get<double>();
    const auto& s = j.at("seed_trail");
    f.seed_trail.target = s.at("target").get<std::string>();
    f.seed_trail.base_seed = s.at("base_seed").get<std::uint64_t>();
    f.seed_trail.trial = s.at("trial").get<std::uint64_t>();
    f.seed_trail.trial_seed = s.at("trial_seed").get<std::uint64_t>();
    f.seed_trail.n_min = s.at("n_min").get<std::size_t>();
    f.seed_trail.n_max = s.at("n_max").get<std::size_t>();
    f.seed_trail.density = s.at("density").get<double>();
    if (s.contains("params")) f.seed_trail.params = chain_params_from_json(s.at("params"));
    return f;
}

inline json to_json(const ExhaustedRecord& e) {
    json j;
    j["kind"] = "exhausted";
    j["target"] = e.target;
    j["seed"] = e.seed;
    j["trials"] = e.trials;
    j["inconclusive"] = e.inconclusive;
    j["target_gap"] = e.target_gap;
    j["best_gap"] = e.best_gap;
    return j;
}

inline ExhaustedRecord exhausted_from_json(const json& j) {
    ExhaustedRecord e;
    e.target = j.at("target").get<std::string>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.trials = j.at("trials").get<std::uint64_t>();
    e.inconclusive = j.at("inconclusive").get<std::uint64_t>();
    e.target_gap = j.at("target_gap").get<double>();
    e.best_gap = j.at("best_gap").is_null() ? -std::numeric_limits<double>::infinity() : j.at("best_gap").get<double>();
    return e;
}

inline ExhaustedRecord exhausted_record(const std::string& target, const SearchConfig& cfg, const SearchOutcome& o) {
    return {target, cfg.seed, o.trials_run, o.inconclusive, cfg.target_gap, o.best_gap};
}

inline json to_json(const TightnessStats& s) {
    json j;
    j["chain"] = std::string(to_string(s.chain));
    j["trials"] = s.trials;
    j["evaluated"] = s.evaluated;
    j["inconclusive"] = s.inconclusive;
    j["violations"] = s.violations;
    j["min_slack"] = s.min_slack;
    j["median_slack"] = s.median_slack;
    j["max_slack"] = s.max_slack;
    if (s.extremal) j["extremal"] = to_json(*s.extremal);
    return j;
}

namespace detail {

inline void append_line(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw error("cannot open findings file '" + path + "' for appending");
    out << hadamard::dump_stable(j, -1) << '\n';
    if (!out) throw error("write to findings file '" + path + "' failed");
}

}  // namespace detail

/// Appends one finding as a single JSON line.
inline void append_finding(const std::string& path, const Finding& f) { detail::append_line(path, to_json(f)); }

inline void append_exhausted(const std::string& path, const ExhaustedRecord& e) {
    detail::append_line(path, to_json(e));
}

struct Corpus {
    std::vector<Finding> findings;
    std::vector<ExhaustedRecord> exhausted;
};

inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open findings file '" + path + "'");
    Corpus c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = parse_json_text(line, path + ":" + std::to_string(lineno));
        if (j.at("kind").get<std::string>() == "exhausted") c.exhausted.push_back(exhausted_from_json(j));
        else c.findings.push_back(finding_from_json(j));
    }
    return c;
}

struct Reverification {
    bool ok = false;
    double max_rel_diff = 0.0;
    Finding recomputed;
};

/// Re-evaluates a finding's values from its matrices; ok when every value agrees
/// within rel_tol relative and the gap is reproduced.
inline Reverification reverify(const Finding& f, const ToleranceConfig& cfg = {}, double rel_tol = 1e-9) {
    Reverification rv;
    if (f.kind == FindingKind::extremal_slack) {
        const ChainId id = parse_chain_id(f.seed_trail.target);
        const auto r = evaluate_chain(id, f.matrices, f.seed_trail.params.value_or(ChainParams{}), cfg);
        rv.recomputed = f;
        rv.recomputed.values.clear();
        for (const auto& t : r.terms) rv.recomputed.values.emplace_back(t.label, t.value);
        rv.recomputed.gap = r.min_slack;
    } else {
        if (f.matrices.size() != 2) throw contract_error("pair finding must carry two matrices");
        const auto ev = detail::evaluate_pair(f.kind, f.matrices[0], f.matrices[1], cfg);
        rv.recomputed = f;
        rv.recomputed.values = ev.values;
        rv.recomputed.gap = ev.gap;
    }
    if (rv.recomputed.values.size() != f.values.size()) return rv;
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); };
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (rv.recomputed.values[k].first != f.values[k].first) return rv;
        rv.max_rel_diff = std::max(rv.max_rel_diff, rel(rv.recomputed.values[k].second, f.values[k].second));
    }
    rv.max_rel_diff = std::max(rv.max_rel_diff, rel(rv.recomputed.gap, f.gap));
    rv.ok = rv.max_rel_diff <= rel_tol;
    return rv;
}

/// Regenerates a search finding's matrices from its seed trail alone.
inline std::vector<NonNegativeMatrix> regenerate_pair(const SeedTrail& s) {
    SplitMix64 rng(s.trial_seed);
    const std::size_t n = rng.integer(s.n_min, s.n_max);
    auto a = random_matrix(n, n, s.density, rng);
    auto b = random_matrix(n, n, s.density, rng);
    return {std::move(a), std::move(b)};
}

}  // namespace hadamard
