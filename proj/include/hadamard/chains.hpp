#pragma once

/**
 * @file chains.hpp
 * @brief The catalog of Hadamard-product inequality chains and their evaluation.
 *
 * A chain is an ordered list of scalar terms t_1 <= t_2 <= ... <= t_k. Evaluating a
 * chain on concrete operands computes every term with the spectral module and
 * checks each adjacent pair at a relative-plus-absolute tolerance.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "nnmatrix.hpp"
#include "spectral.hpp"

namespace hadamard {

enum class ChainId {
    audenaert,
    horn_zhang,
    schep_corrected,
    peperko_mix,
    huang,
    geo_mean,
    ejs_product,
    weighted_mean_rho,
    weighted_mean_norm,
    hpow_rho,
    hpow_norm,
    hpow_le,
    dp_grid_rho,
    dp_grid_norm,
    dp_grid_le,
    numrad_grid,
    numrad_weighted,
    genP1_rho,
    genP1_norm,
    genP1_numrad,
    two_matrix_t_rho,
    two_matrix_t_norm,
    two_matrix_t_numrad,
    chen_zhang,
    gram,
    alt_transpose,
    atb,
    abtc,
    jordan,
    cs_numrad,
    spectral_map_exp,
    spectral_map_resolvent,
    power_series,
};

/// Which parameters a chain reads.
enum class ParamKind {
    none,
    weights_ge1,   // alphas, sum >= 1
    weights_eq1,   // alphas, sum == 1
    t_ge1,         // t >= 1
    t_in_1_m,      // t in [1, m]
    t_equals_m,    // t fixed to m
    t_in_1_2,      // t in [1, 2]
    t_equals_2,    // t fixed to 2
    lambda,        // lambda > rho(A1...Am)
    coefficients,  // non-negative power-series coefficients
};

struct ChainInfo {
    ChainId id;
    std::string_view name;
    std::size_t min_arity;  // operands; grid chains count whole grids
    std::size_t max_arity;  // 0 = unbounded
    ParamKind param;
    bool uses_p;            // norm chains with a selectable l^p norm
    bool grid;              // operands form a k x m grid (row-major)
    std::string_view statement;
};

inline constexpr std::array<ChainInfo, 33> kChainCatalog{{
    {ChainId::audenaert, "audenaert", 2, 2, ParamKind::none, false, false,
     "rho(A∘B) <= rho^{1/2}((A∘A)(B∘B)) <= rho(AB)"},
    {ChainId::horn_zhang, "horn_zhang", 2, 2, ParamKind::none, false, false,
     "rho(A∘B) <= rho^{1/2}(AB∘BA) <= rho(AB)"},
    {ChainId::schep_corrected, "schep_corrected", 2, 2, ParamKind::none, false, false,
     "rho(A∘B) <= rho^{1/2}((A∘A)(B∘B)) <= rho^{1/2}(AB∘AB) <= rho(AB)"},
    {ChainId::peperko_mix, "peperko_mix", 2, 2, ParamKind::none, false, false,
     "rho(A∘B) <= rho^{1/2}((A∘A)(B∘B)) <= rho^{1/4}(AB∘AB) rho^{1/4}(BA∘BA) <= rho(AB)"},
    {ChainId::huang, "huang", 1, 0, ParamKind::none, false, false,
     "rho(A1∘...∘Am) <= rho(A1...Am)"},
    {ChainId::geo_mean, "geo_mean", 1, 0, ParamKind::none, false, false,
     "rho(A1^(1/m)∘...∘Am^(1/m)) <= rho^{1/m}(A1...Am)"},
    {ChainId::ejs_product, "ejs_product", 1, 0, ParamKind::none, false, false,
     "rho(A1∘...∘Am) <= rho(A1)...rho(Am)"},
    {ChainId::weighted_mean_rho, "weighted_mean_rho", 1, 0, ParamKind::weights_ge1, false, false,
     "rho(A1^(a1)∘...∘Am^(am)) <= rho(A1)^a1...rho(Am)^am, sum(a) >= 1"},
    {ChainId::weighted_mean_norm, "weighted_mean_norm", 1, 0, ParamKind::weights_ge1, true, false,
     "||A1^(a1)∘...∘Am^(am)|| <= ||A1||^a1...||Am||^am, sum(a) >= 1"},
    {ChainId::hpow_rho, "hpow_rho", 1, 0, ParamKind::t_ge1, false, false,
     "rho(A1^(t)...Am^(t)) <= rho^t(A1...Am), t >= 1"},
    {ChainId::hpow_norm, "hpow_norm", 1, 0, ParamKind::t_ge1, true, false,
     "||A1^(t)...Am^(t)|| <= ||A1...Am||^t, t >= 1"},
    {ChainId::hpow_le, "hpow_le", 1, 0, ParamKind::t_ge1, false, false,
     "A1^(t)...Am^(t) <= (A1...Am)^(t) entrywise, t >= 1"},
    {ChainId::dp_grid_rho, "dp_grid_rho", 1, 0, ParamKind::weights_ge1, false, true,
     "rho(prod_i(A_i1^(a1)∘...∘A_im^(am))) <= rho(A_11...A_k1)^a1...rho(A_1m...A_km)^am"},
    {ChainId::dp_grid_norm, "dp_grid_norm", 1, 0, ParamKind::weights_ge1, true, true,
     "||prod_i(A_i1^(a1)∘...∘A_im^(am))|| <= ||A_11...A_k1||^a1...||A_1m...A_km||^am"},
    {ChainId::dp_grid_le, "dp_grid_le", 1, 0, ParamKind::weights_ge1, false, true,
     "prod_i(A_i1^(a1)∘...∘A_im^(am)) <= (A_11...A_k1)^(a1)∘...∘(A_1m...A_km)^(am) entrywise"},
    {ChainId::numrad_grid, "numrad_grid", 1, 0, ParamKind::weights_eq1, false, true,
     "w(prod_i(A_i1^(a1)∘...∘A_im^(am))) <= w(A_11...A_k1)^a1...w(A_1m...A_km)^am, sum(a) = 1"},
    {ChainId::numrad_weighted, "numrad_weighted", 1, 0, ParamKind::weights_eq1, false, false,
     "w(A1^(a1)∘...∘Am^(am)) <= w(A1)^a1...w(Am)^am, sum(a) = 1"},
    {ChainId::genP1_rho, "genP1_rho", 1, 0, ParamKind::t_in_1_m, false, false,
     "rho(A1∘...∘Am) <= rho^{1/m}(P1^(1/t)∘...∘Pm^(1/t)) <= rho^{1/t}(A1^(t)...Am^(t)) "
     "<= rho^{1/t}((A1...Am)^(t)) <= rho(A1...Am), t in [1,m]"},
    {ChainId::genP1_norm, "genP1_norm", 1, 0, ParamKind::t_in_1_m, true, false,
     "||(A1∘...∘Am)^m|| <= ||P1^(1/t)∘...∘Pm^(1/t)|| <= (||P1||...||Pm||)^{1/t} "
     "<= (prod_i ||C_i^(t)||)^{1/t} <= prod_i ||C_i||, C_i cyclic products, t in [1,m]"},
    {ChainId::genP1_numrad, "genP1_numrad", 1, 0, ParamKind::t_equals_m, false, false,
     "w((A1∘...∘Am)^m) <= w(P1^(1/m)∘...∘Pm^(1/m)) <= (w(P1)...w(Pm))^{1/m} "
     "<= (prod_i w(C_i^(m)))^{1/m}, t = m"},
    {ChainId::two_matrix_t_rho, "two_matrix_t_rho", 2, 2, ParamKind::t_in_1_2, false, false,
     "rho(A∘B) <= rho^{1/2}((A^(t)B^(t))^(1/t)∘(B^(t)A^(t))^(1/t)) <= rho^{1/t}(A^(t)B^(t)) "
     "<= rho^{1/t}((AB)^(t)) <= rho(AB), t in [1,2]"},
    {ChainId::two_matrix_t_norm, "two_matrix_t_norm", 2, 2, ParamKind::t_in_1_2, true, false,
     "||(A∘B)^2|| <= ||(A^(t)B^(t))^(1/t)∘(B^(t)A^(t))^(1/t)|| <= (||A^(t)B^(t)|| ||B^(t)A^(t)||)^{1/t} "
     "<= (||(AB)^(t)|| ||(BA)^(t)||)^{1/t} <= ||AB|| ||BA||, t in [1,2]"},
    {ChainId::two_matrix_t_numrad, "two_matrix_t_numrad", 2, 2, ParamKind::t_equals_2, false, false,
     "w((A∘B)^2) <= w((A^(2)B^(2))^(1/2)∘(B^(2)A^(2))^(1/2)) <= (w(A^(2)B^(2)) w(B^(2)A^(2)))^{1/2} "
     "<= (w((AB)^(2)) w((BA)^(2)))^{1/2}"},
    {ChainId::chen_zhang, "chen_zhang", 2, 0, ParamKind::t_in_1_m, false, false,
     "rho(H) <= rho^{1-t/m}(H) rho^{t/m^2}(P1^(1/t)∘...∘Pm^(1/t)) <= rho^{1-t/m}(H) rho^{1/m}(A1^(t)...Am^(t)) "
     "<= rho^{1-t/m}(H) rho^{1/m}((A1...Am)^(t)) <= rho(A1...Am), H = A1∘...∘Am, t in [1,m]"},
    {ChainId::gram, "gram", 1, 0, ParamKind::t_in_1_m, false, false,
     "||A1∘...∘Am||^2 <= rho(S1∘...∘Sm) <= rho^{1/m}(T1^(1/t)∘...∘Tm^(1/t)) <= rho^{1/t}(S1^(t)...Sm^(t)) "
     "<= rho^{1/t}((S1...Sm)^(t)) <= rho(S1...Sm), S_i = A_i A_i^T, t in [1,m]"},
    {ChainId::alt_transpose, "alt_transpose", 1, 0, ParamKind::none, false, false,
     "m even: ||A1∘...∘Am||^2 <= rho^{2/m}(Q1∘...∘Qm) <= rho(A1^TA2...Am-1^TAm) rho(A1A2^T...Am-1Am^T); "
     "m odd: ||A1∘...∘Am||^2 <= rho^{1/m}(R1∘...∘Rm) <= rho(A1A2^TA3...AmA1^TA2...Am^T)"},
    {ChainId::atb, "atb", 2, 2, ParamKind::none, false, false,
     "||A∘B|| <= rho^{1/2}((A^TB)∘(B^TA)) <= rho(A^TB)"},
    {ChainId::abtc, "abtc", 3, 3, ParamKind::none, false, false,
     "||A∘B∘C|| <= rho^{1/6}((A^TBC^TAB^TC)∘(B^TCA^TBC^TA)∘(C^TAB^TCA^TB)) <= rho^{1/2}(AB^TCA^TBC^T)"},
    {ChainId::jordan, "jordan", 2, 2, ParamKind::none, false, false,
     "||A∘B^T∘A|| <= rho^{1/6}((A^TB^TA^TABA)∘(BAA^TB^TA^TA)∘(A^TABAA^TB^T)) <= ||ABA||"},
    {ChainId::cs_numrad, "cs_numrad", 1, 0, ParamKind::none, false, false,
     "w(A1∘...∘Am) <= (w(A1^(m))...w(Am^(m)))^{1/m}"},
    {ChainId::spectral_map_exp, "spectral_map_exp", 1, 0, ParamKind::none, false, false,
     "rho(exp(A1∘...∘Am)) <= rho(exp(A1...Am))"},
    {ChainId::spectral_map_resolvent, "spectral_map_resolvent", 1, 0, ParamKind::lambda, false, false,
     "rho((lambda I - A1∘...∘Am)^{-1}) <= rho((lambda I - A1...Am)^{-1}), lambda > rho(A1...Am)"},
    {ChainId::power_series, "power_series", 1, 0, ParamKind::coefficients, false, false,
     "rho(f(A1∘...∘Am)) <= rho(f(A1...Am)), f with non-negative coefficients"},
}};

inline const ChainInfo& chain_info(ChainId id) {
    for (const auto& c : kChainCatalog)
        if (c.id == id) return c;
    throw contract_error("unknown chain id");
}

inline std::string_view to_string(ChainId id) { return chain_info(id).name; }

inline std::string chain_names() {
    std::string out;
    for (const auto& c : kChainCatalog) {
        if (!out.empty()) out += ", ";
        out += c.name;
    }
    return out;
}

inline ChainId parse_chain_id(std::string_view name) {
    for (const auto& c : kChainCatalog)
        if (c.name == name) return c.id;
    throw contract_error("unknown chain '" + std::string(name) + "'; valid chains: " + chain_names());
}

struct ChainParams {
    std::optional<double> t;
    std::optional<double> lambda;
    std::optional<NormKind> p;
    std::vector<double> alphas;
    std::vector<double> coeffs;
    std::optional<double> tail_bound;  // caller's bound on the truncated series tail; reported only
};

struct ChainTerm {
    std::string label;
    double value = 0.0;
    SpectralEstimate estimate;  // aggregated over every functional the term uses
};

struct ChainReport {
    ChainId chain{};
    ChainParams params;  // with defaults resolved
    std::vector<ChainTerm> terms;
    bool holds = false;
    bool inconclusive = false;  // some estimate did not converge; not a violation
    double min_slack = 0.0;
    double tol = 1e-9;
    std::string warning;
};

inline constexpr double kDefaultChainTol = 1e-9;

/// Fills holds, min_slack, inconclusive and warning from the terms and tol.
inline void assess_report(ChainReport& report) {
    if (report.terms.size() < 2) throw contract_error("a chain needs at least two terms");
    const double tol = report.tol;
    report.holds = true;
    report.inconclusive = false;
    report.warning.clear();
    report.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < report.terms.size(); ++i) {
        const double lo = report.terms[i].value;
        const double hi = report.terms[i + 1].value;
        report.min_slack = std::min(report.min_slack, hi - lo);
        if (!(lo <= hi + tol * std::max(1.0, hi))) report.holds = false;
    }
    for (std::size_t i = 0; i < report.terms.size(); ++i) {
        if (!report.terms[i].estimate.converged) {
            report.inconclusive = true;
            report.holds = false;
            if (report.warning.empty()) {
                report.warning = "estimate for term " + std::to_string(i + 1) + " (" + report.terms[i].label +
                                 ") did not converge; result is inconclusive, not a violation";
            }
        }
    }
}

namespace detail {

/// A scalar with the convergence bookkeeping of every estimate it was built from.
struct Quantity {
    double value = 0.0;
    bool converged = true;
    unsigned iterations = 0;
    double residual = 0.0;
    Method method = Method::closed_form;

    static Quantity of(const SpectralEstimate& e) {
        return {e.value, e.converged, e.iterations, e.residual, e.method};
    }
    static Quantity exact(double v) { return {v, true, 0, 0.0, Method::closed_form}; }

    Quantity pow(double e) const {
        Quantity q = *this;
        q.value = std::pow(value, e);  // pow(0, 0) = 1
        return q;
    }

    friend Quantity operator*(const Quantity& a, const Quantity& b) {
        return {a.value * b.value, a.converged && b.converged, a.iterations + b.iterations,
                std::max(a.residual, b.residual), a.method == Method::closed_form ? b.method : a.method};
    }

    SpectralEstimate estimate() const { return {value, iterations, residual, converged, method}; }
};

using Mats = std::vector<NonNegativeMatrix>;

struct Evaluator {
    const ToleranceConfig& cfg;
    NormKind p = NormKind::two;

    Quantity rho(const NonNegativeMatrix& a) const { return Quantity::of(spectral_radius(a, cfg)); }
    Quantity norm(const NonNegativeMatrix& a) const { return Quantity::of(operator_norm(a, p, cfg)); }
    Quantity norm2(const NonNegativeMatrix& a) const {
        return Quantity::of(operator_norm(a, NormKind::two, cfg));
    }
    Quantity w(const NonNegativeMatrix& a) const { return Quantity::of(numerical_radius(a, cfg)); }
};

inline NonNegativeMatrix hprod(const Mats& m) { return hadamard_product(std::span<const NonNegativeMatrix>(m)); }
inline NonNegativeMatrix mprod(const Mats& m) { return product(std::span<const NonNegativeMatrix>(m)); }
inline NonNegativeMatrix T(const NonNegativeMatrix& a) { return a.transpose(); }

inline Mats hpow_all(const Mats& m, double t) {
    Mats out;
    out.reserve(m.size());
    for (const auto& a : m) out.push_back(hadamard_power(a, t));
    return out;
}

inline Mats all_cyclic_words(const Mats& m) {
    Mats out;
    for (std::size_t i = 0; i < m.size(); ++i) out.push_back(cyclic_word(m, i));
    return out;
}

template <typename F>
Quantity product_over(const Mats& m, F&& f) {
    Quantity acc = Quantity::exact(1.0);
    for (const auto& a : m) acc = acc * f(a);
    return acc;
}

/// Word over the operands: indices into mats with a transpose flag per factor.
inline NonNegativeMatrix word(const Mats& mats, std::span<const std::pair<std::size_t, bool>> factors) {
    NonNegativeMatrix acc = factors[0].second ? T(mats[factors[0].first]) : mats[factors[0].first];
    for (std::size_t k = 1; k < factors.size(); ++k) {
        const auto& [idx, tr] = factors[k];
        acc = matmul(acc, tr ? T(mats[idx]) : mats[idx]);
    }
    return acc;
}

/// Cyclic alternating word of length len starting at operand `start`; factor k is
/// transposed when (k % 2 == 0) == transpose_even.
inline NonNegativeMatrix alternating_word(const Mats& mats, std::size_t start, std::size_t len,
                                          bool transpose_even) {
    std::vector<std::pair<std::size_t, bool>> f;
    for (std::size_t k = 0; k < len; ++k) f.emplace_back((start + k) % mats.size(), (k % 2 == 0) == transpose_even);
    return word(mats, f);
}

struct Built {
    std::vector<ChainTerm> terms;
    void add(std::string label, const Quantity& q) { terms.push_back({std::move(label), q.value, q.estimate()}); }
};

inline Quantity excess(const NonNegativeMatrix& lhs, const NonNegativeMatrix& rhs) {
    return Quantity::exact(max_scaled_excess(lhs, rhs));
}

}  // namespace detail

/// Evaluates every term of a catalog chain on concrete operands.
///
/// Operands must be square matrices of one size, in the order the chain names them.
/// Grid chains take k*m operands row-major (row i lists A_i1..A_im) with m = number of
/// weights. Missing parameters default to: t = 1 (t = m or 2 where fixed), uniform
/// weights 1/m (one grid row), p = 2, lambda = rho(A1...Am) + 1.
inline ChainReport evaluate_chain(ChainId chain, const std::vector<NonNegativeMatrix>& mats,
                                  ChainParams params = {}, const ToleranceConfig& cfg = {},
                                  double tol = kDefaultChainTol) {
    using namespace detail;
    const ChainInfo& info = chain_info(chain);
    cfg.validate();
    if (!(tol >= 0.0)) throw contract_error("chain tolerance must be >= 0");

    // operand contract
    if (mats.empty()) throw contract_error(std::string(info.name) + ": at least one operand required");
    const std::size_t n = mats.front().rows();
    for (const auto& a : mats) {
        if (!a.square() || a.rows() != n) {
            throw contract_error(std::string(info.name) + ": operands must be square matrices of one size");
        }
    }
    std::size_t m = mats.size();
    std::size_t k_rows = 1;
    if (info.grid) {
        if (params.alphas.empty()) params.alphas.assign(mats.size(), 1.0 / static_cast<double>(mats.size()));
        m = params.alphas.size();
        if (mats.size() % m != 0) {
            throw contract_error(std::string(info.name) + ": " + std::to_string(mats.size()) +
                                 " operands do not form a grid with " + std::to_string(m) + " columns");
        }
        k_rows = mats.size() / m;
    } else if (m < info.min_arity || (info.max_arity != 0 && m > info.max_arity)) {
        throw contract_error(std::string(info.name) + ": expects " +
                             (info.max_arity == info.min_arity
                                  ? std::to_string(info.min_arity)
                                  : "at least " + std::to_string(info.min_arity)) +
                             " operands, got " + std::to_string(m));
    }
    const double md = static_cast<double>(m);

    // parameter contract
    auto check_weights = [&](bool exact_one) {
        if (params.alphas.empty()) params.alphas.assign(m, 1.0 / md);
        if (params.alphas.size() != m) {
            throw contract_error(std::string(info.name) + ": need one weight per operand column");
        }
        for (double a : params.alphas)
            if (!std::isfinite(a) || a <= 0.0) throw contract_error(std::string(info.name) + ": weights must be > 0");
        double s = 0.0;
        for (double a : params.alphas) s += a;
        if (exact_one ? std::fabs(s - 1.0) > kWeightSumSlack : s < 1.0 - kWeightSumSlack) {
            throw contract_error(std::string(info.name) + (exact_one ? ": weights must sum to 1" : ": weights must sum to at least 1"));
        }
    };
    auto check_t = [&](double lo, double hi, double fallback) {
        if (!params.t) params.t = fallback;
        const double t = *params.t;
        if (!std::isfinite(t) || t < lo || t > hi) {
            throw contract_error(std::string(info.name) + ": t = " + std::to_string(t) + " outside [" +
                                 std::to_string(lo) + ", " + (std::isinf(hi) ? std::string("inf") : std::to_string(hi)) + "]");
        }
    };
    switch (info.param) {
        case ParamKind::none: break;
        case ParamKind::weights_ge1: check_weights(false); break;
        case ParamKind::weights_eq1: check_weights(true); break;
        case ParamKind::t_ge1: check_t(1.0, std::numeric_limits<double>::infinity(), 1.0); break;
        case ParamKind::t_in_1_m: check_t(1.0, md, 1.0); break;
        case ParamKind::t_equals_m: check_t(md, md, md); break;
        case ParamKind::t_in_1_2: check_t(1.0, 2.0, 1.0); break;
        case ParamKind::t_equals_2: check_t(2.0, 2.0, 2.0); break;
        case ParamKind::lambda: break;  // needs rho(A1...Am); checked below
        case ParamKind::coefficients:
            if (params.coeffs.empty()) throw contract_error("power_series: coefficient list required");
            for (double c : params.coeffs)
                if (!std::isfinite(c) || c < 0.0) throw contract_error("power_series: coefficients must be >= 0");
            break;
    }
    if (info.uses_p) {
        if (!params.p) params.p = NormKind::two;
    } else {
        params.p.reset();
    }

    Evaluator ev{cfg, params.p.value_or(NormKind::two)};
    Built b;
    const double t = params.t.value_or(1.0);

    switch (chain) {
        case ChainId::audenaert:
        case ChainId::horn_zhang:
        case ChainId::schep_corrected:
        case ChainId::peperko_mix: {
            const auto& A = mats[0];
            const auto& B = mats[1];
            const auto AB = matmul(A, B);
            const auto BA = matmul(B, A);
            b.add("rho(A∘B)", ev.rho(hadamard_product(A, B)));
            if (chain == ChainId::horn_zhang) {
                b.add("rho^{1/2}(AB∘BA)", ev.rho(hadamard_product(AB, BA)).pow(0.5));
            } else {
                b.add("rho^{1/2}((A∘A)(B∘B))", ev.rho(matmul(hadamard_product(A, A), hadamard_product(B, B))).pow(0.5));
            }
            if (chain == ChainId::schep_corrected) {
                b.add("rho^{1/2}(AB∘AB)", ev.rho(hadamard_product(AB, AB)).pow(0.5));
            } else if (chain == ChainId::peperko_mix) {
                b.add("rho^{1/4}(AB∘AB) rho^{1/4}(BA∘BA)",
                      ev.rho(hadamard_product(AB, AB)).pow(0.25) * ev.rho(hadamard_product(BA, BA)).pow(0.25));
            }
            b.add("rho(AB)", ev.rho(AB));
            break;
        }
        case ChainId::huang:
            b.add("rho(A1∘...∘Am)", ev.rho(hprod(mats)));
            b.add("rho(A1...Am)", ev.rho(mprod(mats)));
            break;
        case ChainId::geo_mean:
            b.add("rho(A1^(1/m)∘...∘Am^(1/m))", ev.rho(hprod(hpow_all(mats, 1.0 / md))));
            b.add("rho^{1/m}(A1...Am)", ev.rho(mprod(mats)).pow(1.0 / md));
            break;
        case ChainId::ejs_product:
            b.add("rho(A1∘...∘Am)", ev.rho(hprod(mats)));
            b.add("rho(A1)...rho(Am)", product_over(mats, [&](const auto& a) { return ev.rho(a); }));
            break;
        case ChainId::weighted_mean_rho:
        case ChainId::weighted_mean_norm:
        case ChainId::numrad_weighted: {
            const WeightVector w(params.alphas);
            const auto mean = hadamard_weighted_geomean(mats, w);
            Quantity rhs = Quantity::exact(1.0);
            if (chain == ChainId::weighted_mean_rho) {
                b.add("rho(A1^(a1)∘...∘Am^(am))", ev.rho(mean));
                for (std::size_t k = 0; k < m; ++k) rhs = rhs * ev.rho(mats[k]).pow(w[k]);
                b.add("rho(A1)^a1...rho(Am)^am", rhs);
            } else if (chain == ChainId::weighted_mean_norm) {
                b.add("||A1^(a1)∘...∘Am^(am)||", ev.norm(mean));
                for (std::size_t k = 0; k < m; ++k) rhs = rhs * ev.norm(mats[k]).pow(w[k]);
                b.add("||A1||^a1...||Am||^am", rhs);
            } else {
                b.add("w(A1^(a1)∘...∘Am^(am))", ev.w(mean));
                for (std::size_t k = 0; k < m; ++k) rhs = rhs * ev.w(mats[k]).pow(w[k]);
                b.add("w(A1)^a1...w(Am)^am", rhs);
            }
            break;
        }
        case ChainId::hpow_rho:
        case ChainId::hpow_norm:
        case ChainId::hpow_le: {
            const auto lhs = mprod(hpow_all(mats, t));
            const auto prod_all = mprod(mats);
            if (chain == ChainId::hpow_le) {
                b.add("max_ij excess(A1^(t)...Am^(t), (A1...Am)^(t))", excess(lhs, hadamard_power(prod_all, t)));
                b.add("0", Quantity::exact(0.0));
            } else if (chain == ChainId::hpow_rho) {
                b.add("rho(A1^(t)...Am^(t))", ev.rho(lhs));
                b.add("rho^t(A1...Am)", ev.rho(prod_all).pow(t));
            } else {
                b.add("||A1^(t)...Am^(t)||", ev.norm(lhs));
                b.add("||A1...Am||^t", ev.norm(prod_all).pow(t));
            }
            break;
        }
        case ChainId::dp_grid_rho:
        case ChainId::dp_grid_norm:
        case ChainId::dp_grid_le:
        case ChainId::numrad_grid: {
            const WeightVector w(params.alphas);
            Mats row_means, col_products;
            for (std::size_t i = 0; i < k_rows; ++i) {
                const Mats row(mats.begin() + static_cast<std::ptrdiff_t>(i * m),
                               mats.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
                row_means.push_back(hadamard_weighted_geomean(row, w));
            }
            for (std::size_t j = 0; j < m; ++j) {
                Mats col;
                for (std::size_t i = 0; i < k_rows; ++i) col.push_back(mats[i * m + j]);
                col_products.push_back(mprod(col));
            }
            const auto lhs = mprod(row_means);
            const std::string lhs_label = "prod_i(A_i1^(a1)∘...∘A_im^(am))";
            Quantity rhs = Quantity::exact(1.0);
            switch (chain) {
                case ChainId::dp_grid_le:
                    b.add("max_ij excess(" + lhs_label + ", (A_11...A_k1)^(a1)∘...∘(A_1m...A_km)^(am))",
                          excess(lhs, hadamard_weighted_geomean(col_products, w)));
                    b.add("0", Quantity::exact(0.0));
                    break;
                case ChainId::dp_grid_rho:
                    b.add("rho(" + lhs_label + ")", ev.rho(lhs));
                    for (std::size_t j = 0; j < m; ++j) rhs = rhs * ev.rho(col_products[j]).pow(w[j]);
                    b.add("rho(A_11...A_k1)^a1...rho(A_1m...A_km)^am", rhs);
                    break;
                case ChainId::dp_grid_norm:
                    b.add("||" + lhs_label + "||", ev.norm(lhs));
                    for (std::size_t j = 0; j < m; ++j) rhs = rhs * ev.norm(col_products[j]).pow(w[j]);
                    b.add("||A_11...A_k1||^a1...||A_1m...A_km||^am", rhs);
                    break;
                default:
                    b.add("w(" + lhs_label + ")", ev.w(lhs));
                    for (std::size_t j = 0; j < m; ++j) rhs = rhs * ev.w(col_products[j]).pow(w[j]);
                    b.add("w(A_11...A_k1)^a1...w(A_1m...A_km)^am", rhs);
                    break;
            }
            break;
        }
        case ChainId::genP1_rho:
        case ChainId::genP1_norm:
        case ChainId::genP1_numrad:
        case ChainId::chen_zhang: {
            const auto P = cyclic_products(mats, t);
            const auto mean = hprod(hpow_all(P, 1.0 / t));
            const auto H = hprod(mats);
            const auto prod_all = mprod(mats);
            if (chain == ChainId::genP1_rho) {
                b.add("rho(A1∘...∘Am)", ev.rho(H));
                b.add("rho^{1/m}(P1^(1/t)∘...∘Pm^(1/t))", ev.rho(mean).pow(1.0 / md));
                b.add("rho^{1/t}(A1^(t)...Am^(t))", ev.rho(P[0]).pow(1.0 / t));
                b.add("rho^{1/t}((A1...Am)^(t))", ev.rho(hadamard_power(prod_all, t)).pow(1.0 / t));
                b.add("rho(A1...Am)", ev.rho(prod_all));
            } else if (chain == ChainId::chen_zhang) {
                const Quantity base = ev.rho(H);
                const Quantity lead = base.pow(1.0 - t / md);
                b.add("rho(A1∘...∘Am)", base);
                b.add("rho^{1-t/m}(A1∘...∘Am) rho^{t/m^2}(P1^(1/t)∘...∘Pm^(1/t))", lead * ev.rho(mean).pow(t / (md * md)));
                b.add("rho^{1-t/m}(A1∘...∘Am) rho^{1/m}(A1^(t)...Am^(t))", lead * ev.rho(P[0]).pow(1.0 / md));
                b.add("rho^{1-t/m}(A1∘...∘Am) rho^{1/m}((A1...Am)^(t))",
                      lead * ev.rho(hadamard_power(prod_all, t)).pow(1.0 / md));
                b.add("rho(A1...Am)", ev.rho(prod_all));
            } else {
                const auto Hm = matrix_power(H, static_cast<unsigned>(m));
                const auto C = all_cyclic_words(mats);
                if (chain == ChainId::genP1_norm) {
                    b.add("||(A1∘...∘Am)^m||", ev.norm(Hm));
                    b.add("||P1^(1/t)∘...∘Pm^(1/t)||", ev.norm(mean));
                    b.add("(||P1||...||Pm||)^{1/t}", product_over(P, [&](const auto& a) { return ev.norm(a); }).pow(1.0 / t));
                    b.add("(||(A1...Am)^(t)||...||(AmA1...Am-1)^(t)||)^{1/t}",
                          product_over(C, [&](const auto& c) { return ev.norm(hadamard_power(c, t)); }).pow(1.0 / t));
                    b.add("||A1...Am||...||AmA1...Am-1||", product_over(C, [&](const auto& c) { return ev.norm(c); }));
                } else {
                    b.add("w((A1∘...∘Am)^m)", ev.w(Hm));
                    b.add("w(P1^(1/m)∘...∘Pm^(1/m))", ev.w(mean));
                    b.add("(w(P1)...w(Pm))^{1/m}", product_over(P, [&](const auto& a) { return ev.w(a); }).pow(1.0 / md));
                    b.add("(w((A1...Am)^(m))...w((AmA1...Am-1)^(m)))^{1/m}",
                          product_over(C, [&](const auto& c) { return ev.w(hadamard_power(c, md)); }).pow(1.0 / md));
                }
            }
            break;
        }
        case ChainId::two_matrix_t_rho:
        case ChainId::two_matrix_t_norm:
        case ChainId::two_matrix_t_numrad: {
            const auto& A = mats[0];
            const auto& B = mats[1];
            const auto At = hadamard_power(A, t);
            const auto Bt = hadamard_power(B, t);
            const auto AtBt = matmul(At, Bt);
            const auto BtAt = matmul(Bt, At);
            const auto mid = hadamard_product(hadamard_power(AtBt, 1.0 / t), hadamard_power(BtAt, 1.0 / t));
            const auto AB = matmul(A, B);
            const auto BA = matmul(B, A);
            const auto HAB = hadamard_product(A, B);
            if (chain == ChainId::two_matrix_t_rho) {
                b.add("rho(A∘B)", ev.rho(HAB));
                b.add("rho^{1/2}((A^(t)B^(t))^(1/t)∘(B^(t)A^(t))^(1/t))", ev.rho(mid).pow(0.5));
                b.add("rho^{1/t}(A^(t)B^(t))", ev.rho(AtBt).pow(1.0 / t));
                b.add("rho^{1/t}((AB)^(t))", ev.rho(hadamard_power(AB, t)).pow(1.0 / t));
                b.add("rho(AB)", ev.rho(AB));
            } else if (chain == ChainId::two_matrix_t_norm) {
                b.add("||(A∘B)^2||", ev.norm(matmul(HAB, HAB)));
                b.add("||(A^(t)B^(t))^(1/t)∘(B^(t)A^(t))^(1/t)||", ev.norm(mid));
                b.add("(||A^(t)B^(t)|| ||B^(t)A^(t)||)^{1/t}", (ev.norm(AtBt) * ev.norm(BtAt)).pow(1.0 / t));
                b.add("(||(AB)^(t)|| ||(BA)^(t)||)^{1/t}",
                      (ev.norm(hadamard_power(AB, t)) * ev.norm(hadamard_power(BA, t))).pow(1.0 / t));
                b.add("||AB|| ||BA||", ev.norm(AB) * ev.norm(BA));
            } else {
                b.add("w((A∘B)^2)", ev.w(matmul(HAB, HAB)));
                b.add("w((A^(2)B^(2))^(1/2)∘(B^(2)A^(2))^(1/2))", ev.w(mid));
                b.add("(w(A^(2)B^(2)) w(B^(2)A^(2)))^{1/2}", (ev.w(AtBt) * ev.w(BtAt)).pow(0.5));
                b.add("(w((AB)^(2)) w((BA)^(2)))^{1/2}",
                      (ev.w(hadamard_power(AB, 2.0)) * ev.w(hadamard_power(BA, 2.0))).pow(0.5));
            }
            break;
        }
        case ChainId::gram: {
            Mats S;
            for (const auto& a : mats) S.push_back(matmul(a, T(a)));
            const auto Tc = cyclic_products(S, t);
            const auto prod_s = mprod(S);
            b.add("||A1∘...∘Am||^2", ev.norm2(hprod(mats)).pow(2.0));
            b.add("rho(S1∘...∘Sm)", ev.rho(hprod(S)));
            b.add("rho^{1/m}(T1^(1/t)∘...∘Tm^(1/t))", ev.rho(hprod(hpow_all(Tc, 1.0 / t))).pow(1.0 / md));
            b.add("rho^{1/t}(S1^(t)...Sm^(t))", ev.rho(Tc[0]).pow(1.0 / t));
            b.add("rho^{1/t}((S1...Sm)^(t))", ev.rho(hadamard_power(prod_s, t)).pow(1.0 / t));
            b.add("rho(S1...Sm)", ev.rho(prod_s));
            break;
        }
        case ChainId::alt_transpose: {
            const Quantity lhs = ev.norm2(hprod(mats)).pow(2.0);
            b.add("||A1∘...∘Am||^2", lhs);
            Mats words;
            if (m % 2 == 0) {
                for (std::size_t i = 0; i < m; ++i) words.push_back(alternating_word(mats, i, m, true));
                b.add("rho^{2/m}(Q1∘...∘Qm), Qi = Ai^TAi+1Ai+2^T...Ai-1", ev.rho(hprod(words)).pow(2.0 / md));
                b.add("rho(A1^TA2A3^TA4...Am-1^TAm) rho(A1A2^TA3A4^T...Am-1Am^T)",
                      ev.rho(alternating_word(mats, 0, m, true)) * ev.rho(alternating_word(mats, 0, m, false)));
            } else {
                for (std::size_t i = 0; i < m; ++i) words.push_back(alternating_word(mats, i, 2 * m, true));
                b.add("rho^{1/m}(R1∘...∘Rm), Ri = Ai^TAi+1Ai+2^T... (2m factors)", ev.rho(hprod(words)).pow(1.0 / md));
                b.add("rho(A1A2^TA3...AmA1^TA2A3^T...Am^T)", ev.rho(alternating_word(mats, 0, 2 * m, false)));
            }
            break;
        }
        case ChainId::atb: {
            const auto& A = mats[0];
            const auto& B = mats[1];
            const auto AtB = matmul(T(A), B);
            b.add("||A∘B||", ev.norm2(hadamard_product(A, B)));
            b.add("rho^{1/2}((A^TB)∘(B^TA))", ev.rho(hadamard_product(AtB, matmul(T(B), A))).pow(0.5));
            b.add("rho(A^TB)", ev.rho(AtB));
            break;
        }
        case ChainId::abtc:
        case ChainId::jordan: {
            // jordan is abtc evaluated at (A, B^T, A)
            const Mats ops = chain == ChainId::abtc ? mats : Mats{mats[0], T(mats[1]), mats[0]};
            Mats words;
            for (std::size_t i = 0; i < 3; ++i) words.push_back(alternating_word(ops, i, 6, true));
            const auto mid = ev.rho(hprod(words)).pow(1.0 / 6.0);
            if (chain == ChainId::abtc) {
                b.add("||A∘B∘C||", ev.norm2(hprod(ops)));
                b.add("rho^{1/6}((A^TBC^TAB^TC)∘(B^TCA^TBC^TA)∘(C^TAB^TCA^TB))", mid);
                b.add("rho^{1/2}(AB^TCA^TBC^T)", ev.rho(alternating_word(ops, 0, 6, false)).pow(0.5));
            } else {
                const auto& A = mats[0];
                const auto& B = mats[1];
                b.add("||A∘B^T∘A||", ev.norm2(hprod(ops)));
                b.add("rho^{1/6}((A^TB^TA^TABA)∘(BAA^TB^TA^TA)∘(A^TABAA^TB^T))", mid);
                b.add("||ABA||", ev.norm2(matmul(A, matmul(B, A))));
            }
            break;
        }
        case ChainId::cs_numrad:
            b.add("w(A1∘...∘Am)", ev.w(hprod(mats)));
            b.add("(w(A1^(m))...w(Am^(m)))^{1/m}",
                  product_over(mats, [&](const auto& a) { return ev.w(hadamard_power(a, md)); }).pow(1.0 / md));
            break;
        case ChainId::spectral_map_exp:
            b.add("rho(exp(A1∘...∘Am))", ev.rho(matrix_exp(hprod(mats), cfg)));
            b.add("rho(exp(A1...Am))", ev.rho(matrix_exp(mprod(mats), cfg)));
            break;
        case ChainId::spectral_map_resolvent: {
            const auto H = hprod(mats);
            const auto prod_all = mprod(mats);
            const auto r = spectral_radius(prod_all, cfg);
            if (!params.lambda) params.lambda = r.value + 1.0;
            const double lambda = *params.lambda;
            if (!(lambda > r.value + cfg.rel_tol * std::max(1.0, r.value))) {
                throw contract_error("spectral_map_resolvent: lambda must exceed rho(A1...Am) = " +
                                     std::to_string(r.value));
            }
            b.add("rho((lambda I - A1∘...∘Am)^{-1})", ev.rho(resolvent(H, lambda, cfg)));
            b.add("rho((lambda I - A1...Am)^{-1})", ev.rho(resolvent(prod_all, lambda, cfg)));
            break;
        }
        case ChainId::power_series: {
            auto eval_series = [&](const NonNegativeMatrix& x) {
                const std::size_t dim = x.rows();
                const auto& c = params.coeffs;
                NonNegativeMatrix acc = NonNegativeMatrix::identity(dim).scaled(c.back());
                for (std::size_t j = c.size() - 1; j-- > 0;) {
                    acc = add(matmul(acc, x), NonNegativeMatrix::identity(dim).scaled(c[j]));
                }
                return acc;
            };
            b.add("rho(f(A1∘...∘Am))", ev.rho(eval_series(hprod(mats))));
            b.add("rho(f(A1...Am))", ev.rho(eval_series(mprod(mats))));
            break;
        }
    }

    ChainReport report;
    report.chain = chain;
    report.params = std::move(params);
    report.terms = std::move(b.terms);
    report.tol = tol;
    assess_report(report);
    return report;
}

/// The three conclusions for a k x m grid: entrywise, operator norm and spectral radius.
struct DpGridReport {
    ChainReport entrywise;
    ChainReport norm;
    ChainReport spectral;

    bool holds() const { return entrywise.holds && norm.holds && spectral.holds; }
};

inline DpGridReport verify_dp_grid(const std::vector<std::vector<NonNegativeMatrix>>& grid,
                                   const WeightVector& w, const ToleranceConfig& cfg = {},
                                   NormKind p = NormKind::two, double tol = kDefaultChainTol) {
    if (grid.empty()) throw contract_error("verify_dp_grid: empty grid");
    std::vector<NonNegativeMatrix> flat;
    for (const auto& row : grid) {
        if (row.size() != w.size()) throw contract_error("verify_dp_grid: ragged grid or weight count mismatch");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    ChainParams params;
    params.alphas.assign(w.alphas().begin(), w.alphas().end());
    ChainParams norm_params = params;
    norm_params.p = p;
    return {evaluate_chain(ChainId::dp_grid_le, flat, params, cfg, tol),
            evaluate_chain(ChainId::dp_grid_norm, flat, norm_params, cfg, tol),
            evaluate_chain(ChainId::dp_grid_rho, flat, params, cfg, tol)};
}

/// r(t) and N(t) sampled on a grid of t values.
struct MonotoneReport {
    std::vector<double> t_grid;
    std::vector<double> r_values;
    std::vector<double> n_values;
    double lower_bound_rho = 0.0;
    double lower_bound_norm = 0.0;
    bool monotone_r = true;
    bool monotone_n = true;
    bool bounded_r = true;
    bool bounded_n = true;
    bool converged = true;
    bool experimental = false;  // grid extends beyond t = m
    NormKind p = NormKind::two;
};

namespace detail {

inline void check_t_grid(std::span<const double> grid) {
    if (grid.empty()) throw contract_error("t grid must not be empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(grid[k]) || grid[k] < 1.0) throw contract_error("t grid values must be >= 1");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw contract_error("t grid must be strictly increasing");
    }
}

inline bool non_increasing(std::span<const double> v, double tol) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[k - 1] + tol * std::max(1.0, v[k - 1])) return false;
    return true;
}

}  // namespace detail

/// Samples r(t) = (prod rho(A_i^(t)))^{1/t} and N(t) = (prod ||A_i^(t)||)^{1/t}.
/// Both are non-increasing in t; the Hadamard-product lower bounds are checked only at
/// grid points t <= m, where they are guaranteed.
inline MonotoneReport scan_monotone(const std::vector<NonNegativeMatrix>& mats, std::span<const double> t_grid,
                                    const ToleranceConfig& cfg = {}, NormKind p = NormKind::two,
                                    double tol = kDefaultChainTol) {
    detail::require_square_family(mats, "scan_monotone");
    detail::check_t_grid(t_grid);
    MonotoneReport rep;
    rep.p = p;
    rep.t_grid.assign(t_grid.begin(), t_grid.end());
    const double md = static_cast<double>(mats.size());
    const auto H = detail::hprod(mats);
    const auto lb_rho = spectral_radius(H, cfg);
    const auto lb_norm = operator_norm(H, p, cfg);
    rep.lower_bound_rho = lb_rho.value;
    rep.lower_bound_norm = lb_norm.value;
    rep.converged = lb_rho.converged && lb_norm.converged;
    for (double t : t_grid) {
        double log_r = 0.0, log_n = 0.0;
        for (const auto& a : mats) {
            const auto at = hadamard_power(a, t);
            const auto r = spectral_radius(at, cfg);
            const auto nn = operator_norm(at, p, cfg);
            rep.converged = rep.converged && r.converged && nn.converged;
            log_r += std::log(r.value);
            log_n += std::log(nn.value);
        }
        rep.r_values.push_back(std::exp(log_r / t));
        rep.n_values.push_back(std::exp(log_n / t));
        if (t > md * (1.0 + 1e-12)) {
            rep.experimental = true;
        } else {
            const double r = rep.r_values.back();
            const double nv = rep.n_values.back();
            if (r + tol * std::max(1.0, r) < rep.lower_bound_rho) rep.bounded_r = false;
            if (nv + tol * std::max(1.0, nv) < rep.lower_bound_norm) rep.bounded_n = false;
        }
    }
    rep.monotone_r = detail::non_increasing(rep.r_values, tol);
    rep.monotone_n = detail::non_increasing(rep.n_values, tol);
    return rep;
}

/// (prod w(A_i^(t)))^{1/t} on a grid. Unlike r(t) this need not be monotone, so no
/// ordering is asserted; `increasing` and `non_increasing` merely describe the sample.
struct NumradScan {
    std::vector<double> t_grid;
    std::vector<double> w_values;
    bool strictly_increasing = true;
    bool non_increasing = true;
    bool converged = true;
};

inline NumradScan scan_numrad(const std::vector<NonNegativeMatrix>& mats, std::span<const double> t_grid,
                              const ToleranceConfig& cfg = {}, double tol = kDefaultChainTol) {
    detail::require_square_family(mats, "scan_numrad");
    detail::check_t_grid(t_grid);
    NumradScan s;
    s.t_grid.assign(t_grid.begin(), t_grid.end());
    for (double t : t_grid) {
        double log_w = 0.0;
        for (const auto& a : mats) {
            const auto e = numerical_radius(hadamard_power(a, t), cfg);
            s.converged = s.converged && e.converged;
            log_w += std::log(e.value);
        }
        s.w_values.push_back(std::exp(log_w / t));
    }
    for (std::size_t k = 1; k < s.w_values.size(); ++k) {
        if (!(s.w_values[k] > s.w_values[k - 1])) s.strictly_increasing = false;
    }
    s.non_increasing = detail::non_increasing(s.w_values, tol);
    return s;
}

/// count evenly spaced points from start to stop inclusive; start == stop gives one point.
inline std::vector<double> linear_grid(double start, double stop, std::size_t count) {
    if (!std::isfinite(start) || !std::isfinite(stop) || stop < start) {
        throw contract_error("grid needs finite start <= stop");
    }
    if (count == 0) throw contract_error("grid needs at least one point");
    if (start == stop || count == 1) return {start};
    std::vector<double> g(count);
    for (std::size_t k = 0; k < count; ++k) {
        g[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    g.back() = stop;
    return g;
}

}  // namespace hadamard
