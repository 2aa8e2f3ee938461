#pragma once

// JSON and CSV forms of the report types. Key order is fixed by insertion.

#include <cstdio>
#include <string>
#include <vector>

#include "chains.hpp"
#include "json_io.hpp"
#include "kernelgrid.hpp"
#include "spectral.hpp"

namespace hadamard {

inline json to_json(const SpectralEstimate& e) {
    json j;
    j["value"] = e.value;
    j["iterations"] = e.iterations;
    j["residual"] = e.residual;
    j["converged"] = e.converged;
    j["method"] = std::string(to_string(e.method));
    return j;
}

inline json to_json(const ChainParams& p) {
    json j = json::object();
    if (p.t) j["t"] = *p.t;
    if (p.lambda) j["lambda"] = *p.lambda;
    if (p.p) j["p"] = std::string(to_string(*p.p));
    if (!p.alphas.empty()) j["alphas"] = p.alphas;
    if (!p.coeffs.empty()) j["coeffs"] = p.coeffs;
    if (p.tail_bound) j["tail_bound"] = *p.tail_bound;
    return j;
}

inline NormKind parse_norm_kind(const std::string& s) {
    if (s == "1" || s == "one") return NormKind::one;
    if (s == "2" || s == "two") return NormKind::two;
    if (s == "inf" || s == "infinity") return NormKind::inf;
    throw contract_error("norm must be 1, 2 or inf, got '" + s + "'");
}

inline ChainParams chain_params_from_json(const json& j) {
    ChainParams p;
    if (!j.is_object()) throw contract_error("chain params must be a JSON object");
    if (j.contains("t")) p.t = j.at("t").get<double>();
    if (j.contains("lambda")) p.lambda = j.at("lambda").get<double>();
    if (j.contains("p")) p.p = parse_norm_kind(j.at("p").get<std::string>());
    if (j.contains("alphas")) p.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("coeffs")) p.coeffs = j.at("coeffs").get<std::vector<double>>();
    if (j.contains("tail_bound")) p.tail_bound = j.at("tail_bound").get<double>();
    return p;
}

inline json to_json(const ChainReport& r) {
    json j;
    j["chain"] = std::string(to_string(r.chain));
    j["params"] = to_json(r.params);
    json terms = json::array();
    for (const auto& t : r.terms) {
        json tj;
        tj["label"] = t.label;
        tj["value"] = t.value;
        tj["converged"] = t.estimate.converged;
        terms.push_back(std::move(tj));
    }
    j["terms"] = std::move(terms);
    j["holds"] = r.holds;
    j["inconclusive"] = r.inconclusive;
    j["min_slack"] = r.min_slack;
    j["tol"] = r.tol;
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

inline json to_json(const DpGridReport& r) {
    json j;
    j["entrywise"] = to_json(r.entrywise);
    j["norm"] = to_json(r.norm);
    j["spectral"] = to_json(r.spectral);
    j["holds"] = r.holds();
    return j;
}

inline json to_json(const MonotoneReport& r) {
    json j;
    j["t_grid"] = r.t_grid;
    j["r_values"] = r.r_values;
    j["n_values"] = r.n_values;
    j["p"] = std::string(to_string(r.p));
    j["lower_bound_rho"] = r.lower_bound_rho;
    j["lower_bound_norm"] = r.lower_bound_norm;
    j["monotone_r"] = r.monotone_r;
    j["monotone_n"] = r.monotone_n;
    j["bounded_r"] = r.bounded_r;
    j["bounded_n"] = r.bounded_n;
    j["converged"] = r.converged;
    j["experimental"] = r.experimental;
    return j;
}

inline json to_json(const NumradScan& s) {
    json j;
    j["t_grid"] = s.t_grid;
    j["w_values"] = s.w_values;
    j["strictly_increasing"] = s.strictly_increasing;
    j["non_increasing"] = s.non_increasing;
    j["converged"] = s.converged;
    return j;
}

inline json to_json(const std::vector<TruncationPoint>& seq) {
    json arr = json::array();
    for (const auto& p : seq) {
        json j;
        j["size"] = p.size;
        j["rho"] = p.estimate.value;
        j["converged"] = p.estimate.converged;
        arr.push_back(std::move(j));
    }
    return arr;
}

namespace detail {

inline std::string csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

}  // namespace detail

/// Columns t, r, N with a header row.
inline std::string to_csv(const MonotoneReport& r) {
    std::string out = "t,r,N\n";
    for (std::size_t k = 0; k < r.t_grid.size(); ++k) {
        out += detail::csv_double(r.t_grid[k]) + "," + detail::csv_double(r.r_values[k]) + "," +
               detail::csv_double(r.n_values[k]) + "\n";
    }
    return out;
}

/// Columns t, w with a header row.
inline std::string to_csv(const NumradScan& s) {
    std::string out = "t,w\n";
    for (std::size_t k = 0; k < s.t_grid.size(); ++k) {
        out += detail::csv_double(s.t_grid[k]) + "," + detail::csv_double(s.w_values[k]) + "\n";
    }
    return out;
}

}  // namespace hadamard
