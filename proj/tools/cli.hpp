#pragma once

// Command-line driver. Exit codes: 0 success (every check holds), 1 a chain or scan
// was violated or a search found a witness, 2 usage or validation error, 3 numerical
// non-convergence.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hadamard/hadamard.hpp"

namespace hadamard::cli {

enum Exit : int { ok = 0, violated = 1, usage = 2, nonconvergence = 3 };

/// "start:stop:count"; start and stop may be the literal m (number of operands).
inline std::vector<double> parse_grid(const std::string& spec, std::size_t m) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos || spec.find(':', c2 + 1) != std::string::npos) {
        throw contract_error("grid '" + spec + "' must have the form start:stop:count");
    }
    auto value = [&](const std::string& s) -> double {
        if (s == "m") return static_cast<double>(m);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw contract_error("grid bound '" + s + "' is not a number or m");
        return v;
    };
    const double start = value(spec.substr(0, c1));
    const double stop = value(spec.substr(c1 + 1, c2 - c1 - 1));
    const std::string cs = spec.substr(c2 + 1);
    if (cs.empty() || cs.find_first_not_of("0123456789") != std::string::npos) {
        throw contract_error("grid count '" + cs + "' must be a positive integer");
    }
    return linear_grid(start, stop, static_cast<std::size_t>(std::stoull(cs)));
}

/// "k" or "lo:hi".
inline std::pair<std::size_t, std::size_t> parse_n_range(const std::string& s) {
    auto num = [&](const std::string& t) {
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
            throw contract_error("--n expects k or lo:hi, got '" + s + "'");
        }
        return static_cast<std::size_t>(std::stoull(t));
    };
    const auto c = s.find(':');
    if (c == std::string::npos) {
        const auto n = num(s);
        return {n, n};
    }
    return {num(s.substr(0, c)), num(s.substr(c + 1))};
}

inline std::vector<NonNegativeMatrix> load_all(const std::vector<std::string>& paths) {
    std::vector<NonNegativeMatrix> mats;
    for (const auto& p : paths) mats.push_back(load_matrix(p));
    return mats;
}

inline json search_config_json(const SearchConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["density"] = c.density;
    j["trials"] = c.trials;
    j["target_gap"] = c.target_gap;
    return j;
}

struct Fixture {
    std::string name;
    std::string quantity;
    double expected;
    double computed;
    double tol;
};

inline json demo_json(bool& all_match) {
    const NonNegativeMatrix ones{{1, 1}, {1, 1}};
    const NonNegativeMatrix nil{{0, 1}, {0, 0}};
    const auto [ja, jb] = jordan_naive_fixture();
    const std::vector<double> grid{1, 2, 4};
    const auto scan = scan_monotone({ones}, grid);
    const auto wscan = scan_numrad({nil}, grid);
    const auto pair = evaluate_fixture(FindingKind::jordan_naive_violation, ja, jb);

    std::vector<Fixture> fx{
        {"all-ones 2x2", "rho(A)", 2.0, spectral_radius(ones).value, 1e-9},
        {"all-ones 2x2", "r(1) = rho(A^(1))", 2.0, scan.r_values[0], 1e-9},
        {"all-ones 2x2", "r(2) = rho(A^(2))^{1/2}", std::sqrt(2.0), scan.r_values[1], 1e-9},
        {"all-ones 2x2", "r(4) = rho(A^(4))^{1/4}", std::pow(2.0, 0.25), scan.r_values[2], 1e-9},
        {"nilpotent [[0,1],[0,0]]", "w(A)", 0.5, numerical_radius(nil).value, 1e-10},
        {"nilpotent [[0,1],[0,0]]", "w(A^(2))^{1/2}", std::sqrt(0.5), wscan.w_values[1], 1e-10},
        {"nilpotent [[0,1],[0,0]]", "w(A^(4))^{1/4}", std::pow(0.5, 0.25), wscan.w_values[2], 1e-10},
        {"A=[[0,1],[0,1]], B=[[1,1],[0,0]]", "||A∘B∘A||", 1.0, pair.value("||A∘B∘A||"), 0.0},
        {"A=[[0,1],[0,1]], B=[[1,1],[0,0]]", "||ABA||", 0.0, pair.value("||ABA||"), 0.0},
    };
    all_match = wscan.strictly_increasing && scan.monotone_r;
    json arr = json::array();
    for (const auto& f : fx) {
        const bool match = std::fabs(f.computed - f.expected) <= f.tol;
        all_match = all_match && match;
        json j;
        j["fixture"] = f.name;
        j["quantity"] = f.quantity;
        j["expected"] = f.expected;
        j["computed"] = f.computed;
        j["tol"] = f.tol;
        j["match"] = match;
        arr.push_back(std::move(j));
    }
    json out;
    out["fixtures"] = std::move(arr);
    json notes;
    notes["r_strictly_decreasing"] = scan.r_values[0] > scan.r_values[1] && scan.r_values[1] > scan.r_values[2];
    notes["numrad_scan_strictly_increasing"] = wscan.strictly_increasing;
    notes["naive_norm_inequality_violated"] = pair.gap > 0.0;
    out["checks"] = std::move(notes);
    out["all_match"] = all_match;
    return out;
}

/// Runs one invocation; output goes to `out` (or --out), diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hadamard-product spectral radius and norm inequalities on non-negative matrices", "hadamard_cli"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string out_path;
    app.add_option("--out", out_path, "Write the result to this file instead of standard output");

    // spectral
    auto* sp = app.add_subcommand("spectral", "Spectral radius, operator norm, numerical radius or max-times radius of one matrix");
    std::vector<std::string> sp_in;
    std::string sp_fn = "rho";
    sp->add_option("--in", sp_in, "Matrix JSON file")->required()->expected(1);
    sp->add_option("--fn", sp_fn, "Functional")
        ->check(CLI::IsMember({"rho", "norm1", "norm2", "norminf", "numrad", "maxtimes"}));

    // check
    auto* ck = app.add_subcommand("check", "Evaluate one inequality chain on the given operands");
    std::string ck_chain;
    std::vector<std::string> ck_in;
    std::optional<double> ck_t, ck_lambda, ck_tail;
    std::vector<double> ck_alpha, ck_coeff;
    std::string ck_p;
    double ck_tol = kDefaultChainTol;
    ck->add_option("--chain", ck_chain, "Chain id")->required();
    ck->add_option("--in", ck_in, "Operand matrix files in order (grid chains: row-major)")->required();
    ck->add_option("--t", ck_t, "Hadamard exponent t");
    ck->add_option("--lambda", ck_lambda, "Resolvent point lambda");
    ck->add_option("--alpha", ck_alpha, "Weight per operand column (repeatable)");
    ck->add_option("--coeff", ck_coeff, "Power-series coefficient c_0, c_1, ... (repeatable)");
    ck->add_option("--tail-bound", ck_tail, "Caller's bound on the truncated series tail");
    ck->add_option("--p", ck_p, "Norm for norm chains: 1, 2 or inf");
    ck->add_option("--tol", ck_tol, "Chain tolerance")->check(CLI::NonNegativeNumber);

    // scan
    auto* sc = app.add_subcommand("scan", "Sample r(t) and N(t), or the numerical-radius analogue, on a t grid");
    std::vector<std::string> sc_in;
    std::string sc_grid = "1:m:21", sc_fn = "r", sc_p = "2", sc_format = "json";
    sc->add_option("--in", sc_in, "Matrix files")->required();
    sc->add_option("--grid", sc_grid, "start:stop:count; m stands for the operand count")->capture_default_str();
    sc->add_option("--fn", sc_fn, "r (r and N) or numrad")->check(CLI::IsMember({"r", "numrad"}))->capture_default_str();
    sc->add_option("--p", sc_p, "Norm used for N(t)")->capture_default_str();
    sc->add_option("--format", sc_format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    // search
    auto* se = app.add_subcommand("search", "Random search for gaps, violations, or slack statistics");
    std::string se_target, se_chain, se_n = "2:4", se_findings;
    SearchConfig se_cfg;
    se->add_option("--target", se_target, "inequivalence, sfirst_middle, jordan_naive or tightness")
        ->required()
        ->check(CLI::IsMember({"inequivalence", "sfirst_middle", "jordan_naive", "tightness"}));
    se->add_option("--chain", se_chain, "Chain id (tightness only)");
    se->add_option("--n", se_n, "Matrix size k or range lo:hi")->capture_default_str();
    se->add_option("--seed", se_cfg.seed, "Base seed")->capture_default_str();
    se->add_option("--trials", se_cfg.trials, "Number of trials")->capture_default_str();
    se->add_option("--density", se_cfg.density, "Probability an entry is non-zero")->capture_default_str();
    se->add_option("--gap", se_cfg.target_gap, "Gap a hit must exceed")->capture_default_str();
    se->add_option("--findings", se_findings, "Append the finding or exhausted record to this JSON-lines file");

    // kernel
    auto* ke = app.add_subcommand("kernel", "Kernel geometric-mean check, or finite sections of an infinite matrix");
    std::vector<std::string> ke_formula;
    std::size_t ke_n = 64;
    std::vector<std::size_t> ke_size;
    bool ke_matrix = false;
    ke->add_option("--formula", ke_formula, "k(x,y) kernel or a(i,j) entry formula (repeatable)")->required();
    ke->add_option("--n", ke_n, "Midpoint grid size")->capture_default_str()->check(CLI::PositiveNumber);
    ke->add_option("--size", ke_size, "Section sizes for an a(i,j) formula (repeatable)");
    ke->add_flag("--matrix", ke_matrix, "Print the discretized operator matrix of a single kernel");

    // demo
    app.add_subcommand("demo", "Reproduce the reference fixtures");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run with --help for usage\n";
        return usage;
    }

    auto emit = [&](const std::string& text) {
        if (out_path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(out_path);
        if (!f) throw domain_error("cannot open output file '" + out_path + "'");
        f << text;
    };
    auto emit_json = [&](const json& j) { emit(dump_stable(j) + "\n"); };

    try {
        if (sp->parsed()) {
            const auto a = load_matrix(sp_in.front());
            SpectralEstimate e;
            if (sp_fn == "rho") e = spectral_radius(a);
            else if (sp_fn == "norm1") e = operator_norm(a, NormKind::one);
            else if (sp_fn == "norm2") e = operator_norm(a, NormKind::two);
            else if (sp_fn == "norminf") e = operator_norm(a, NormKind::inf);
            else if (sp_fn == "numrad") e = numerical_radius(a);
            else e = max_times_radius(a);
            json j;
            j["fn"] = sp_fn;
            j["rows"] = a.rows();
            j["cols"] = a.cols();
            j["estimate"] = to_json(e);
            emit_json(j);
            return e.converged ? ok : nonconvergence;
        }
        if (ck->parsed()) {
            const ChainId id = parse_chain_id(ck_chain);
            ChainParams params;
            params.t = ck_t;
            params.lambda = ck_lambda;
            params.alphas = ck_alpha;
            params.coeffs = ck_coeff;
            params.tail_bound = ck_tail;
            if (!ck_p.empty()) {
                if (!chain_info(id).uses_p) throw contract_error("--p applies only to norm chains");
                params.p = parse_norm_kind(ck_p);
            }
            const auto mats = load_all(ck_in);
            const auto r = evaluate_chain(id, mats, params, {}, ck_tol);
            emit_json(to_json(r));
            if (r.inconclusive) return nonconvergence;
            return r.holds ? ok : violated;
        }
        if (sc->parsed()) {
            const NormKind p = parse_norm_kind(sc_p);
            const auto mats = load_all(sc_in);
            const auto grid = parse_grid(sc_grid, mats.size());
            if (sc_fn == "numrad") {
                const auto s = scan_numrad(mats, grid);
                if (sc_format == "csv") emit(to_csv(s));
                else emit_json(to_json(s));
                return s.converged ? ok : nonconvergence;
            }
            const auto r = scan_monotone(mats, grid, {}, p);
            if (sc_format == "csv") emit(to_csv(r));
            else emit_json(to_json(r));
            if (!r.converged) return nonconvergence;
            return r.monotone_r && r.monotone_n && r.bounded_r && r.bounded_n ? ok : violated;
        }
        if (se->parsed()) {
            std::tie(se_cfg.n_min, se_cfg.n_max) = parse_n_range(se_n);
            se_cfg.validate();
            json j;
            j["target"] = se_target;
            j["config"] = search_config_json(se_cfg);
            if (se_target == "tightness") {
                if (se_chain.empty()) throw contract_error("--target tightness needs --chain");
                const ChainId id = parse_chain_id(se_chain);
                j["chain"] = se_chain;
                const auto st = tightness_stats(id, se_cfg);
                j["stats"] = to_json(st);
                if (!se_findings.empty() && st.extremal) append_finding(se_findings, *st.extremal);
                emit_json(j);
                if (st.violations > 0) return violated;
                return st.inconclusive > 0 ? nonconvergence : ok;
            }
            if (!se_chain.empty()) throw contract_error("--chain applies only to --target tightness");
            const SearchOutcome o = se_target == "inequivalence" ? search_inequivalence(se_cfg)
                                    : se_target == "sfirst_middle"
                                        ? search_violation(ViolationTarget::sfirst_middle, se_cfg)
                                        : search_violation(ViolationTarget::jordan_naive, se_cfg);
            j["outcome"] = o.exhausted() ? "exhausted" : "finding";
            j["trials_run"] = o.trials_run;
            j["inconclusive"] = o.inconclusive;
            if (o.finding) {
                j["finding"] = to_json(*o.finding);
                if (!se_findings.empty()) append_finding(se_findings, *o.finding);
            } else {
                const auto rec = exhausted_record(se_target, se_cfg, o);
                j["exhausted"] = to_json(rec);
                if (!se_findings.empty()) append_exhausted(se_findings, rec);
            }
            emit_json(j);
            return o.finding ? violated : ok;
        }
        if (ke->parsed()) {
            std::vector<EntryFormula> parsed;
            for (const auto& f : ke_formula) parsed.push_back(parse_entry_expr(f));
            const bool indices = parsed.front().domain() == FormulaDomain::indices;
            if (indices || !ke_size.empty()) {
                if (parsed.size() != 1) throw contract_error("finite sections take exactly one --formula");
                if (ke_matrix) throw contract_error("--matrix applies to kernels only");
                std::vector<std::size_t> sizes = ke_size;
                if (sizes.empty()) sizes = {2, 4, 8, 16};
                const TruncatedMatrixSpec spec(ke_formula.front(), sizes);
                const auto seq = truncation_sequence(spec);
                bool conv = true, nondecreasing = true;
                for (std::size_t k = 0; k < seq.size(); ++k) {
                    conv = conv && seq[k].estimate.converged;
                    if (k > 0 && seq[k - 1].estimate.value > seq[k].estimate.value + 1e-10) nondecreasing = false;
                }
                json j;
                j["mode"] = "truncation";
                j["formula"] = ke_formula.front();
                j["sequence"] = to_json(seq);
                j["non_decreasing"] = nondecreasing;
                emit_json(j);
                if (!conv) return nonconvergence;
                return nondecreasing ? ok : violated;
            }
            std::vector<KernelSpec> kernels;
            for (const auto& f : ke_formula) kernels.emplace_back(f);
            if (ke_matrix) {
                if (kernels.size() != 1) throw contract_error("--matrix takes exactly one --formula");
                emit_json(matrix_to_json(discretize(kernels.front(), ke_n)));
                return ok;
            }
            const auto r = kernel_geomean_check(kernels, ke_n);
            json j;
            j["mode"] = "kernel_geomean";
            j["n"] = ke_n;
            j["formulas"] = ke_formula;
            j["report"] = to_json(r);
            emit_json(j);
            if (r.inconclusive) return nonconvergence;
            return r.holds ? ok : violated;
        }
        bool all = false;
        emit_json(demo_json(all));
        return all ? ok : violated;
    } catch (const numerical_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return nonconvergence;
    } catch (const range_error& e) {
        err << "range error: " << e.what() << "\n";
        return nonconvergence;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace hadamard::cli
