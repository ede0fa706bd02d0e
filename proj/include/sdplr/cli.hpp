#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdplr/bench.hpp"
#include "sdplr/serialize.hpp"

namespace sdplr {

namespace cli_detail {

struct SolveFlags {
    std::string input;
    double tol = 1e-2;
    std::optional<double> omega;
    std::optional<double> xi;
    int rank0 = 10;
    std::optional<int> fixed_rank;
    std::optional<std::uint64_t> seed;
    double time_limit = std::numeric_limits<double>::infinity();
    std::optional<double> trace_bound;
    int round_trials = 0;
    std::string log_path;
    int max_outer = 1000;
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SDPLR_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
        }
    }
    return 0;
}

inline SolverConfig make_config(const SolveFlags& f) {
    SolverConfig cfg;
    cfg.omega_star = f.omega.value_or(f.tol);
    cfg.xi_star = f.xi.value_or(f.tol);
    cfg.initial_rank = f.fixed_rank.value_or(f.rank0);
    cfg.dynamic_rank = !f.fixed_rank.has_value();
    cfg.seed = resolve_seed(f.seed);
    cfg.time_limit_seconds = f.time_limit;
    cfg.max_outer = f.max_outer;
    return cfg;
}

inline void add_solve_flags(CLI::App* cmd, SolveFlags& f, bool with_round) {
    cmd->add_option("--input", f.input, "input file")->required();
    cmd->add_option("--tol", f.tol, "target for both primal infeasibility and suboptimality");
    cmd->add_option("--omega", f.omega, "override the primal infeasibility target");
    cmd->add_option("--xi", f.xi, "override the suboptimality target");
    cmd->add_option("--rank0", f.rank0, "initial rank for the dynamic update");
    cmd->add_option("--fixed-rank", f.fixed_rank, "pin the rank and disable doubling");
    cmd->add_option("--seed", f.seed, "random seed (falls back to SDPLR_SEED)");
    cmd->add_option("--time-limit", f.time_limit, "wall-clock limit in seconds");
    cmd->add_option("--trace-bound", f.trace_bound, "override the trace bound");
    cmd->add_option("--max-outer", f.max_outer, "outer iteration cap");
    cmd->add_option("--log", f.log_path, "write per-iteration telemetry as JSON lines");
    if (with_round) cmd->add_option("--round", f.round_trials, "hyperplane rounding trials");
}

inline Graph load_graph_any(const std::string& path) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".mtx") == 0)
        return load_matrixmarket_graph(path);
    return load_gset(path);
}

inline void write_log(const std::string& path, const SolveResult& res) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open log file: " + path);
    for (const auto& rec : res.telemetry) out << to_json(rec).dump() << "\n";
}

inline int finish(const std::string& kind, const SolveFlags& flags, const Problem& P,
                  const SolveResult& res, json extra, std::ostream& out) {
    write_log(flags.log_path, res);
    json doc = to_json(res);
    doc["problem"] = kind;
    doc["input"] = flags.input;
    doc["n"] = P.n;
    doc["m"] = P.m();
    doc["trace_bound"] = P.trace_bound;
    doc["omega_star"] = flags.omega.value_or(flags.tol);
    doc["xi_star"] = flags.xi.value_or(flags.tol);
    doc["seed"] = resolve_seed(flags.seed);
    for (auto& [key, value] : extra.items()) doc[key] = value;
    out << doc.dump(2) << "\n";
    return res.status == SolveStatus::Converged ? 0 : 2;
}

}  // namespace cli_detail

/// Entry point behind the binary: parses one subcommand, runs it, emits a
/// JSON document (solves) or CSV (bench / profile) on the output stream.
/// Exit codes: 0 converged/success, 2 solver stopped short, 1 input errors.
inline int run_subcommand(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"low-rank trace-bounded SDP solver"};
    app.require_subcommand(1);

    cli_detail::SolveFlags maxcut_f, minbisect_f, theta_f, cutnorm_f, matcomp_f;
    auto* maxcut_cmd = app.add_subcommand("maxcut", "solve the Max Cut relaxation");
    cli_detail::add_solve_flags(maxcut_cmd, maxcut_f, true);
    auto* minbisect_cmd = app.add_subcommand("minbisect", "solve the Minimum Bisection relaxation");
    cli_detail::add_solve_flags(minbisect_cmd, minbisect_f, true);
    auto* theta_cmd = app.add_subcommand("theta", "compute the Lovasz theta function");
    cli_detail::add_solve_flags(theta_cmd, theta_f, false);
    auto* cutnorm_cmd = app.add_subcommand("cutnorm", "solve the Cut Norm relaxation");
    cli_detail::add_solve_flags(cutnorm_cmd, cutnorm_f, true);
    auto* matcomp_cmd = app.add_subcommand("matcomp", "nuclear-norm matrix completion");
    cli_detail::add_solve_flags(matcomp_cmd, matcomp_f, false);

    std::string bench_manifest, bench_variants = "dynamic", bench_out;
    BenchOptions bench_opt;
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark sweep, emitting CSV");
    bench_cmd->add_option("--manifest", bench_manifest, "manifest of '<kind> <path> [id]' lines")
        ->required();
    bench_cmd->add_option("--variants", bench_variants,
                          "comma-separated: dynamic, fixed:R, fixedcap, noearly");
    bench_cmd->add_option("--tol", bench_opt.tol, "solver tolerance");
    bench_cmd->add_option("--timeout", bench_opt.timeout_seconds, "per-run wall-clock timeout");
    bench_cmd->add_option("--seed", bench_opt.seed, "sweep seed");
    bench_cmd->add_option("--round", bench_opt.rounding_trials, "rounding trials per run");
    bench_cmd->add_option("--rank0", bench_opt.rank0, "initial rank for dynamic variants");
    bench_cmd->add_option("--out", bench_out, "CSV output path (default stdout)");

    std::string profile_input, profile_metric = "time", profile_out;
    auto* profile_cmd = app.add_subcommand("profile", "performance profile from a bench CSV");
    profile_cmd->add_option("--input", profile_input, "bench CSV")->required();
    profile_cmd->add_option("--metric", profile_metric, "time or rounded");
    profile_cmd->add_option("--out", profile_out, "CSV output path (default stdout)");

    std::reverse(args.begin(), args.end());  // CLI11's vector parse wants reversed args
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::ostream& stream = e.get_exit_code() == 0 ? out : err;
        if (!std::string(e.what()).empty() || e.get_exit_code() == 0) {
            if (e.get_exit_code() == 0)
                stream << app.help();
            else
                stream << "error: " << e.what() << "\n";
        }
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        const auto run_cut_problem =
            [&](const char* kind, const cli_detail::SolveFlags& flags, bool bisection) {
                Graph g = cli_detail::load_graph_any(flags.input);
                if (bisection && g.n % 2 != 0) g.n += 1;
                Problem P = bisection ? build_minbisection(g) : build_maxcut(g);
                if (flags.trace_bound) P.trace_bound = *flags.trace_bound;
                const SolveResult res = solve(P, cli_detail::make_config(flags));
                json extra;
                if (flags.round_trials > 0) {
                    const SparseSym L = g.laplacian();
                    const CutSolution cut =
                        bisection
                            ? round_bisection(res.Y, L, flags.round_trials, cli_detail::resolve_seed(flags.seed))
                            : round_maxcut(res.Y, L, flags.round_trials, cli_detail::resolve_seed(flags.seed));
                    extra["rounded"] = json{{"value", cut.value}, {"trials", cut.trials_used}};
                }
                return cli_detail::finish(kind, flags, P, res, extra, out);
            };

        if (maxcut_cmd->parsed()) return run_cut_problem("maxcut", maxcut_f, false);
        if (minbisect_cmd->parsed()) return run_cut_problem("minbisect", minbisect_f, true);

        if (theta_cmd->parsed()) {
            Problem P = build_lovasz_theta(cli_detail::load_graph_any(theta_f.input));
            if (theta_f.trace_bound) P.trace_bound = *theta_f.trace_bound;
            const SolveResult res = solve(P, cli_detail::make_config(theta_f));
            return cli_detail::finish("theta", theta_f, P, res, json::object(), out);
        }

        if (cutnorm_cmd->parsed()) {
            const RectMatrix A = load_matrixmarket_matrix(cutnorm_f.input);
            Problem P = build_cutnorm(A);
            if (cutnorm_f.trace_bound) P.trace_bound = *cutnorm_f.trace_bound;
            const SolveResult res = solve(P, cli_detail::make_config(cutnorm_f));
            json extra;
            if (cutnorm_f.round_trials > 0) {
                const CutNormSolution r = round_cutnorm(res.Y, A, cutnorm_f.round_trials,
                                                        cli_detail::resolve_seed(cutnorm_f.seed));
                extra["rounded"] = json{{"value", r.value}, {"trials", r.trials_used}};
            }
            return cli_detail::finish("cutnorm", cutnorm_f, P, res, extra, out);
        }

        if (matcomp_cmd->parsed()) {
            const RectMatrix M = load_matrixmarket_matrix(matcomp_f.input);
            Problem P = build_matrix_completion(M.rows, M.cols, M.entries);
            if (matcomp_f.trace_bound) P.trace_bound = *matcomp_f.trace_bound;
            const SolveResult res = solve(P, cli_detail::make_config(matcomp_f));
            return cli_detail::finish("matcomp", matcomp_f, P, res, json::object(), out);
        }

        if (bench_cmd->parsed()) {
            const std::vector<ManifestEntry> manifest = load_manifest(bench_manifest);
            std::vector<Variant> variants;
            std::istringstream ss(bench_variants);
            std::string tag;
            while (std::getline(ss, tag, ',')) {
                if (!tag.empty()) variants.push_back(parse_variant(tag));
            }
            detail::require(!variants.empty(), "bench: no variants given");
            const std::vector<RunRecord> records = bench(manifest, variants, bench_opt);
            if (bench_out.empty()) {
                write_csv(records, out);
            } else {
                std::ofstream f(bench_out);
                if (!f) throw std::runtime_error("cannot open output file: " + bench_out);
                write_csv(records, f);
            }
            return 0;
        }

        if (profile_cmd->parsed()) {
            std::ifstream f(profile_input);
            if (!f) throw std::runtime_error("cannot open file: " + profile_input);
            const std::vector<RunRecord> records = read_csv(f);
            ProfileMetric metric;
            if (profile_metric == "time")
                metric = ProfileMetric::Time;
            else if (profile_metric == "rounded")
                metric = ProfileMetric::RoundedValue;
            else
                throw std::invalid_argument("unknown metric: " + profile_metric);
            const PerfProfile prof = perf_profile(records, metric);
            if (profile_out.empty()) {
                write_profile_csv(prof, out);
            } else {
                std::ofstream pf(profile_out);
                if (!pf) throw std::runtime_error("cannot open output file: " + profile_out);
                write_profile_csv(prof, pf);
            }
            return 0;
        }
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace sdplr
