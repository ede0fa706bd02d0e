#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sdplr/alm.hpp"
#include "sdplr/io.hpp"
#include "sdplr/rounding.hpp"

namespace sdplr {

enum class ProblemKind { MaxCut, MinBisection, Theta, CutNorm, MatComp };

inline std::optional<ProblemKind> parse_problem_kind(const std::string& s) {
    if (s == "maxcut") return ProblemKind::MaxCut;
    if (s == "minbisect") return ProblemKind::MinBisection;
    if (s == "theta") return ProblemKind::Theta;
    if (s == "cutnorm") return ProblemKind::CutNorm;
    if (s == "matcomp") return ProblemKind::MatComp;
    return std::nullopt;
}

/// One line per run of the benchmark sweep.
struct RunRecord {
    std::string problem_id;
    std::string variant;
    std::string status;
    double wall_seconds = 0.0;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double rounded_value = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double omega = std::numeric_limits<double>::quiet_NaN();
    double xi = std::numeric_limits<double>::quiet_NaN();
    int final_rank = 0;
    int outer_iterations = 0;
};

struct ManifestEntry {
    ProblemKind kind;
    std::string path;
    std::string id;
};

/// Manifest lines: "<kind> <path> [id]", '#' starts a comment. The id
/// defaults to the path.
inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in = detail::open_or_throw(path);
    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line) || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string kind_str, file, id;
        if (!(ss >> kind_str >> file))
            throw ParseError(path, lineno, "expected '<kind> <path> [id]'");
        const auto kind = parse_problem_kind(kind_str);
        if (!kind) throw ParseError(path, lineno, "unknown problem kind: " + kind_str);
        if (!(ss >> id)) id = file;
        entries.push_back({*kind, file, id});
    }
    return entries;
}

/// Solver variants exercised by the sweep:
///   dynamic   - rank doubling from rank0, suboptimality-based stopping
///   fixed:R   - rank pinned at R, suboptimality-based stopping
///   noearly   - rank pinned at the Barvinok-Pataki cap, stops on primal
///               infeasibility alone (the behavior of the pre-suboptimality
///               solver generation)
struct Variant {
    std::string tag;
    std::optional<int> fixed_rank;  // nullopt: dynamic
    bool fixed_rank_at_cap = false;
    bool early_termination = true;
};

inline Variant parse_variant(const std::string& s) {
    if (s == "dynamic") return {s, std::nullopt, false, true};
    if (s == "noearly") return {s, std::nullopt, true, false};
    if (s.rfind("fixed:", 0) == 0) {
        const int r = std::stoi(s.substr(6));
        detail::require(r >= 1, "variant fixed rank must be >= 1");
        return {s, r, false, true};
    }
    if (s == "fixedcap") return {s, std::nullopt, true, true};
    throw std::invalid_argument("unknown variant: " + s);
}

inline SolverConfig variant_config(const Variant& v, const Problem& P, SolverConfig base) {
    if (v.fixed_rank_at_cap) {
        base.dynamic_rank = false;
        base.initial_rank = P.rank_cap();
    } else if (v.fixed_rank) {
        base.dynamic_rank = false;
        base.initial_rank = *v.fixed_rank;
    }
    base.early_termination = v.early_termination;
    return base;
}

struct BenchOptions {
    double tol = 1e-2;
    double timeout_seconds = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    int rounding_trials = 0;  // 0: skip rounding
    int rank0 = 10;
};

namespace detail {

struct LoadedProblem {
    Problem problem;
    std::optional<SparseSym> laplacian;  // cut problems
    std::optional<RectMatrix> matrix;    // cut norm
};

inline LoadedProblem load_problem(ProblemKind kind, const std::string& path) {
    const auto load_graph = [&]() {
        if (path.size() > 4 && path.compare(path.size() - 4, 4, ".mtx") == 0)
            return load_matrixmarket_graph(path);
        return load_gset(path);
    };
    LoadedProblem lp;
    switch (kind) {
        case ProblemKind::MaxCut: {
            const Graph g = load_graph();
            lp.problem = build_maxcut(g);
            lp.laplacian = g.laplacian();
            break;
        }
        case ProblemKind::MinBisection: {
            Graph g = load_graph();
            if (g.n % 2 != 0) g.n += 1;  // match the builder's padding
            lp.problem = build_minbisection(g);
            lp.laplacian = g.laplacian();
            break;
        }
        case ProblemKind::Theta:
            lp.problem = build_lovasz_theta(load_graph());
            break;
        case ProblemKind::CutNorm: {
            RectMatrix A = load_matrixmarket_matrix(path);
            lp.problem = build_cutnorm(A);
            lp.matrix = std::move(A);
            break;
        }
        case ProblemKind::MatComp: {
            const RectMatrix M = load_matrixmarket_matrix(path);
            lp.problem = build_matrix_completion(M.rows, M.cols, M.entries);
            break;
        }
    }
    return lp;
}

inline double rounded_value_for(ProblemKind kind, const LoadedProblem& lp, const SolveResult& res,
                                int trials, std::uint64_t seed) {
    if (trials <= 0) return std::numeric_limits<double>::quiet_NaN();
    switch (kind) {
        case ProblemKind::MaxCut:
            return round_maxcut(res.Y, *lp.laplacian, trials, seed).value;
        case ProblemKind::MinBisection:
            return round_bisection(res.Y, *lp.laplacian, trials, seed).value;
        case ProblemKind::CutNorm:
            return round_cutnorm(res.Y, *lp.matrix, trials, seed).value;
        default:
            return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace detail

/// Runs every (problem, variant) pair; per-run failures become status rows
/// and never abort the sweep. Deterministic for a fixed (manifest, seed)
/// apart from the wall-clock columns.
inline std::vector<RunRecord> bench(const std::vector<ManifestEntry>& manifest,
                                    const std::vector<Variant>& variants,
                                    const BenchOptions& opt) {
    std::vector<RunRecord> records;
    for (std::size_t pi = 0; pi < manifest.size(); ++pi) {
        const auto& entry = manifest[pi];
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            const auto& variant = variants[vi];
            RunRecord rec;
            rec.problem_id = entry.id;
            rec.variant = variant.tag;
            try {
                const detail::LoadedProblem lp = detail::load_problem(entry.kind, entry.path);
                SolverConfig base;
                base.omega_star = opt.tol;
                base.xi_star = opt.tol;
                base.initial_rank = opt.rank0;
                base.time_limit_seconds = opt.timeout_seconds;
                base.seed = detail::mix_seed(opt.seed, pi * 131 + vi);
                const SolverConfig cfg = variant_config(variant, lp.problem, base);
                const SolveResult res = solve(lp.problem, cfg);
                rec.status = to_string(res.status);
                rec.wall_seconds = res.wall_seconds;
                rec.objective = res.objective;
                rec.eta = res.eta;
                rec.omega = res.omega;
                rec.xi = res.xi;
                rec.final_rank = res.final_rank;
                rec.outer_iterations = res.outer_iterations;
                rec.rounded_value = detail::rounded_value_for(entry.kind, lp, res,
                                                              opt.rounding_trials, cfg.seed);
            } catch (const std::exception& ex) {
                rec.status = std::string("Error: ") + ex.what();
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

inline const char* kRunRecordCsvHeader =
    "problem_id,variant,status,wall_seconds,objective,rounded_value,eta,omega,xi,"
    "final_rank,outer_iterations";

inline std::string csv_field(double v) {
    if (!std::isfinite(v)) return "";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << kRunRecordCsvHeader << "\n";
    for (const auto& r : records) {
        std::string status = r.status;
        for (auto& c : status)
            if (c == ',') c = ';';
        out << r.problem_id << "," << r.variant << "," << status << ","
            << csv_field(r.wall_seconds) << "," << csv_field(r.objective) << ","
            << csv_field(r.rounded_value) << "," << csv_field(r.eta) << ","
            << csv_field(r.omega) << "," << csv_field(r.xi) << "," << r.final_rank << ","
            << r.outer_iterations << "\n";
    }
}

inline std::vector<RunRecord> read_csv(std::istream& in) {
    std::vector<RunRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) f.push_back(field);
        while (f.size() < 11) f.push_back("");
        RunRecord r;
        r.problem_id = f[0];
        r.variant = f[1];
        r.status = f[2];
        const auto num = [](const std::string& s) {
            return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
        };
        r.wall_seconds = num(f[3]);
        r.objective = num(f[4]);
        r.rounded_value = num(f[5]);
        r.eta = num(f[6]);
        r.omega = num(f[7]);
        r.xi = num(f[8]);
        r.final_rank = f[9].empty() ? 0 : std::stoi(f[9]);
        r.outer_iterations = f[10].empty() ? 0 : std::stoi(f[10]);
        records.push_back(std::move(r));
    }
    return records;
}

enum class ProfileMetric { Time, RoundedValue };

struct PerfProfile {
    std::vector<std::string> variants;
    std::vector<double> taus;
    // fractions[v][k]: share of problems variant v solved within taus[k] of the best
    std::vector<std::vector<double>> fractions;
};

/// Dolan-More performance profile. ratio_{p,s} = metric / best over variants
/// (inverted for maximize-type metrics); failed or missing runs get ratio
/// +inf. rho_s(tau) = #{p : ratio_{p,s} <= tau} / #problems.
inline PerfProfile perf_profile(const std::vector<RunRecord>& records, ProfileMetric metric) {
    detail::require(!records.empty(), "perf_profile: no records");

    std::vector<std::string> problems, variants;
    std::map<std::pair<std::string, std::string>, const RunRecord*> by_key;
    for (const auto& r : records) {
        if (std::find(problems.begin(), problems.end(), r.problem_id) == problems.end())
            problems.push_back(r.problem_id);
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
            variants.push_back(r.variant);
        by_key[{r.problem_id, r.variant}] = &r;
    }

    const double inf = std::numeric_limits<double>::infinity();
    const auto run_metric = [&](const RunRecord& r) -> double {
        if (r.status != "Converged") return inf;
        const double v = metric == ProfileMetric::Time ? r.wall_seconds : r.rounded_value;
        return std::isfinite(v) ? v : inf;
    };

    // ratio matrix
    std::vector<std::vector<double>> ratio(variants.size(),
                                           std::vector<double>(problems.size(), inf));
    for (std::size_t p = 0; p < problems.size(); ++p) {
        double best = metric == ProfileMetric::Time ? inf : 0.0;
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto it = by_key.find({problems[p], variants[v]});
            if (it == by_key.end()) continue;
            const double val = run_metric(*it->second);
            if (metric == ProfileMetric::Time)
                best = std::min(best, val);
            else if (std::isfinite(val))
                best = std::max(best, val);
        }
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto it = by_key.find({problems[p], variants[v]});
            if (it == by_key.end()) continue;
            const double val = run_metric(*it->second);
            if (!std::isfinite(val)) continue;
            if (metric == ProfileMetric::Time)
                ratio[v][p] = best > 0.0 ? val / best : (val > 0.0 ? inf : 1.0);
            else
                ratio[v][p] = val > 0.0 ? best / val : (best > 0.0 ? inf : 1.0);
        }
    }

    PerfProfile out;
    out.variants = variants;
    for (const auto& row : ratio)
        for (double x : row)
            if (std::isfinite(x)) out.taus.push_back(x);
    out.taus.push_back(1.0);
    std::sort(out.taus.begin(), out.taus.end());
    out.taus.erase(std::unique(out.taus.begin(), out.taus.end()), out.taus.end());

    out.fractions.assign(variants.size(), std::vector<double>(out.taus.size(), 0.0));
    for (std::size_t v = 0; v < variants.size(); ++v)
        for (std::size_t k = 0; k < out.taus.size(); ++k) {
            int count = 0;
            for (std::size_t p = 0; p < problems.size(); ++p)
                if (ratio[v][p] <= out.taus[k]) ++count;
            out.fractions[v][k] = static_cast<double>(count) / static_cast<double>(problems.size());
        }
    return out;
}

inline void write_profile_csv(const PerfProfile& prof, std::ostream& out) {
    out << "tau";
    for (const auto& v : prof.variants) out << "," << v;
    out << "\n";
    for (std::size_t k = 0; k < prof.taus.size(); ++k) {
        out << csv_field(prof.taus[k]);
        for (std::size_t v = 0; v < prof.variants.size(); ++v)
            out << "," << csv_field(prof.fractions[v][k]);
        out << "\n";
    }
}

}  // namespace sdplr
