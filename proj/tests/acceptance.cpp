// Acceptance suite: every criterion prints exactly one PASS/FAIL line and the
// binary exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sdplr/alm.hpp"
#include "sdplr/io.hpp"
#include "sdplr/lanczos.hpp"
#include "sdplr/problems.hpp"
#include "sdplr/rounding.hpp"
#include "sdplr/subsolver.hpp"

using namespace sdplr;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
    void note(const std::string& what) {
        if (detail.tellp() > 0) detail << "; ";
        detail << what;
    }
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

SolverConfig config(double tol, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.omega_star = tol;
    cfg.xi_star = tol;
    cfg.seed = seed;
    return cfg;
}

// 1. Duality-gap fixture: moderate-accuracy solve plus the dense
//    demonstration that the plain dual is stuck at -1.
Check criterion_duality_gap() {
    Check c;
    const double t0 = now_seconds();
    const Problem P = fixtures::duality_gap_problem();
    const SolveResult res = solve(P, config(1e-2, 11));
    const double elapsed = now_seconds() - t0;
    c.require(std::abs(res.objective) <= 1e-2,
              "objective " + fmt(res.objective) + " above 1e-2");
    const double bound = suboptimality_bound(P, res.Y, res.dual);
    c.require(bound <= 1e-2 * (1.0 + std::abs(res.objective)),
              "suboptimality bound " + fmt(bound));
    c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + "s");

    // plain dual: lambda4 = 1/2 is forced, best value -1, gap of -1 to the
    // primal optimum 0
    const std::vector<double> feasible{0.0, 0.0, 0.0, 0.5};
    c.require(oracles::dense_min_eig(oracles::densify_astar(P, feasible)) >= -1e-12,
              "plain dual point infeasible");
    c.require(std::abs(dot(feasible, P.b) - (-1.0)) < 1e-15, "plain dual value not -1");
    std::mt19937_64 rng(5);
    for (double l4 : {0.0, 0.3, 0.7, 1.3}) {
        const std::vector<double> lam{oracles::random_vector(rng, 1)[0],
                                      oracles::random_vector(rng, 1)[0],
                                      oracles::random_vector(rng, 1)[0], l4};
        c.require(oracles::dense_min_eig(oracles::densify_astar(P, lam)) < 0.0,
                  "lambda4 != 1/2 unexpectedly feasible");
    }
    c.note("objective " + fmt(res.objective) + ", bound " + fmt(bound) + ", " +
           fmt(elapsed) + "s");
    return c;
}

// 2. Max Cut on K3.
Check criterion_maxcut_k3() {
    Check c;
    const double t0 = now_seconds();
    const Graph g = Graph::complete(3);
    const Problem P = build_maxcut(g);
    const SolveResult res = solve(P, config(1e-2, 21));
    const CutSolution cut = round_maxcut(res.Y, g.laplacian(), 100, 21);
    const double elapsed = now_seconds() - t0;
    c.require(std::abs(res.objective - 2.25) <= 0.03,
              "objective " + fmt(res.objective) + " not within 2.25 +- 0.03");
    c.require(cut.value == 2.0, "rounded cut " + fmt(cut.value) + " != 2");
    c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + "s");
    c.note("objective " + fmt(res.objective) + ", cut " + fmt(cut.value) + ", " +
           fmt(elapsed) + "s");
    return c;
}

// 3. Lovasz theta on C5, K5 and the empty graph, plus a high-accuracy
//    full-rank reference run backing the C5 closed form.
Check criterion_theta() {
    Check c;
    const struct {
        Graph g;
        double expected, tol;
        const char* name;
    } cases[] = {
        {Graph::cycle(5), std::sqrt(5.0), 0.03, "C5"},
        {Graph::complete(5), 1.0, 0.02, "K5"},
        {Graph::empty(10), 10.0, 0.1, "empty10"},
    };
    for (const auto& cs : cases) {
        const double t0 = now_seconds();
        const SolveResult res = solve(build_lovasz_theta(cs.g), config(1e-2, 31));
        const double elapsed = now_seconds() - t0;
        c.require(std::abs(res.objective - cs.expected) <= cs.tol,
                  std::string(cs.name) + " objective " + fmt(res.objective));
        c.require(elapsed < 5.0, std::string(cs.name) + " runtime " + fmt(elapsed) + "s");
        c.note(std::string(cs.name) + "=" + fmt(res.objective));
    }
    // reference run: tol 1e-6 at the rank cap
    const Problem P = build_lovasz_theta(Graph::cycle(5));
    SolverConfig ref = config(1e-6, 33);
    ref.initial_rank = P.rank_cap();
    ref.dynamic_rank = false;
    const double t0 = now_seconds();
    const SolveResult res = solve(P, ref);
    const double elapsed = now_seconds() - t0;
    c.require(std::abs(res.objective - std::sqrt(5.0)) <= 1e-3,
              "reference run off sqrt(5): " + fmt(res.objective));
    c.require(elapsed < 5.0, "reference runtime " + fmt(elapsed) + "s");
    c.note("ref=" + fmt(res.objective));
    return c;
}

// 4. Cut norm against the exhaustive subset oracle on 25 random sign
//    matrices.
Check criterion_cutnorm() {
    Check c;
    const double t0 = now_seconds();
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 4);
        const int n = 2 + static_cast<int>(rng() % 4);
        RectMatrix R{m, n, {}};
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = rng() % 2 == 0 ? 1.0 : -1.0;
                A(i, j) = v;
                R.entries.push_back({i, j, v});
            }
        double exact = 0.0;
        for (int s = 0; s < (1 << m); ++s)
            for (int t = 0; t < (1 << n); ++t) {
                double acc = 0.0;
                for (int i = 0; i < m; ++i)
                    if (s & (1 << i))
                        for (int j = 0; j < n; ++j)
                            if (t & (1 << j)) acc += A(i, j);
                exact = std::max(exact, std::abs(acc));
            }

        SolverConfig cfg = config(1e-6, 1000 + static_cast<std::uint64_t>(trial));
        cfg.max_outer = 2000;
        const SolveResult res = solve(build_cutnorm(R), cfg);
        if (res.objective < exact - 1e-6) {
            c.require(false, "trial " + std::to_string(trial) + ": objective " +
                                 fmt(res.objective) + " below exact " + fmt(exact));
        }
        const CutNormSolution r = round_cutnorm(res.Y, R, 200, cfg.seed);
        c.require(r.value <= exact + 1e-12,
                  "trial " + std::to_string(trial) + ": rounded above exact");
    }
    const double elapsed = now_seconds() - t0;
    c.require(elapsed < 60.0, "runtime " + fmt(elapsed) + "s");
    c.note(fmt(elapsed) + "s for 25 instances");
    return c;
}

// 5. Matrix completion in the exact-recovery regime.
Check criterion_matrix_completion() {
    Check c;
    const double t0 = now_seconds();
    std::mt19937_64 rng(51);
    const int n = 20;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u(i) = gauss(rng);
        v(i) = gauss(rng);
    }
    const Eigen::MatrixXd M = u * v.transpose();

    std::vector<Triplet> obs;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (unif(rng) < 0.6) obs.push_back({i, j, M(i, j)});

    const Problem P = build_matrix_completion(n, n, obs);
    const SolveResult res = solve(P, config(1e-3, 53));
    const Eigen::MatrixXd Y = oracles::as_matrix(res.Y);
    const Eigen::MatrixXd X = (Y * Y.transpose()).topRightCorner(n, n);
    const double rel = (X - M).norm() / M.norm();
    const double elapsed = now_seconds() - t0;
    c.require(rel <= 1e-2, "relative recovery error " + fmt(rel));
    c.require(elapsed < 60.0, "runtime " + fmt(elapsed) + "s");
    c.note("error " + fmt(rel) + " from " + std::to_string(obs.size()) + " entries, " +
           fmt(elapsed) + "s");
    return c;
}

// 6. Gradient vs central finite differences across constraint kinds.
Check criterion_gradient() {
    Check c;
    std::mt19937_64 rng(61);
    const double h = 1e-6;
    int cases = 0;
    double worst = 0.0;
    const int ranks[] = {1, 3, 10};
    while (cases < 100) {
        const int r = ranks[cases % 3];
        const int n = 5 + static_cast<int>(rng() % 8);
        const Problem P = oracles::random_mixed_problem(rng, n);
        Factor Y = oracles::random_factor(rng, n, r);
        const std::vector<double> lambda = oracles::random_vector(rng, P.m());
        const double sigma = 1.0 + static_cast<double>(rng() % 40) / 10.0;

        const Factor g = alm_gradient(P, Y, lambda, sigma);
        double err2 = 0.0, norm2_ = 0.0;
        for (std::size_t k = 0; k < Y.data.size(); ++k) {
            const double saved = Y.data[k];
            Y.data[k] = saved + h;
            const double fp = alm_value(P, Y, lambda, sigma);
            Y.data[k] = saved - h;
            const double fm = alm_value(P, Y, lambda, sigma);
            Y.data[k] = saved;
            const double fd = (fp - fm) / (2.0 * h);
            err2 += (g.data[k] - fd) * (g.data[k] - fd);
            norm2_ += g.data[k] * g.data[k];
        }
        const double rel = std::sqrt(err2) / (1.0 + std::sqrt(norm2_));
        worst = std::max(worst, rel);
        ++cases;
    }
    c.require(worst <= 1e-6, "worst relative error " + fmt(worst));
    c.note("100 cases, worst " + fmt(worst));
    return c;
}

// 7. Adjoint identity across every builder.
Check criterion_adjoint() {
    Check c;
    std::mt19937_64 rng(71);
    std::vector<Problem> problems;
    for (int k = 0; k < 5; ++k) {
        problems.push_back(build_maxcut(Graph::random_gnp(10 + 3 * k, 0.3, 100 + k)));
        problems.push_back(build_minbisection(Graph::random_gnp(9 + 2 * k, 0.4, 200 + k)));
        problems.push_back(build_lovasz_theta(Graph::random_gnp(8 + 3 * k, 0.3, 300 + k)));
        RectMatrix R{3 + k, 4 + k, {}};
        for (int i = 0; i < R.rows; ++i)
            for (int j = 0; j < R.cols; ++j)
                if (rng() % 2 == 0) R.entries.push_back({i, j, 1.0 - 2.0 * (rng() % 2)});
        if (R.entries.empty()) R.entries.push_back({0, 0, 1.0});
        problems.push_back(build_cutnorm(R));
        std::vector<Triplet> obs;
        for (int i = 0; i < 4 + k; ++i) obs.push_back({i, (i * 2) % (5 + k), 0.5 * i + 1.0});
        problems.push_back(build_matrix_completion(4 + k, 5 + k, obs));
    }
    int cases = 0;
    double worst = 0.0;
    while (cases < 500) {
        const Problem& P = problems[cases % problems.size()];
        const std::vector<double> lambda = oracles::random_vector(rng, P.m());
        const Factor Y = oracles::random_factor(rng, P.n, 1 + static_cast<int>(rng() % 5));
        worst = std::max(worst, adjoint_check(P, lambda, Y));
        ++cases;
    }
    c.require(worst <= 1e-12, "worst residual " + fmt(worst));
    c.note("500 cases, worst " + fmt(worst));
    return c;
}

// 8. Lanczos against the dense eigensolver at the paper's t = 9 budget.
Check criterion_lanczos() {
    Check c;
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> unif(-0.88, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 50 + static_cast<int>(rng() % 451);
        Eigen::VectorXd evals(n);
        evals(0) = -1.0;
        for (int i = 1; i < n; ++i) evals(i) = unif(rng);
        const Eigen::MatrixXd S = oracles::matrix_with_spectrum(rng, evals);
        const int steps = static_cast<int>(std::ceil(2.0 * std::sqrt(9.0) * std::log(n)));
        const EigEstimate est = min_eig(
            [&](const double* x, double* y) {
                Eigen::Map<Eigen::VectorXd>(y, n) = S * Eigen::Map<const Eigen::VectorXd>(x, n);
            },
            n, steps, 9000 + static_cast<std::uint64_t>(trial));
        const double err = std::abs(est.value - oracles::dense_min_eig(S)) / S.norm();
        worst = std::max(worst, err);
    }
    c.require(worst <= 1e-6, "worst relative error " + fmt(worst));
    c.note("50 matrices, worst err/||S||_F " + fmt(worst));
    return c;
}

// 9. Exact line search vs a 10^4-point scan.
Check criterion_linesearch() {
    Check c;
    std::mt19937_64 rng(91);
    double worst = 0.0;
    int cases = 0;
    while (cases < 200) {
        const int n = 4 + static_cast<int>(rng() % 10);
        const Problem P = oracles::random_mixed_problem(rng, n);
        const Factor Y = oracles::random_factor(rng, n, 1 + static_cast<int>(rng() % 4));
        const std::vector<double> lambda = oracles::random_vector(rng, P.m());
        const double sigma = 0.5 + static_cast<double>(rng() % 50) / 10.0;
        Factor D = alm_gradient(P, Y, lambda, sigma);
        D.scale(-1.0);
        const LineSearchResult ls = exact_linesearch(P, Y, D, lambda, sigma);
        if (!ls.descent) continue;  // zero-gradient degenerate draw

        const std::array<double, 5> poly = linesearch_polynomial(P, Y, D, lambda, sigma);
        const auto phi = [&](double t) {
            return poly[0] + t * (poly[1] + t * (poly[2] + t * (poly[3] + t * poly[4])));
        };
        const double hi = std::max(10.0, 10.0 * ls.step);
        double scan_min = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 10000; ++k)
            scan_min = std::min(scan_min, phi(hi * static_cast<double>(k) / 10000.0));
        worst = std::max(worst, phi(ls.step) - scan_min);
        ++cases;
    }
    c.require(worst <= 1e-6, "line-search value above scan by " + fmt(worst));
    c.note("200 cases, worst margin " + fmt(worst));
    return c;
}

// 10. Surrogate-bound identity and dominance.
Check criterion_surrogate() {
    Check c;
    std::mt19937_64 rng(101);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 12);
        const Problem P = oracles::random_mixed_problem(rng, n);
        const Factor Y = oracles::random_factor(rng, n, 3, 0.5);
        const std::vector<double> lambda = oracles::random_vector(rng, P.m());
        const double sigma = 0.5 + static_cast<double>(rng() % 50) / 10.0;

        std::vector<double> p = apply_A(P, Y);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= P.b[i];
        std::vector<double> shifted(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) shifted[i] = lambda[i] - sigma * p[i];

        const double sur = surrogate_bound(P, Y, lambda, sigma, 0, 7);
        const double at_shifted = suboptimality_bound(P, Y, shifted, 0, 7);
        const double penalty = 0.5 * sigma * dot(p, p);
        const double rel =
            std::abs(sur - (at_shifted + penalty)) / (1.0 + std::abs(sur));
        worst_rel = std::max(worst_rel, rel);
        c.require(sur >= at_shifted - 1e-12 * (1.0 + std::abs(sur)),
                  "surrogate below the shifted bound");
    }
    c.require(worst_rel <= 1e-10, "identity residual " + fmt(worst_rel));
    c.note("100 cases, worst residual " + fmt(worst_rel));
    return c;
}

// 11. Ablation trend on 20 random G(100, 0.05) Max Cut instances.
Check criterion_ablation() {
    Check c;
    const double t0 = now_seconds();
    std::vector<double> time_dynamic, time_fixed, time_noearly;
    int non_converged = 0;
    for (int i = 0; i < 20; ++i) {
        const Graph g = Graph::random_gnp(100, 0.05, 7000 + static_cast<std::uint64_t>(i));
        const Problem P = build_maxcut(g);

        SolverConfig dyn = config(1e-2, 100 + static_cast<std::uint64_t>(i));
        SolveResult res = solve(P, dyn);
        if (res.status != SolveStatus::Converged) ++non_converged;
        time_dynamic.push_back(res.wall_seconds);

        SolverConfig fixed = dyn;
        fixed.dynamic_rank = false;
        fixed.initial_rank = P.rank_cap();
        res = solve(P, fixed);
        if (res.status != SolveStatus::Converged) ++non_converged;
        time_fixed.push_back(res.wall_seconds);

        SolverConfig noearly = fixed;
        noearly.early_termination = false;
        res = solve(P, noearly);
        if (res.status != SolveStatus::Converged) ++non_converged;
        time_noearly.push_back(res.wall_seconds);
    }
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
    };
    const double md = median(time_dynamic), mf = median(time_fixed), mn = median(time_noearly);
    const double elapsed = now_seconds() - t0;
    c.require(non_converged == 0, std::to_string(non_converged) + " runs did not converge");
    c.require(md <= mf, "dynamic median " + fmt(md) + " above fixed median " + fmt(mf));
    c.require(mn >= md, "no-early median " + fmt(mn) + " below dynamic median " + fmt(md));
    c.require(elapsed < 600.0, "runtime " + fmt(elapsed) + "s");
    c.note("medians: dynamic " + fmt(md) + "s, fixed-cap " + fmt(mf) + "s, no-early " +
           fmt(mn) + "s");
    return c;
}

// 12. Algorithm state machine over 50 randomized solves.
Check criterion_state_machine() {
    Check c;
    std::mt19937_64 rng(121);
    int converged = 0;
    for (int i = 0; i < 50; ++i) {
        Problem P;
        if (i % 3 == 0)
            P = build_lovasz_theta(Graph::random_gnp(6 + static_cast<int>(rng() % 10), 0.4, rng()));
        else
            P = build_maxcut(Graph::random_gnp(10 + static_cast<int>(rng() % 25), 0.3, rng()));
        SolverConfig cfg = config(1e-2, rng());
        const SolveResult res = solve(P, cfg);

        const int cap = P.rank_cap();
        double sigma_prev = cfg.sigma0;
        int rank_prev = std::min(cfg.initial_rank, cap);
        for (const auto& rec : res.telemetry) {
            c.require(rec.sigma == sigma_prev, "sigma changed by a non-doubling");
            c.require(rec.rank == rank_prev, "rank changed outside a doubling");
            c.require(rec.rank <= cap, "rank above the cap");
            if (rec.dual_updated) c.require(rec.omega <= rec.omega_tol, "dual update with omega above tolerance");
            if (rec.sigma_doubled) c.require(!rec.dual_updated, "dual update in a penalty iteration");
            sigma_prev = rec.sigma * (rec.sigma_doubled ? 2.0 : 1.0);
            if (rec.rank_doubled) rank_prev = std::min(2 * rank_prev, cap);
        }
        if (res.status == SolveStatus::Converged) {
            ++converged;
            const Metrics m =
                metrics(P, res.Y, res.dual, 2.0, lanczos_step_budget(16, P.n), 0xFEEDULL + i);
            c.require(m.omega <= cfg.omega_star, "converged recheck: omega above target");
            c.require(m.xi <= 2.0 * cfg.xi_star, "converged recheck: xi above 2x target");
        }
        if (!c.ok) {
            c.note("failed on solve " + std::to_string(i));
            break;
        }
    }
    c.note(std::to_string(converged) + "/50 converged");
    return c;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Check()> run;
    };
    const std::vector<Entry> criteria = {
        {"duality-gap fixture", criterion_duality_gap},
        {"max cut K3", criterion_maxcut_k3},
        {"lovasz theta closed forms", criterion_theta},
        {"cut norm vs exhaustive oracle", criterion_cutnorm},
        {"matrix completion recovery", criterion_matrix_completion},
        {"gradient finite differences", criterion_gradient},
        {"adjoint identity", criterion_adjoint},
        {"lanczos vs dense eigensolver", criterion_lanczos},
        {"exact line search vs scan", criterion_linesearch},
        {"surrogate bound identity", criterion_surrogate},
        {"ablation trend", criterion_ablation},
        {"algorithm state machine", criterion_state_machine},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].run();
        } catch (const std::exception& ex) {
            c.ok = false;
            c.note(std::string("exception: ") + ex.what());
        }
        if (!c.ok) ++failures;
        std::printf("%s  %2zu. %s%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    c.detail.tellp() > 0 ? " -- " : "", c.detail.str().c_str());
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
