#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sdplr/lanczos.hpp"
#include "sdplr/model.hpp"
#include "sdplr/subsolver.hpp"

namespace sdplr {

enum class SolveStatus { Converged, RankCapStall, SigmaCapStall, MaxOuter, TimeLimit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::RankCapStall: return "RankCapStall";
        case SolveStatus::SigmaCapStall: return "SigmaCapStall";
        case SolveStatus::MaxOuter: return "MaxOuter";
        case SolveStatus::TimeLimit: return "TimeLimit";
    }
    return "Unknown";
}

struct SolverConfig {
    double omega_star = 1e-2;  // target relative primal infeasibility
    double xi_star = 1e-2;     // target relative suboptimality
    int initial_rank = 10;
    double sigma0 = 2.0;
    int gamma0 = 4;
    int lbfgs_history = 4;
    int max_inner = 10000;
    int max_outer = 1000;
    // The primal update is posed over Tr(Y Yᵀ) <= alpha. When the penalty
    // already pins every diagonal (a Diag constraint per index, or a Trace
    // constraint) the subproblem is coercive and the ball is skipped; it is
    // applied, dilated by this factor, only when the constraints leave trace
    // directions free that an unbounded inner solve could run off along.
    double trace_ball_factor = 2.0;
    double time_limit_seconds = std::numeric_limits<double>::infinity();
    double sigma_cap = 1e10;
    std::uint64_t seed = 0;
    bool dynamic_rank = true;      // false: keep initial_rank, never double
    bool early_termination = true; // false: stop on omega alone, never evaluate xi
};

struct IterationRecord {
    int t = 0;  // 1-based outer iteration
    int rank = 0;
    double sigma = 0.0;
    double eta_tol = 0.0;
    double omega_tol = 0.0;
    double eta = 0.0;
    double omega = 0.0;
    double xi = std::numeric_limits<double>::quiet_NaN();  // NaN when not evaluated
    int inner_iterations = 0;
    double wall_seconds = 0.0;  // cumulative at the end of the iteration
    bool dual_updated = false;
    bool sigma_doubled = false;
    bool rank_doubled = false;
    bool regenerated = false;  // at-cap restart of the factor and dual
};

struct Metrics {
    double eta = 0.0;
    double omega = 0.0;
    double xi = 0.0;
    double lambda_min = 0.0;
};

/// Relative stationarity, primal infeasibility and suboptimality at (Y, lambda):
///   eta   = ||grad f(Y)||_F / (1 + ||C||_F)
///   omega = ||A(Y Yᵀ) - b|| / (1 + ||b||)
///   xi    = (<C,Y Yᵀ> - lambdaᵀ b - alpha min{lambda_min(C - A*(lambda)), 0})
///           / (1 + |<C,Y Yᵀ>|)
/// lambda_min is estimated by Lanczos with the given step budget and seed.
inline Metrics metrics(const Problem& P, const Factor& Y, const std::vector<double>& lambda,
                       double sigma, int lanczos_steps, std::uint64_t seed) {
    AugLagScratch s;
    alm_eval(P, Y, lambda, sigma, s);
    Metrics m;
    m.eta = s.grad.frobenius_norm() / (1.0 + P.cost.frobenius_norm());
    m.omega = norm2(s.violation) / (1.0 + norm2(P.b));
    const EigEstimate est = min_eig(
        [&](const double* x, double* y) { astar_multiply(P, lambda, x, y); }, P.n, lanczos_steps,
        seed);
    m.lambda_min = est.value;
    const double dual_term = dot(lambda, P.b) + P.trace_bound * std::min(est.value, 0.0);
    m.xi = (s.cost_term - dual_term) / (1.0 + std::abs(s.cost_term));
    return m;
}

namespace detail {

inline int default_bound_steps(int n) {
    return std::min(n, std::max(20, static_cast<int>(std::ceil(
                                        8.0 * std::log(static_cast<double>(std::max(n, 2)))))));
}

}  // namespace detail

/// Upper bound on <C, Y Yᵀ> - <C, X*>: any dual vector is feasible for the
/// trace-bounded dual, so <C,Y Yᵀ> - lambdaᵀ b - alpha min{lambda_min, 0}
/// always dominates the true suboptimality.
inline double suboptimality_bound(const Problem& P, const Factor& Y,
                                  const std::vector<double>& lambda, int lanczos_steps = 0,
                                  std::uint64_t seed = 0) {
    if (lanczos_steps <= 0) lanczos_steps = detail::default_bound_steps(P.n);
    const EigEstimate est = min_eig(
        [&](const double* x, double* y) { astar_multiply(P, lambda, x, y); }, P.n, lanczos_steps,
        seed);
    return P.cost.gram(Y) - dot(lambda, P.b) - P.trace_bound * std::min(est.value, 0.0);
}

/// Penalized surrogate bound with the shifted dual lambda' = lambda - sigma p:
///   <C,Y Yᵀ> - bᵀ lambda' + (sigma/2)||p||² - alpha min{lambda_min(C - A*(lambda')), 0}.
/// Diagnostic only; exceeds suboptimality_bound at lambda' by exactly
/// (sigma/2)||p||².
inline double surrogate_bound(const Problem& P, const Factor& Y, const std::vector<double>& lambda,
                              double sigma, int lanczos_steps = 0, std::uint64_t seed = 0) {
    std::vector<double> p = apply_A(P, Y);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= P.b[i];
    std::vector<double> shifted(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) shifted[i] = lambda[i] - sigma * p[i];
    return suboptimality_bound(P, Y, shifted, lanczos_steps, seed) + 0.5 * sigma * dot(p, p);
}

struct SolveResult {
    Factor Y;
    std::vector<double> dual;
    double objective = 0.0;            // user sense
    double objective_canonical = 0.0;  // <C, Y Yᵀ> in the minimization form
    double eta = 0.0;
    double omega = 0.0;
    double xi = 0.0;
    double lambda_min = 0.0;
    double dual_value = 0.0;     // lambdaᵀ b + alpha min{lambda_min, 0}
    double subopt_bound = 0.0;   // objective_canonical - dual_value
    SolveStatus status = SolveStatus::MaxOuter;
    int outer_iterations = 0;
    int final_rank = 0;
    double wall_seconds = 0.0;
    std::vector<IterationRecord> telemetry;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline void gaussian_fill(std::mt19937_64& rng, double stddev, double* out, std::size_t count) {
    std::normal_distribution<double> gauss(0.0, stddev);
    for (std::size_t i = 0; i < count; ++i) out[i] = gauss(rng);
}

}  // namespace detail

/// Outer augmented Lagrangian loop: L-BFGS inner solves to the stationarity
/// schedule, dual updates when the infeasibility schedule is met, penalty
/// doubling otherwise, and rank doubling (up to floor(sqrt(2m)+1)) after
/// gamma0 feasible-but-suboptimal iterations.
inline SolveResult solve(const Problem& P, const SolverConfig& cfg) {
    P.validate();
    detail::require(cfg.omega_star > 0.0 && cfg.xi_star > 0.0,
                    "solve: tolerances must be positive");
    detail::require(cfg.initial_rank >= 1, "solve: initial rank must be >= 1");

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const int cap = P.rank_cap();
    const int m = P.m();
    const double b_norm = norm2(P.b);
    const double cost_norm = P.cost.frobenius_norm();
    constexpr double kTolFloor = 1e-12;
    constexpr double kTraceSlack = 0.1;  // tolerated relative trace excess at convergence

    std::mt19937_64 rng(cfg.seed);
    int rank = std::min(cfg.initial_rank, cap);
    Factor Y(P.n, rank);
    detail::gaussian_fill(rng, std::sqrt(P.trace_bound / (static_cast<double>(P.n) * rank)) / 2.0,
                          Y.data.data(), Y.data.size());
    std::vector<double> lambda(static_cast<std::size_t>(m), 0.0);

    double sigma = cfg.sigma0;
    double eta_tol = 1.0 / sigma;
    double omega_tol = 1.0 / std::pow(sigma, 0.1);
    int gamma = cfg.gamma0;
    int cap_restarts = 0;

    SolveResult res;
    res.status = SolveStatus::MaxOuter;

    // diagonal coverage decides whether the inner solve needs the trace ball
    bool has_trace_constraint = false;
    std::vector<bool> diag_pinned(static_cast<std::size_t>(P.n), false);
    for (const auto& c : P.constraints) {
        if (const auto* d = std::get_if<Constraint::Diag>(&c.payload()))
            diag_pinned[static_cast<std::size_t>(d->index)] = true;
        else if (std::holds_alternative<Constraint::Trace>(c.payload()))
            has_trace_constraint = true;
    }
    const bool coercive =
        has_trace_constraint ||
        std::all_of(diag_pinned.begin(), diag_pinned.end(), [](bool b) { return b; });

    LbfgsOptions inner_opt;
    inner_opt.history = cfg.lbfgs_history;
    inner_opt.max_inner = cfg.max_inner;
    inner_opt.trace_cap = coercive ? std::numeric_limits<double>::infinity()
                                   : cfg.trace_ball_factor * P.trace_bound;

    double last_xi = std::numeric_limits<double>::quiet_NaN();
    double last_lambda_min = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> last_ritz_vector;
    bool done = false;

    int outer = 0;
    for (; outer < cfg.max_outer && !done; ++outer) {
        const int t = outer + 1;
        if (elapsed() > cfg.time_limit_seconds) {
            res.status = SolveStatus::TimeLimit;
            break;
        }

        const LbfgsResult inner = lbfgs_minimize(P, Y, lambda, sigma, eta_tol, inner_opt);
        Y = inner.Y;

        std::vector<double> violation = apply_A(P, Y);
        for (std::size_t i = 0; i < violation.size(); ++i) violation[i] -= P.b[i];
        const double omega = norm2(violation) / (1.0 + b_norm);

        IterationRecord rec;
        rec.t = t;
        rec.rank = rank;
        rec.sigma = sigma;
        rec.eta_tol = eta_tol;
        rec.omega_tol = omega_tol;
        rec.eta = inner.eta;
        rec.omega = omega;
        rec.inner_iterations = inner.iterations;

        if (omega <= omega_tol) {
            if (omega <= cfg.omega_star) {
                if (cfg.early_termination) {
                    const int steps = lanczos_step_budget(t, P.n);
                    const EigEstimate est = min_eig(
                        [&](const double* x, double* y) { astar_multiply(P, lambda, x, y); }, P.n,
                        steps, detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(t)));
                    const double cost_term = P.cost.gram(Y);
                    const double dual_term =
                        dot(lambda, P.b) + P.trace_bound * std::min(est.value, 0.0);
                    const double xi = (cost_term - dual_term) / (1.0 + std::abs(cost_term));
                    rec.xi = xi;
                    last_xi = xi;
                    last_lambda_min = est.value;
                    last_ritz_vector = est.vector;
                    // The certificate speaks for members of the trace region:
                    // a gap below -xi_star is impossible there, and an iterate
                    // with excess trace may undershoot the optimum. Such
                    // certificates do not stop the solver and do not burn
                    // gamma; the schedules keep tightening instead.
                    const double trace_value = Y.frobenius_norm() * Y.frobenius_norm();
                    const bool in_trace_region =
                        trace_value <= P.trace_bound * (1.0 + kTraceSlack);
                    if (std::abs(xi) <= cfg.xi_star && in_trace_region) {
                        res.status = SolveStatus::Converged;
                        done = true;
                    } else if (xi > cfg.xi_star) {
                        gamma -= 1;
                    }
                } else {
                    res.status = SolveStatus::Converged;  // omega-only stopping rule
                    done = true;
                }
            }
            if (!done) {
                for (std::size_t i = 0; i < lambda.size(); ++i)
                    lambda[i] -= sigma * violation[i];
                rec.dual_updated = true;
                eta_tol = std::max(eta_tol / sigma, kTolFloor);
                omega_tol = std::max(omega_tol / std::pow(sigma, 0.9), kTolFloor);
            }
        } else {
            sigma *= 2.0;
            rec.sigma_doubled = true;
            eta_tol = std::max(1.0 / sigma, kTolFloor);
            omega_tol = std::max(1.0 / std::pow(sigma, 0.1), kTolFloor);
            if (sigma > cfg.sigma_cap) {
                res.status = SolveStatus::SigmaCapStall;
                done = true;
            }
        }

        if (!done && gamma == 0) {
            if (cfg.dynamic_rank && rank < cap) {
                // double the rank: keep lambda, pad the factor with small
                // fresh columns to move off the rank-deficient saddle
                const int new_rank = std::min(2 * rank, cap);
                const int added = new_rank - rank;
                Factor grown(P.n, new_rank);
                std::copy(Y.data.begin(), Y.data.end(), grown.data.begin());
                double pad_scale =
                    1e-2 * Y.frobenius_norm() /
                    std::sqrt(static_cast<double>(P.n) * added);
                if (!(pad_scale > 0.0))
                    pad_scale = std::sqrt(P.trace_bound / (static_cast<double>(P.n) * new_rank)) / 2.0;
                detail::gaussian_fill(rng, pad_scale, grown.col(rank),
                                      static_cast<std::size_t>(P.n) * added);
                Y = std::move(grown);
                rank = new_rank;
                gamma = cfg.gamma0;
                rec.rank_doubled = true;
            } else if (cap_restarts == 0) {
                // At the rank cap, regenerate instead of growing: steer the
                // weakest column toward the most-negative eigenvector of
                // C - A*(lambda). That direction certifies the gap the
                // iterate is stuck at, and moving factor mass onto it is a
                // descent step off the spurious critical point.
                ++cap_restarts;
                if (!last_ritz_vector.empty() && last_lambda_min < 0.0) {
                    int weakest = 0;
                    double weakest_norm = std::numeric_limits<double>::infinity();
                    for (int k = 0; k < rank; ++k) {
                        double nn = 0.0;
                        const double* col = Y.col(k);
                        for (int i = 0; i < P.n; ++i) nn += col[i] * col[i];
                        if (nn < weakest_norm) {
                            weakest_norm = nn;
                            weakest = k;
                        }
                    }
                    const double scale = 0.1 * std::max(Y.frobenius_norm(), 1e-3);
                    double* col = Y.col(weakest);
                    for (int i = 0; i < P.n; ++i)
                        col[i] = scale * last_ritz_vector[static_cast<std::size_t>(i)];
                } else {
                    detail::gaussian_fill(
                        rng, std::sqrt(P.trace_bound / (static_cast<double>(P.n) * rank)) / 2.0,
                        Y.data.data(), Y.data.size());
                    std::fill(lambda.begin(), lambda.end(), 0.0);
                }
                gamma = cfg.gamma0;
                rec.regenerated = true;
            } else {
                res.status = SolveStatus::RankCapStall;
                done = true;
            }
        }

        rec.wall_seconds = elapsed();
        res.telemetry.push_back(rec);
    }
    if (!done && outer >= cfg.max_outer) res.status = SolveStatus::MaxOuter;

    // Final metrics; reuse the last xi evaluation when the run ended on one.
    AugLagScratch s;
    alm_eval(P, Y, lambda, sigma, s);
    res.Y = std::move(Y);
    res.dual = std::move(lambda);
    res.objective_canonical = s.cost_term;
    res.objective = P.user_objective(s.cost_term);
    res.eta = s.grad.frobenius_norm() / (1.0 + cost_norm);
    res.omega = norm2(s.violation) / (1.0 + b_norm);
    if (std::isnan(last_lambda_min)) {
        const EigEstimate est = min_eig(
            [&](const double* x, double* y) { astar_multiply(P, res.dual, x, y); }, P.n,
            detail::default_bound_steps(P.n), detail::mix_seed(cfg.seed, 0xfadeULL));
        last_lambda_min = est.value;
        last_xi = (s.cost_term - dot(res.dual, P.b) -
                   P.trace_bound * std::min(est.value, 0.0)) /
                  (1.0 + std::abs(s.cost_term));
    }
    res.lambda_min = last_lambda_min;
    res.xi = last_xi;
    res.dual_value = dot(res.dual, P.b) + P.trace_bound * std::min(last_lambda_min, 0.0);
    res.subopt_bound = res.objective_canonical - res.dual_value;
    res.outer_iterations = static_cast<int>(res.telemetry.size());
    res.final_rank = res.Y.r;
    res.wall_seconds = elapsed();
    return res;
}

}  // namespace sdplr
