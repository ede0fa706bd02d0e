#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <vector>

#include "sdplr/model.hpp"

namespace sdplr {

/// Work area for evaluating the augmented Lagrangian
///   f(Y) = <C, Y Yᵀ> - lambdaᵀ v + (sigma/2) ||v||²,  v = A(Y Yᵀ) - b,
/// and its gradient 2 (C - A*(lambda - sigma v)) Y.
struct AugLagScratch {
    std::vector<double> violation;     // A(Y Yᵀ) - b
    std::vector<double> shifted_dual;  // lambda - sigma * violation
    Factor grad;
    double value = 0.0;
    double cost_term = 0.0;  // <C, Y Yᵀ>
};

inline void alm_eval(const Problem& P, const Factor& Y, const std::vector<double>& lambda,
                     double sigma, AugLagScratch& s, bool want_gradient = true) {
    detail::require(Y.n == P.n, "alm_eval: dimension mismatch");
    detail::require(lambda.size() == P.constraints.size(), "alm_eval: dual length mismatch");
    s.cost_term = P.cost.gram(Y);
    s.violation = apply_A(P, Y);
    for (std::size_t i = 0; i < s.violation.size(); ++i) s.violation[i] -= P.b[i];
    const double lam_v = dot(lambda, s.violation);
    const double pen = dot(s.violation, s.violation);
    s.value = s.cost_term - lam_v + 0.5 * sigma * pen;
    if (want_gradient) {
        s.shifted_dual.resize(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i)
            s.shifted_dual[i] = lambda[i] - sigma * s.violation[i];
        s.grad = astar_apply_factor(P, s.shifted_dual, Y);
        s.grad.scale(2.0);
    }
}

inline double alm_value(const Problem& P, const Factor& Y, const std::vector<double>& lambda,
                        double sigma) {
    AugLagScratch s;
    alm_eval(P, Y, lambda, sigma, s, /*want_gradient=*/false);
    return s.value;
}

inline Factor alm_gradient(const Problem& P, const Factor& Y, const std::vector<double>& lambda,
                           double sigma) {
    AugLagScratch s;
    alm_eval(P, Y, lambda, sigma, s);
    return s.grad;
}

/// Coefficients of phi(t) = f(Y + t D) as an exact degree-4 polynomial,
/// phi(t) = c[0] + c[1] t + c[2] t² + c[3] t³ + c[4] t⁴. Each constraint
/// contributes a quadratic A((Y+tD)(Y+tD)ᵀ) - b; the penalty squares it.
inline std::array<double, 5> linesearch_polynomial(const Problem& P, const Factor& Y,
                                                   const Factor& D,
                                                   const std::vector<double>& lambda,
                                                   double sigma) {
    const double c0 = P.cost.gram(Y);
    const double c1 = P.cost.gram_cross(Y, D);
    const double c2 = P.cost.gram(D);

    const std::vector<double> a0 = apply_A(P, Y);
    const std::vector<double> a1 = apply_A_cross(P, Y, D);
    const std::vector<double> a2 = apply_A(P, D);

    std::array<double, 5> c{c0, 2.0 * c1, c2, 0.0, 0.0};
    for (std::size_t i = 0; i < a0.size(); ++i) {
        const double p = a0[i] - P.b[i];  // violation at t = 0
        const double q = 2.0 * a1[i];
        const double s = a2[i];
        c[0] += -lambda[i] * p + 0.5 * sigma * p * p;
        c[1] += -lambda[i] * q + sigma * p * q;
        c[2] += -lambda[i] * s + 0.5 * sigma * (q * q + 2.0 * p * s);
        c[3] += sigma * q * s;
        c[4] += 0.5 * sigma * s * s;
    }
    return c;
}

namespace detail {

inline double eval_poly4(const std::array<double, 5>& c, double t) {
    return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
}

/// Real roots of a3 x³ + a2 x² + a1 x + a0 = 0 via Cardano, with a two-step
/// Newton polish per root. Gracefully degrades to quadratic/linear cases.
inline int solve_cubic(double a3, double a2, double a1, double a0, std::array<double, 3>& roots) {
    const double scale =
        std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0), 1e-300});
    int count = 0;
    if (std::abs(a3) <= 1e-14 * scale) {
        if (std::abs(a2) <= 1e-14 * scale) {
            if (std::abs(a1) <= 1e-14 * scale) return 0;
            roots[0] = -a0 / a1;
            return 1;
        }
        const double disc = a1 * a1 - 4.0 * a2 * a0;
        if (disc < 0.0) return 0;
        const double sq = std::sqrt(disc);
        // numerically stable quadratic roots
        const double q = -0.5 * (a1 + std::copysign(sq, a1));
        roots[count++] = q / a2;
        if (q != 0.0) roots[count++] = a0 / q;
        return count;
    }

    const double B = a2 / a3, C = a1 / a3, D = a0 / a3;
    const double p = C - B * B / 3.0;
    const double q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
    const double shift = -B / 3.0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    const auto polish = [&](double x) {
        for (int it = 0; it < 2; ++it) {
            const double f = ((x + B) * x + C) * x + D;
            const double df = (3.0 * x + 2.0 * B) * x + C;
            if (df == 0.0) break;
            const double next = x - f / df;
            const double fn = ((next + B) * next + C) * next + D;
            if (std::abs(fn) >= std::abs(f)) break;
            x = next;
        }
        return x;
    };

    // one real root by Cardano, then deflate to a quadratic; repeated roots
    // come out of the quadratic without any discriminant thresholding here
    double r;
    if (p == 0.0 && q == 0.0) {
        r = shift;
    } else if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        r = std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq) + shift;
    } else {
        const double rho = std::sqrt(std::max(-p * p * p / 27.0, 0.0));
        const double arg = rho > 0.0 ? std::clamp(-0.5 * q / rho, -1.0, 1.0) : 1.0;
        const double theta = std::acos(arg) / 3.0;
        const double mag = 2.0 * std::sqrt(std::max(-p / 3.0, 0.0));
        r = shift;
        double best = -1.0;  // deflate by the largest root for stability
        for (int k = 0; k < 3; ++k) {
            const double cand = mag * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift;
            if (std::abs(cand) > best) {
                best = std::abs(cand);
                r = cand;
            }
        }
    }
    r = polish(r);
    roots[count++] = r;

    // synthetic division: x³ + Bx² + Cx + D = (x - r)(x² + q1 x + q0)
    const double q1 = B + r;
    const double q0 = C + r * q1;
    const double disc2 = q1 * q1 - 4.0 * q0;
    const double disc2_scale = q1 * q1 + 4.0 * std::abs(q0);
    if (disc2 >= 0.0) {
        const double sq = std::sqrt(disc2);
        const double t = -0.5 * (q1 + std::copysign(sq, q1));
        roots[count++] = polish(t);
        if (t != 0.0) roots[count++] = polish(q0 / t);
    } else if (-disc2 <= 1e-10 * disc2_scale) {
        roots[count++] = polish(-0.5 * q1);  // numerically repeated pair
    }
    return count;
}

}  // namespace detail

struct LineSearchResult {
    double step = 0.0;
    bool descent = true;            // false: phi'(0) >= 0, caller should restart
    double predicted_value = 0.0;   // phi(step) from the polynomial
};

inline constexpr double kLineSearchTMax = 1e6;

/// Global minimizer of phi(t) = f(Y + t D) over (0, t_limit]. phi is an exact
/// quartic with nonnegative leading coefficient, so the minimizer is among
/// the positive roots of the cubic phi'(t) = 0, with the range endpoint as
/// fallback. Callers restrict t_limit when the step must stay inside the
/// trace ball of the primal update.
inline LineSearchResult exact_linesearch(const Problem& P, const Factor& Y, const Factor& D,
                                         const std::vector<double>& lambda, double sigma,
                                         double t_limit = kLineSearchTMax) {
    const std::array<double, 5> c = linesearch_polynomial(P, Y, D, lambda, sigma);
    if (c[1] >= 0.0) return {0.0, false, c[0]};
    t_limit = std::min(t_limit, kLineSearchTMax);

    std::array<double, 3> roots{};
    const int nroots = detail::solve_cubic(4.0 * c[4], 3.0 * c[3], 2.0 * c[2], c[1], roots);

    double best_t = t_limit;
    double best_val = detail::eval_poly4(c, best_t);
    for (int i = 0; i < nroots; ++i) {
        const double t = roots[i];
        if (!(t > 0.0) || t > t_limit) continue;
        const double val = detail::eval_poly4(c, t);
        if (val < best_val) {
            best_val = val;
            best_t = t;
        }
    }
    // Descent guarantees a value below phi(0); back off geometrically in the
    // rare case roundoff in the root solve hands back a worse point.
    while (best_val > c[0] && best_t > 1e-18) {
        best_t *= 0.25;
        best_val = detail::eval_poly4(c, best_t);
    }
    return {best_t, true, best_val};
}

struct LbfgsOptions {
    int history = 4;
    int max_inner = 10000;
    bool record_values = false;
    // Cap on Tr(Y Yᵀ) = ||Y||²_F during the minimization; the primal update is
    // posed over the trace ball, and an unbounded search can escape along
    // directions the equality constraints leave free.
    double trace_cap = std::numeric_limits<double>::infinity();
};

struct LbfgsResult {
    Factor Y;
    double value = 0.0;
    double grad_norm = 0.0;
    double eta = 0.0;  // ||grad||_F / (1 + ||C||_F)
    int iterations = 0;
    bool reached_target = false;
    bool stalled = false;
    std::vector<double> value_history;
};

/// Limited-memory BFGS over the flattened factor with exact line search.
/// Stops when the relative gradient norm reaches eta_target, the iteration
/// cap is hit, or progress stalls (relative decrease < 1e-14 for 20
/// consecutive iterations).
inline LbfgsResult lbfgs_minimize_impl(const Problem& P, Factor Y,
                                           const std::vector<double>& lambda, double sigma,
                                           double eta_target, const LbfgsOptions& opt) {
    const double cost_scale = 1.0 + P.cost.frobenius_norm();
    const std::size_t dim = Y.data.size();

    AugLagScratch s;
    alm_eval(P, Y, lambda, sigma, s);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> pairs;
    int consecutive_skips = 0;
    int stall_count = 0;

    LbfgsResult res;
    if (opt.record_values) res.value_history.push_back(s.value);

    std::vector<double> direction(dim), q(dim), step_vec(dim), grad_old(dim);
    std::vector<double> alpha_memo;
    Factor D(Y.n, Y.r);
    Factor cand(Y.n, Y.r);
    AugLagScratch cand_state;

    while (true) {
        const double gnorm = s.grad.frobenius_norm();
        res.grad_norm = gnorm;
        res.eta = gnorm / cost_scale;
        if (res.eta <= eta_target) {
            res.reached_target = true;
            break;
        }
        if (res.iterations >= opt.max_inner) break;

        // two-loop recursion, initial Hessian scaled by s'y/y'y of the newest pair
        std::copy(s.grad.data.begin(), s.grad.data.end(), q.begin());
        alpha_memo.assign(pairs.size(), 0.0);
        for (std::size_t i = pairs.size(); i-- > 0;) {
            const Pair& pr = pairs[i];
            double a = 0.0;
            for (std::size_t k = 0; k < dim; ++k) a += pr.s[k] * q[k];
            a *= pr.rho;
            alpha_memo[i] = a;
            for (std::size_t k = 0; k < dim; ++k) q[k] -= a * pr.y[k];
        }
        if (!pairs.empty()) {
            const Pair& last = pairs.back();
            double sy = 0.0, yy = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                sy += last.s[k] * last.y[k];
                yy += last.y[k] * last.y[k];
            }
            const double gamma = yy > 0.0 ? sy / yy : 1.0;
            for (auto& x : q) x *= gamma;
        }
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Pair& pr = pairs[i];
            double beta = 0.0;
            for (std::size_t k = 0; k < dim; ++k) beta += pr.y[k] * q[k];
            beta *= pr.rho;
            for (std::size_t k = 0; k < dim; ++k) q[k] += pr.s[k] * (alpha_memo[i] - beta);
        }
        for (std::size_t k = 0; k < dim; ++k) direction[k] = -q[k];

        double gd = 0.0;
        for (std::size_t k = 0; k < dim; ++k) gd += s.grad.data[k] * direction[k];
        if (gd >= 0.0) {
            pairs.clear();
            for (std::size_t k = 0; k < dim; ++k) direction[k] = -s.grad.data[k];
        }

        // largest step keeping ||Y + t d||²_F inside the trace cap
        const auto ball_limit = [&](const std::vector<double>& dir) {
            double yy = 0.0, yd = 0.0, dd = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                yy += Y.data[k] * Y.data[k];
                yd += Y.data[k] * dir[k];
                dd += dir[k] * dir[k];
            }
            if (dd == 0.0) return 0.0;
            const double disc = yd * yd + dd * (opt.trace_cap - yy);
            if (disc <= 0.0) return 0.0;
            return std::max((-yd + std::sqrt(disc)) / dd, 0.0);
        };

        // Try a direction: exact search on the unrestricted ray first; if the
        // endpoint leaves the trace ball, rescale it onto the ball and keep it
        // only when it still descends, else fall back to the best in-ball step.
        const double f_old = s.value;
        const auto try_direction = [&](const std::vector<double>& dir) {
            D.data = dir;
            const LineSearchResult ls = exact_linesearch(P, Y, D, lambda, sigma);
            if (!ls.descent) return false;
            for (std::size_t k = 0; k < dim; ++k) cand.data[k] = Y.data[k] + ls.step * dir[k];
            if (std::isfinite(opt.trace_cap)) {
                double cn = 0.0;
                for (double v : cand.data) cn += v * v;
                if (cn > opt.trace_cap) {
                    const double scale = std::sqrt(opt.trace_cap / cn);
                    for (auto& v : cand.data) v *= scale;
                    alm_eval(P, cand, lambda, sigma, cand_state);
                    if (cand_state.value < f_old) return true;
                    // projected overshoot did not descend: best step inside the ball
                    const double t_ball = ball_limit(dir);
                    if (t_ball <= 0.0) return false;
                    const LineSearchResult capped =
                        exact_linesearch(P, Y, D, lambda, sigma, t_ball);
                    if (!capped.descent) return false;
                    for (std::size_t k = 0; k < dim; ++k)
                        cand.data[k] = Y.data[k] + capped.step * dir[k];
                    alm_eval(P, cand, lambda, sigma, cand_state);
                    return cand_state.value < f_old;
                }
            }
            alm_eval(P, cand, lambda, sigma, cand_state);
            return cand_state.value < f_old;
        };

        bool accepted = try_direction(direction);
        if (!accepted && gd < 0.0) {  // quasi-Newton direction failed: steepest descent
            pairs.clear();
            for (std::size_t k = 0; k < dim; ++k) direction[k] = -s.grad.data[k];
            accepted = try_direction(direction);
        }
        if (!accepted) {  // no descent available within the trace ball
            res.stalled = true;
            break;
        }

        std::copy(s.grad.data.begin(), s.grad.data.end(), grad_old.begin());
        for (std::size_t k = 0; k < dim; ++k) step_vec[k] = cand.data[k] - Y.data[k];
        Y.data.swap(cand.data);
        std::swap(s, cand_state);
        ++res.iterations;
        if (opt.record_values) res.value_history.push_back(s.value);

        const double rel_dec = (f_old - s.value) / std::max(1.0, std::abs(f_old));
        stall_count = rel_dec < 1e-14 ? stall_count + 1 : 0;
        if (stall_count >= 20) {
            res.stalled = true;
            break;
        }

        double sty = 0.0, ss = 0.0, yy = 0.0;
        std::vector<double> y_vec(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            y_vec[k] = s.grad.data[k] - grad_old[k];
            sty += step_vec[k] * y_vec[k];
            ss += step_vec[k] * step_vec[k];
            yy += y_vec[k] * y_vec[k];
        }
        if (sty > 1e-12 * std::sqrt(ss) * std::sqrt(yy)) {
            pairs.push_back({step_vec, std::move(y_vec), 1.0 / sty});
            if (static_cast<int>(pairs.size()) > opt.history) pairs.pop_front();
            consecutive_skips = 0;
        } else if (++consecutive_skips >= 2) {
            pairs.clear();
            consecutive_skips = 0;
        }
    }

    res.Y = std::move(Y);
    res.value = s.value;
    return res;
}

inline LbfgsResult lbfgs_minimize(const Problem& P, const Factor& Y0,
                                  const std::vector<double>& lambda, double sigma,
                                  double eta_target, const LbfgsOptions& opt = {}) {
    detail::require(eta_target > 0.0, "lbfgs_minimize: eta target must be positive");
    return lbfgs_minimize_impl(P, Y0, lambda, sigma, eta_target, opt);
}

}  // namespace sdplr
