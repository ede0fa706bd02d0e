#pragma once

#include <cmath>
#include <utility>
#include <variant>
#include <vector>

#include "sdplr/linalg.hpp"

namespace sdplr {

/// One linear equality constraint <A, X> = rhs. The common constraint
/// matrices get dedicated kernels so that evaluating them against a factor
/// costs O(r) or O(n r) instead of a generic sparse pass.
class Constraint {
public:
    struct Diag {
        int index;
    };
    struct UnitOffDiag {  // (e_i e_jᵀ + e_j e_iᵀ) / 2
        int i, j;
    };
    struct RankOne {  // d dᵀ
        std::vector<double> d;
    };
    struct Trace {};  // identity
    struct General {
        SparseSym S;
    };

    using Payload = std::variant<Diag, UnitOffDiag, RankOne, Trace, General>;

    static Constraint diag(int i, double rhs) { return Constraint(Diag{i}, rhs); }
    static Constraint unit_off_diag(int i, int j, double rhs) {
        detail::require(i != j, "Constraint: off-diagonal indices must differ");
        if (i > j) std::swap(i, j);
        return Constraint(UnitOffDiag{i, j}, rhs);
    }
    static Constraint rank_one(std::vector<double> d, double rhs) {
        return Constraint(RankOne{std::move(d)}, rhs);
    }
    static Constraint trace(double rhs) { return Constraint(Trace{}, rhs); }
    static Constraint general(SparseSym S, double rhs) {
        return Constraint(General{std::move(S)}, rhs);
    }

    double rhs() const { return rhs_; }
    const Payload& payload() const { return payload_; }

    /// <A, Y Yᵀ>.
    double eval(const Factor& Y) const {
        return std::visit(
            [&](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Diag>) {
                    return Y.row_dot(p.index, p.index);
                } else if constexpr (std::is_same_v<T, UnitOffDiag>) {
                    return Y.row_dot(p.i, p.j);
                } else if constexpr (std::is_same_v<T, RankOne>) {
                    double acc = 0.0;
                    for (int k = 0; k < Y.r; ++k) {
                        double c = 0.0;
                        const double* col = Y.col(k);
                        for (int i = 0; i < Y.n; ++i) c += p.d[static_cast<std::size_t>(i)] * col[i];
                        acc += c * c;
                    }
                    return acc;
                } else if constexpr (std::is_same_v<T, Trace>) {
                    const double f = Y.frobenius_norm();
                    return f * f;
                } else {
                    return gram_inner(p.S, Y);
                }
            },
            payload_);
    }

    /// <A, U Wᵀ> for symmetric A; the quadratic <A, (U+tW)(U+tW)ᵀ> expands as
    /// eval(U) + 2 t eval_cross(U, W) + t² eval(W).
    double eval_cross(const Factor& U, const Factor& W) const {
        return std::visit(
            [&](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Diag>) {
                    return U.row_dot_with(p.index, W, p.index);
                } else if constexpr (std::is_same_v<T, UnitOffDiag>) {
                    return 0.5 * (U.row_dot_with(p.i, W, p.j) + U.row_dot_with(p.j, W, p.i));
                } else if constexpr (std::is_same_v<T, RankOne>) {
                    double acc = 0.0;
                    for (int k = 0; k < U.r; ++k) {
                        double cu = 0.0, cw = 0.0;
                        const double* uc = U.col(k);
                        const double* wc = W.col(k);
                        for (int i = 0; i < U.n; ++i) {
                            cu += p.d[static_cast<std::size_t>(i)] * uc[i];
                            cw += p.d[static_cast<std::size_t>(i)] * wc[i];
                        }
                        acc += cu * cw;
                    }
                    return acc;
                } else if constexpr (std::is_same_v<T, Trace>) {
                    return std::inner_product(U.data.begin(), U.data.end(), W.data.begin(), 0.0);
                } else {
                    return gram_cross(p.S, U, W);
                }
            },
            payload_);
    }

    /// y += coeff * A x.
    void apply(const double* x, double* y, double coeff, int n) const {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Diag>) {
                    y[p.index] += coeff * x[p.index];
                } else if constexpr (std::is_same_v<T, UnitOffDiag>) {
                    y[p.i] += 0.5 * coeff * x[p.j];
                    y[p.j] += 0.5 * coeff * x[p.i];
                } else if constexpr (std::is_same_v<T, RankOne>) {
                    double c = 0.0;
                    for (int i = 0; i < n; ++i) c += p.d[static_cast<std::size_t>(i)] * x[i];
                    c *= coeff;
                    for (int i = 0; i < n; ++i) y[i] += c * p.d[static_cast<std::size_t>(i)];
                } else if constexpr (std::is_same_v<T, Trace>) {
                    for (int i = 0; i < n; ++i) y[i] += coeff * x[i];
                } else {
                    p.S.accumulate_multiply(x, y, coeff);
                }
            },
            payload_);
    }

    /// out += coeff * A Y, all columns at once.
    void apply_factor(const Factor& Y, Factor& out, double coeff) const {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Diag>) {
                    out.add_scaled_row(p.index, Y, p.index, coeff);
                } else if constexpr (std::is_same_v<T, UnitOffDiag>) {
                    out.add_scaled_row(p.i, Y, p.j, 0.5 * coeff);
                    out.add_scaled_row(p.j, Y, p.i, 0.5 * coeff);
                } else if constexpr (std::is_same_v<T, RankOne>) {
                    for (int k = 0; k < Y.r; ++k) {
                        double c = 0.0;
                        const double* col = Y.col(k);
                        for (int i = 0; i < Y.n; ++i) c += p.d[static_cast<std::size_t>(i)] * col[i];
                        c *= coeff;
                        double* oc = out.col(k);
                        for (int i = 0; i < Y.n; ++i) oc[i] += c * p.d[static_cast<std::size_t>(i)];
                    }
                } else if constexpr (std::is_same_v<T, Trace>) {
                    for (std::size_t i = 0; i < Y.data.size(); ++i)
                        out.data[i] += coeff * Y.data[i];
                } else {
                    for (const auto& e : p.S.entries()) {
                        out.add_scaled_row(e.row, Y, e.col, coeff * e.value);
                        if (e.row != e.col) out.add_scaled_row(e.col, Y, e.row, coeff * e.value);
                    }
                }
            },
            payload_);
    }

    /// Explicit matrix of this constraint; lets tests compare each kernel
    /// against the General evaluation of the same matrix.
    SparseSym to_general(int n) const {
        std::vector<Triplet> t;
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Diag>) {
                    t.push_back({p.index, p.index, 1.0});
                } else if constexpr (std::is_same_v<T, UnitOffDiag>) {
                    t.push_back({p.i, p.j, 0.5});
                } else if constexpr (std::is_same_v<T, RankOne>) {
                    for (int i = 0; i < n; ++i)
                        for (int j = i; j < n; ++j)
                            t.push_back({i, j, p.d[static_cast<std::size_t>(i)] *
                                                   p.d[static_cast<std::size_t>(j)]});
                } else if constexpr (std::is_same_v<T, Trace>) {
                    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
                } else {
                    t = p.S.entries();
                }
            },
            payload_);
        return SparseSym(n, std::move(t));
    }

private:
    Constraint(Payload p, double rhs) : payload_(std::move(p)), rhs_(rhs) {}

    Payload payload_;
    double rhs_ = 0.0;
};

/// Cost matrix as a sparse part plus optional weighted rank-one terms; the
/// all-ones cost of the theta relaxation stays O(n) this way instead of n².
class Cost {
public:
    struct RankOneTerm {
        double weight;
        std::vector<double> vec;
    };

    Cost() = default;
    explicit Cost(SparseSym sparse) : sparse_(std::move(sparse)), n_(sparse_.n()) {}
    Cost(int n, std::vector<RankOneTerm> terms) : n_(n), rank_one_(std::move(terms)) {}

    int n() const { return n_; }
    const SparseSym& sparse() const { return sparse_; }
    const std::vector<RankOneTerm>& rank_one() const { return rank_one_; }

    /// y = C x.
    void multiply(const double* x, double* y) const {
        std::fill(y, y + n_, 0.0);
        accumulate_multiply(x, y, 1.0);
    }

    void accumulate_multiply(const double* x, double* y, double coeff) const {
        if (!sparse_.empty()) sparse_.accumulate_multiply(x, y, coeff);
        for (const auto& term : rank_one_) {
            double c = 0.0;
            for (int i = 0; i < n_; ++i) c += term.vec[static_cast<std::size_t>(i)] * x[i];
            c *= coeff * term.weight;
            for (int i = 0; i < n_; ++i) y[i] += c * term.vec[static_cast<std::size_t>(i)];
        }
    }

    double frobenius_norm() const {
        double acc = 0.0;
        for (const auto& e : sparse_.entries()) {
            const double w = e.row == e.col ? 1.0 : 2.0;
            acc += w * e.value * e.value;
        }
        // cross terms <S, d dᵀ> = dᵀ S d and <d_k d_kᵀ, d_l d_lᵀ> = (d_kᵀ d_l)²
        for (const auto& term : rank_one_) {
            if (!sparse_.empty()) {
                std::vector<double> sd(static_cast<std::size_t>(n_), 0.0);
                sparse_.accumulate_multiply(term.vec.data(), sd.data(), 1.0);
                double quad = 0.0;
                for (int i = 0; i < n_; ++i) quad += term.vec[static_cast<std::size_t>(i)] * sd[i];
                acc += 2.0 * term.weight * quad;
            }
        }
        for (const auto& a : rank_one_)
            for (const auto& b : rank_one_) {
                double d = 0.0;
                for (int i = 0; i < n_; ++i)
                    d += a.vec[static_cast<std::size_t>(i)] * b.vec[static_cast<std::size_t>(i)];
                acc += a.weight * b.weight * d * d;
            }
        return std::sqrt(std::max(acc, 0.0));
    }

    /// <C, Y Yᵀ>.
    double gram(const Factor& Y) const {
        double acc = sparse_.empty() ? 0.0 : gram_inner(sparse_, Y);
        for (const auto& term : rank_one_) {
            for (int k = 0; k < Y.r; ++k) {
                double c = 0.0;
                const double* col = Y.col(k);
                for (int i = 0; i < n_; ++i) c += term.vec[static_cast<std::size_t>(i)] * col[i];
                acc += term.weight * c * c;
            }
        }
        return acc;
    }

    /// <C, U Wᵀ>.
    double gram_cross(const Factor& U, const Factor& W) const {
        double acc = sparse_.empty() ? 0.0 : sdplr::gram_cross(sparse_, U, W);
        for (const auto& term : rank_one_) {
            for (int k = 0; k < U.r; ++k) {
                double cu = 0.0, cw = 0.0;
                const double* uc = U.col(k);
                const double* wc = W.col(k);
                for (int i = 0; i < n_; ++i) {
                    cu += term.vec[static_cast<std::size_t>(i)] * uc[i];
                    cw += term.vec[static_cast<std::size_t>(i)] * wc[i];
                }
                acc += term.weight * cu * cw;
            }
        }
        return acc;
    }

    /// out += coeff * C Y.
    void apply_factor(const Factor& Y, Factor& out, double coeff) const {
        for (const auto& e : sparse_.entries()) {
            out.add_scaled_row(e.row, Y, e.col, coeff * e.value);
            if (e.row != e.col) out.add_scaled_row(e.col, Y, e.row, coeff * e.value);
        }
        for (const auto& term : rank_one_) {
            for (int k = 0; k < Y.r; ++k) {
                double c = 0.0;
                const double* col = Y.col(k);
                for (int i = 0; i < n_; ++i) c += term.vec[static_cast<std::size_t>(i)] * col[i];
                c *= coeff * term.weight;
                double* oc = out.col(k);
                for (int i = 0; i < n_; ++i) oc[i] += c * term.vec[static_cast<std::size_t>(i)];
            }
        }
    }

private:
    SparseSym sparse_;
    int n_ = 0;
    std::vector<RankOneTerm> rank_one_;
};

/// Canonical minimization SDP with a trace bound:
///   min <C, X>  s.t.  <A_i, X> = b_i,  X PSD,  Tr(X) <= trace_bound.
struct Problem {
    int n = 0;
    Cost cost;
    std::vector<Constraint> constraints;
    std::vector<double> b;
    double trace_bound = 0.0;
    bool sense_flip = false;  // true when the user problem was a maximization

    int m() const { return static_cast<int>(constraints.size()); }

    /// Barvinok-Pataki style cap for the factor rank.
    int rank_cap() const {
        const double m_ = static_cast<double>(constraints.size());
        return std::max(1, static_cast<int>(std::floor(std::sqrt(2.0 * m_) + 1.0)));
    }

    double user_objective(double canonical) const { return sense_flip ? -canonical : canonical; }

    void validate() const {
        detail::require(n >= 1, "Problem: dimension must be positive");
        detail::require(constraints.size() == b.size(), "Problem: constraint/rhs length mismatch");
        detail::require(trace_bound > 0.0, "Problem: trace bound must be positive");
    }
};

/// A(Y Yᵀ): one entry per constraint.
inline std::vector<double> apply_A(const Problem& P, const Factor& Y) {
    detail::require(Y.n == P.n, "apply_A: dimension mismatch");
    std::vector<double> out(P.constraints.size());
    for (std::size_t i = 0; i < P.constraints.size(); ++i) out[i] = P.constraints[i].eval(Y);
    return out;
}

/// Per-constraint <A_i, U Wᵀ>; the cross coefficients of the line-search quartic.
inline std::vector<double> apply_A_cross(const Problem& P, const Factor& U, const Factor& W) {
    std::vector<double> out(P.constraints.size());
    for (std::size_t i = 0; i < P.constraints.size(); ++i)
        out[i] = P.constraints[i].eval_cross(U, W);
    return out;
}

/// y = (C - A*(lambda)) x, allocation-free.
inline void astar_multiply(const Problem& P, const std::vector<double>& lambda, const double* x,
                           double* y) {
    std::fill(y, y + P.n, 0.0);
    P.cost.accumulate_multiply(x, y, 1.0);
    for (std::size_t i = 0; i < P.constraints.size(); ++i)
        if (lambda[i] != 0.0) P.constraints[i].apply(x, y, -lambda[i], P.n);
}

/// (C - A*(lambda)) x without materializing the operator.
inline std::vector<double> astar_matvec(const Problem& P, const std::vector<double>& lambda,
                                        const std::vector<double>& x) {
    detail::require(lambda.size() == P.constraints.size(), "astar_matvec: dual length mismatch");
    detail::require(static_cast<int>(x.size()) == P.n, "astar_matvec: vector length mismatch");
    std::vector<double> y(static_cast<std::size_t>(P.n));
    astar_multiply(P, lambda, x.data(), y.data());
    return y;
}

/// (C - A*(lambda)) Y, all columns at once.
inline Factor astar_apply_factor(const Problem& P, const std::vector<double>& lambda,
                                 const Factor& Y) {
    detail::require(Y.n == P.n, "astar_apply_factor: dimension mismatch");
    Factor out(Y.n, Y.r);
    P.cost.apply_factor(Y, out, 1.0);
    for (std::size_t i = 0; i < P.constraints.size(); ++i)
        if (lambda[i] != 0.0) P.constraints[i].apply_factor(Y, out, -lambda[i]);
    return out;
}

/// Relative residual of the adjoint identity <A*(lambda), Y Yᵀ> = lambdaᵀ A(Y Yᵀ),
/// with the left side evaluated through astar_matvec on Y's columns.
inline double adjoint_check(const Problem& P, const std::vector<double>& lambda, const Factor& Y) {
    const std::vector<double> ay = apply_A(P, Y);
    double rhs = 0.0;
    for (std::size_t i = 0; i < ay.size(); ++i) rhs += lambda[i] * ay[i];

    double lhs = 0.0;  // sum_j y_jᵀ (C y_j) - y_jᵀ (C - A*(lambda)) y_j
    std::vector<double> x(static_cast<std::size_t>(P.n));
    std::vector<double> cy(static_cast<std::size_t>(P.n));
    for (int k = 0; k < Y.r; ++k) {
        std::copy(Y.col(k), Y.col(k) + Y.n, x.begin());
        P.cost.multiply(x.data(), cy.data());
        const std::vector<double> sy = astar_matvec(P, lambda, x);
        for (int i = 0; i < P.n; ++i) lhs += x[static_cast<std::size_t>(i)] * (cy[static_cast<std::size_t>(i)] - sy[static_cast<std::size_t>(i)]);
    }
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

}  // namespace sdplr
