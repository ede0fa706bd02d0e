#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sdplr/linalg.hpp"

namespace sdplr {

struct EigEstimate {
    double value = 0.0;
    std::vector<double> vector;
    int steps_used = 0;
};

/// Step budget used when the suboptimality bound is evaluated in the t-th
/// outer iteration (t is 1-based): ceil(2 sqrt(t) ln n).
inline int lanczos_step_budget(int t, int n) {
    const double steps = 2.0 * std::sqrt(static_cast<double>(t)) *
                         std::log(static_cast<double>(std::max(n, 2)));
    return std::max(1, static_cast<int>(std::ceil(steps)));
}

namespace detail {

/// Eigendecomposition of a symmetric tridiagonal matrix by QL with implicit
/// shifts. diag/sub hold the diagonal and subdiagonal (sub[i] couples i and
/// i+1); on return diag holds eigenvalues and V (column-major m x m, started
/// as identity here) their eigenvectors.
inline void tridiag_eig_ql(std::vector<double>& diag, std::vector<double>& sub,
                           std::vector<double>& V, int m) {
    V.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) V[static_cast<std::size_t>(i) * m + i] = 1.0;
    if (m == 1) return;

    std::vector<double> e(sub.begin(), sub.end());
    e.resize(static_cast<std::size_t>(m), 0.0);

    for (int l = 0; l < m; ++l) {
        int iter = 0;
        int split;
        do {
            for (split = l; split < m - 1; ++split) {
                const double scale = std::abs(diag[static_cast<std::size_t>(split)]) +
                                     std::abs(diag[static_cast<std::size_t>(split) + 1]);
                if (std::abs(e[static_cast<std::size_t>(split)]) <=
                    std::numeric_limits<double>::epsilon() * scale)
                    break;
            }
            if (split != l) {
                if (iter++ == 50) break;  // accept current accuracy
                double g = (diag[static_cast<std::size_t>(l) + 1] - diag[static_cast<std::size_t>(l)]) /
                           (2.0 * e[static_cast<std::size_t>(l)]);
                double r = std::hypot(g, 1.0);
                g = diag[static_cast<std::size_t>(split)] - diag[static_cast<std::size_t>(l)] +
                    e[static_cast<std::size_t>(l)] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = split - 1; i >= l; --i) {
                    double f = s * e[static_cast<std::size_t>(i)];
                    const double b = c * e[static_cast<std::size_t>(i)];
                    r = std::hypot(f, g);
                    e[static_cast<std::size_t>(i) + 1] = r;
                    if (r == 0.0) {
                        diag[static_cast<std::size_t>(i) + 1] -= p;
                        e[static_cast<std::size_t>(split)] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[static_cast<std::size_t>(i) + 1] - p;
                    r = (diag[static_cast<std::size_t>(i)] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[static_cast<std::size_t>(i) + 1] = g + p;
                    g = c * r - b;
                    double* vi = V.data() + static_cast<std::size_t>(i) * m;
                    double* vi1 = V.data() + (static_cast<std::size_t>(i) + 1) * m;
                    for (int k = 0; k < m; ++k) {
                        f = vi1[k];
                        vi1[k] = s * vi[k] + c * f;
                        vi[k] = c * vi[k] - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                diag[static_cast<std::size_t>(l)] -= p;
                e[static_cast<std::size_t>(l)] = g;
                e[static_cast<std::size_t>(split)] = 0.0;
            }
        } while (split != l);
    }
}

}  // namespace detail

/// Smallest eigenpair of a symmetric operator via Lanczos with a seeded
/// Gaussian start and full reorthogonalization. Runs at most min(steps, n)
/// iterations; an invariant-subspace breakdown returns the current estimate
/// early with steps_used below the budget.
template <typename Op>
EigEstimate min_eig(Op&& op, int n, int steps, std::uint64_t seed) {
    detail::require(n >= 1, "min_eig: dimension must be positive");
    detail::require(steps >= 1, "min_eig: step budget must be positive");
    const int budget = std::min(steps, n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> basis;
    basis.reserve(static_cast<std::size_t>(budget));
    std::vector<double> alpha, beta;

    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = gauss(rng);
    const double vn = norm2(v);
    for (auto& x : v) x /= vn;
    basis.push_back(v);

    std::vector<double> w(static_cast<std::size_t>(n));
    for (int k = 0; k < budget; ++k) {
        op(basis[static_cast<std::size_t>(k)].data(), w.data());
        const double a = dot(basis[static_cast<std::size_t>(k)], w);
        alpha.push_back(a);
        if (k + 1 == budget) break;

        for (int i = 0; i < n; ++i)
            w[static_cast<std::size_t>(i)] -= a * basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (k > 0)
            for (int i = 0; i < n; ++i)
                w[static_cast<std::size_t>(i)] -= beta[static_cast<std::size_t>(k) - 1] *
                                                  basis[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(i)];
        // full reorthogonalization against every stored vector
        for (const auto& u : basis) {
            const double proj = dot(u, w);
            for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] -= proj * u[static_cast<std::size_t>(i)];
        }
        const double b = norm2(w);
        if (b < 1e-14) break;  // invariant subspace; current Ritz pair is converged
        beta.push_back(b);
        std::vector<double> next(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / b;
        basis.push_back(std::move(next));
    }

    const int used = static_cast<int>(alpha.size());
    std::vector<double> evals = alpha;
    std::vector<double> offdiag(beta.begin(), beta.begin() + (used - 1));
    std::vector<double> V;
    detail::tridiag_eig_ql(evals, offdiag, V, used);

    int arg = 0;
    for (int j = 1; j < used; ++j)
        if (evals[static_cast<std::size_t>(j)] < evals[static_cast<std::size_t>(arg)]) arg = j;

    EigEstimate est;
    est.value = evals[static_cast<std::size_t>(arg)];
    est.steps_used = used;
    est.vector.assign(static_cast<std::size_t>(n), 0.0);
    const double* y = V.data() + static_cast<std::size_t>(arg) * used;
    for (int j = 0; j < used; ++j)
        for (int i = 0; i < n; ++i)
            est.vector[static_cast<std::size_t>(i)] += y[j] * basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    const double un = norm2(est.vector);
    if (un > 0.0)
        for (auto& x : est.vector) x /= un;
    return est;
}

}  // namespace sdplr
