#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "sdplr/linalg.hpp"
#include "sdplr/problems.hpp"

namespace sdplr {

struct CutSolution {
    std::vector<bool> side;
    double value = 0.0;
    int trials_used = 0;
};

namespace detail {

/// sign(Y g) with a shared Gaussian direction; sign(0) maps to side true.
inline std::vector<bool> hyperplane_sides(const Factor& Y, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> g(static_cast<std::size_t>(Y.r));
    for (auto& x : g) x = gauss(rng);
    std::vector<bool> side(static_cast<std::size_t>(Y.n));
    for (int i = 0; i < Y.n; ++i) {
        double proj = 0.0;
        for (int k = 0; k < Y.r; ++k) proj += Y(i, k) * g[static_cast<std::size_t>(k)];
        side[static_cast<std::size_t>(i)] = proj >= 0.0;
    }
    return side;
}

/// Cut weight across the partition, read off the Laplacian's off-diagonals
/// (L_uv = -w(uv) for every edge).
inline double cut_from_laplacian(const SparseSym& L, const std::vector<bool>& side) {
    double acc = 0.0;
    for (const auto& e : L.entries())
        if (e.row != e.col && side[static_cast<std::size_t>(e.row)] != side[static_cast<std::size_t>(e.col)])
            acc += -e.value;
    return acc;
}

}  // namespace detail

/// Goemans-Williamson style hyperplane rounding; keeps the best cut over the
/// requested trials. Deterministic given the seed.
inline CutSolution round_maxcut(const Factor& Y, const SparseSym& L, int trials,
                                std::uint64_t seed) {
    detail::require(trials >= 1, "round_maxcut: need at least one trial");
    detail::require(Y.n == L.n(), "round_maxcut: dimension mismatch");
    std::mt19937_64 rng(seed);
    CutSolution best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        std::vector<bool> side = detail::hyperplane_sides(Y, rng);
        const double value = detail::cut_from_laplacian(L, side);
        if (value > best.value) {
            best.side = std::move(side);
            best.value = value;
        }
    }
    best.trials_used = trials;
    return best;
}

/// Hyperplane rounding followed by balance repair: vertices migrate from the
/// larger side, cheapest marginal cut increase first, until both sides have
/// n/2 vertices. Keeps the smallest repaired cut over the trials.
inline CutSolution round_bisection(const Factor& Y, const SparseSym& L, int trials,
                                   std::uint64_t seed) {
    detail::require(trials >= 1, "round_bisection: need at least one trial");
    detail::require(Y.n == L.n(), "round_bisection: dimension mismatch");
    detail::require(Y.n % 2 == 0, "round_bisection: vertex count must be even");
    const int n = Y.n;

    // adjacency lists from the Laplacian off-diagonals
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    for (const auto& e : L.entries())
        if (e.row != e.col) {
            adj[static_cast<std::size_t>(e.row)].push_back({e.col, -e.value});
            adj[static_cast<std::size_t>(e.col)].push_back({e.row, -e.value});
        }

    std::mt19937_64 rng(seed);
    CutSolution best;
    best.value = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        std::vector<bool> side = detail::hyperplane_sides(Y, rng);
        int count_true = 0;
        for (int i = 0; i < n; ++i) count_true += side[static_cast<std::size_t>(i)] ? 1 : 0;
        while (count_true != n / 2) {
            const bool from = count_true > n / 2;  // move a vertex off the larger side
            int pick = -1;
            double pick_delta = 0.0;
            for (int v = 0; v < n; ++v) {
                if (side[static_cast<std::size_t>(v)] != from) continue;
                double delta = 0.0;  // cut change if v switches sides
                for (const auto& [u, w] : adj[static_cast<std::size_t>(v)])
                    delta += side[static_cast<std::size_t>(u)] == from ? w : -w;
                if (pick < 0 || delta < pick_delta) {
                    pick = v;
                    pick_delta = delta;
                }
            }
            side[static_cast<std::size_t>(pick)] = !from;
            count_true += from ? -1 : 1;
        }
        const double value = detail::cut_from_laplacian(L, side);
        if (value < best.value) {
            best.side = std::move(side);
            best.value = value;
        }
    }
    best.trials_used = trials;
    return best;
}

struct CutNormSolution {
    std::vector<bool> row_set;  // S
    std::vector<bool> col_set;  // T
    double value = 0.0;
    int trials_used = 0;
};

/// Rounds the block factor of the cut-norm relaxation: one shared Gaussian
/// projection signs both blocks, then the best of the four sign-restricted
/// (S, T) pairs is taken. |sum_{i in S, j in T} A_ij| is maximized over
/// trials.
inline CutNormSolution round_cutnorm(const Factor& Y, const RectMatrix& A, int trials,
                                     std::uint64_t seed) {
    detail::require(trials >= 1, "round_cutnorm: need at least one trial");
    detail::require(Y.n == A.rows + A.cols, "round_cutnorm: factor does not match block size");
    std::mt19937_64 rng(seed);
    CutNormSolution best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const std::vector<bool> side = detail::hyperplane_sides(Y, rng);
        // partial sums over the four sign sectors
        double sums[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        for (const auto& e : A.entries) {
            const int a = side[static_cast<std::size_t>(e.row)] ? 1 : 0;
            const int b = side[static_cast<std::size_t>(A.rows + e.col)] ? 1 : 0;
            sums[a][b] += e.value;
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double value = std::abs(sums[a][b]);
                if (value > best.value) {
                    best.value = value;
                    best.row_set.assign(static_cast<std::size_t>(A.rows), false);
                    best.col_set.assign(static_cast<std::size_t>(A.cols), false);
                    for (int i = 0; i < A.rows; ++i)
                        best.row_set[static_cast<std::size_t>(i)] =
                            (side[static_cast<std::size_t>(i)] ? 1 : 0) == a;
                    for (int j = 0; j < A.cols; ++j)
                        best.col_set[static_cast<std::size_t>(j)] =
                            (side[static_cast<std::size_t>(A.rows + j)] ? 1 : 0) == b;
                }
            }
    }
    best.trials_used = trials;
    return best;
}

}  // namespace sdplr
