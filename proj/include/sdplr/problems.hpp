#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "sdplr/model.hpp"

namespace sdplr {

/// Undirected weighted graph. Edges are normalized to u < v with duplicate
/// pairs summed; self-loops are dropped.
struct Graph {
    struct Edge {
        int u, v;
        double weight;
    };

    int n = 0;
    std::vector<Edge> edges;

    static Graph from_edges(int n, std::vector<Edge> raw) {
        detail::require(n >= 0, "Graph: negative vertex count");
        std::map<std::pair<int, int>, double> acc;
        for (auto& e : raw) {
            detail::require(e.u >= 0 && e.u < n && e.v >= 0 && e.v < n,
                            "Graph: vertex index out of range");
            if (e.u == e.v) continue;
            const int a = std::min(e.u, e.v), b = std::max(e.u, e.v);
            acc[{a, b}] += e.weight;
        }
        Graph g;
        g.n = n;
        g.edges.reserve(acc.size());
        for (const auto& [key, w] : acc) g.edges.push_back({key.first, key.second, w});
        return g;
    }

    static Graph complete(int n, double weight = 1.0) {
        std::vector<Edge> e;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) e.push_back({i, j, weight});
        return from_edges(n, std::move(e));
    }

    static Graph cycle(int n, double weight = 1.0) {
        std::vector<Edge> e;
        for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, weight});
        return from_edges(n, std::move(e));
    }

    static Graph empty(int n) { return from_edges(n, {}); }

    /// Erdos-Renyi G(n, p) with unit weights.
    static Graph random_gnp(int n, double p, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<Edge> e;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (unif(rng) < p) e.push_back({i, j, 1.0});
        return from_edges(n, std::move(e));
    }

    SparseSym laplacian() const {
        std::vector<Triplet> t;
        t.reserve(edges.size() * 2 + static_cast<std::size_t>(n));
        std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
        for (const auto& e : edges) {
            t.push_back({e.u, e.v, -e.weight});
            degree[static_cast<std::size_t>(e.u)] += e.weight;
            degree[static_cast<std::size_t>(e.v)] += e.weight;
        }
        for (int i = 0; i < n; ++i) t.push_back({i, i, degree[static_cast<std::size_t>(i)]});
        return SparseSym(n, std::move(t));
    }

    double total_weight() const {
        double acc = 0.0;
        for (const auto& e : edges) acc += e.weight;
        return acc;
    }
};

/// Rectangular sparse matrix in triplet form (cut norm input, observed
/// entries of a matrix-completion instance).
struct RectMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Triplet> entries;
};

/// Max Cut relaxation: maximize <L, X>/4 with unit diagonal; canonical form
/// minimizes <-L/4, X> with trace bound n. The absolute-value preprocessing
/// is opt-in; by default edge weights pass through unchanged.
inline Problem build_maxcut(const Graph& g, bool absolute_weights = false) {
    detail::require(g.n >= 1, "build_maxcut: graph must have at least one vertex");
    Graph work = g;
    if (absolute_weights)
        for (auto& e : work.edges) e.weight = std::abs(e.weight);

    std::vector<Triplet> cost;
    const SparseSym lap = work.laplacian();
    cost.reserve(lap.nnz());
    for (const auto& e : lap.entries()) cost.push_back({e.row, e.col, -e.value / 4.0});

    Problem P;
    P.n = g.n;
    P.cost = Cost(SparseSym(g.n, std::move(cost)));
    P.constraints.reserve(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) P.constraints.push_back(Constraint::diag(i, 1.0));
    P.b.assign(static_cast<std::size_t>(g.n), 1.0);
    P.trace_bound = static_cast<double>(g.n);
    P.sense_flip = true;
    return P;
}

/// Minimum Bisection relaxation: minimize <L, X>/4 with unit diagonal and
/// 1ᵀX1 = 0. Odd graphs get one isolated dummy vertex so a balanced split
/// exists; trace bound is the padded size.
inline Problem build_minbisection(const Graph& g) {
    detail::require(g.n >= 2, "build_minbisection: graph must have at least two vertices");
    const int n = g.n % 2 == 0 ? g.n : g.n + 1;
    Graph padded = g;
    padded.n = n;

    std::vector<Triplet> cost;
    const SparseSym lap = padded.laplacian();
    for (const auto& e : lap.entries()) cost.push_back({e.row, e.col, e.value / 4.0});

    Problem P;
    P.n = n;
    P.cost = Cost(SparseSym(n, std::move(cost)));
    for (int i = 0; i < n; ++i) P.constraints.push_back(Constraint::diag(i, 1.0));
    P.b.assign(static_cast<std::size_t>(n), 1.0);
    P.constraints.push_back(
        Constraint::rank_one(std::vector<double>(static_cast<std::size_t>(n), 1.0), 0.0));
    P.b.push_back(0.0);
    P.trace_bound = static_cast<double>(n);
    P.sense_flip = false;
    return P;
}

/// Lovasz theta: maximize 1ᵀX1 with Tr(X) = 1 and X_ij = 0 on edges. The
/// all-ones cost is kept as a rank-one term so nothing n² is ever stored.
inline Problem build_lovasz_theta(const Graph& g) {
    detail::require(g.n >= 1, "build_lovasz_theta: graph must have at least one vertex");
    Problem P;
    P.n = g.n;
    P.cost = Cost(g.n, {{-1.0, std::vector<double>(static_cast<std::size_t>(g.n), 1.0)}});
    P.constraints.push_back(Constraint::trace(1.0));
    P.b.push_back(1.0);
    for (const auto& e : g.edges) {
        P.constraints.push_back(Constraint::unit_off_diag(e.u, e.v, 0.0));
        P.b.push_back(0.0);
    }
    P.trace_bound = 1.0;
    P.sense_flip = true;
    return P;
}

/// Cut norm relaxation on the (rows+cols)-dimensional block embedding:
/// maximize <[0 A; Aᵀ 0], X>/2 with unit diagonal and trace bound rows+cols.
inline Problem build_cutnorm(const RectMatrix& A) {
    detail::require(A.rows >= 1 && A.cols >= 1, "build_cutnorm: matrix must be nonempty");
    const int n = A.rows + A.cols;
    std::vector<Triplet> cost;
    cost.reserve(A.entries.size());
    for (const auto& e : A.entries) {
        detail::require(e.row >= 0 && e.row < A.rows && e.col >= 0 && e.col < A.cols,
                        "build_cutnorm: entry out of range");
        cost.push_back({e.row, A.rows + e.col, -e.value / 2.0});
    }
    Problem P;
    P.n = n;
    P.cost = Cost(SparseSym(n, std::move(cost)));
    for (int i = 0; i < n; ++i) P.constraints.push_back(Constraint::diag(i, 1.0));
    P.b.assign(static_cast<std::size_t>(n), 1.0);
    P.trace_bound = static_cast<double>(n);
    P.sense_flip = true;
    return P;
}

/// Nuclear-norm matrix completion: minimize (Tr W1 + Tr W2)/2 over the
/// (n+p)-dimensional block matrix with X_{i, n+j} pinned to the observed
/// entries. Trace bound 2 sqrt(min{n,p}) ||M_Omega||_F.
inline Problem build_matrix_completion(int n, int p, const std::vector<Triplet>& observed) {
    detail::require(n >= 1 && p >= 1, "build_matrix_completion: invalid block sizes");
    detail::require(!observed.empty(), "build_matrix_completion: no observed entries");

    Problem P;
    P.n = n + p;
    std::vector<Triplet> cost;
    for (int i = 0; i < n + p; ++i) cost.push_back({i, i, 0.5});
    P.cost = Cost(SparseSym(n + p, std::move(cost)));

    std::map<std::pair<int, int>, bool> seen;
    double obs_norm_sq = 0.0;
    for (const auto& e : observed) {
        detail::require(e.row >= 0 && e.row < n && e.col >= 0 && e.col < p,
                        "build_matrix_completion: observation out of range");
        detail::require(!seen[{e.row, e.col}], "build_matrix_completion: duplicate observation");
        seen[{e.row, e.col}] = true;
        P.constraints.push_back(Constraint::unit_off_diag(e.row, n + e.col, e.value));
        P.b.push_back(e.value);
        obs_norm_sq += e.value * e.value;
    }
    P.trace_bound = 2.0 * std::sqrt(static_cast<double>(std::min(n, p))) * std::sqrt(obs_norm_sq);
    P.sense_flip = false;
    return P;
}

}  // namespace sdplr
