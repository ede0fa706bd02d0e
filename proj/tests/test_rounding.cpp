#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sdplr/alm.hpp"
#include "sdplr/problems.hpp"
#include "sdplr/rounding.hpp"

using namespace sdplr;

namespace {

/// Independent cut recomputation: 1/4 s' L s with s = +-1 from the sides.
double cut_via_quadratic_form(const SparseSym& L, const std::vector<bool>& side) {
    Factor s(L.n(), 1);
    for (int i = 0; i < L.n(); ++i) s(i, 0) = side[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
    return gram_inner(L, s) / 4.0;
}

Factor optimal_k3_factor() {
    // X* = (3/2) I - J/2
    Eigen::MatrixXd X(3, 3);
    X.setConstant(-0.5);
    for (int i = 0; i < 3; ++i) X(i, i) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
    return oracles::from_matrix(es.eigenvectors() *
                                es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
}

}  // namespace

TEST(RoundMaxcut, K2OptimalFactorCutsInOneTrial) {
    Factor Y(2, 1);
    Y(0, 0) = 1.0;
    Y(1, 0) = -1.0;
    const SparseSym L = Graph::complete(2).laplacian();
    const CutSolution cut = round_maxcut(Y, L, 1, 3);
    EXPECT_DOUBLE_EQ(cut.value, 1.0);
    EXPECT_NE(cut.side[0], cut.side[1]);
}

TEST(RoundMaxcut, K3OptimalFactorFindsTheMaxCut) {
    const SparseSym L = Graph::complete(3).laplacian();
    const CutSolution cut = round_maxcut(optimal_k3_factor(), L, 100, 7);
    EXPECT_DOUBLE_EQ(cut.value, 2.0);  // exhaustive max cut of K3
}

TEST(RoundMaxcut, ZeroFactorDegenerates) {
    const Factor Y(3, 2);
    const SparseSym L = Graph::complete(3).laplacian();
    const CutSolution cut = round_maxcut(Y, L, 5, 1);
    EXPECT_DOUBLE_EQ(cut.value, 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(cut.side[static_cast<std::size_t>(i)]);
}

TEST(RoundMaxcut, ValueMatchesIndependentRecomputation) {
    std::mt19937_64 rng(11);
    const Graph g = Graph::random_gnp(20, 0.3, 4);
    const SparseSym L = g.laplacian();
    const Factor Y = oracles::random_factor(rng, 20, 5);
    const CutSolution cut = round_maxcut(Y, L, 25, 13);
    EXPECT_DOUBLE_EQ(cut.value, cut_via_quadratic_form(L, cut.side));
}

TEST(RoundMaxcut, BestValueMonotoneInTrials) {
    std::mt19937_64 rng(17);
    const Graph g = Graph::random_gnp(15, 0.4, 8);
    const SparseSym L = g.laplacian();
    const Factor Y = oracles::random_factor(rng, 15, 4);
    double prev = -1.0;
    for (int trials : {1, 2, 5, 10, 40}) {
        const CutSolution cut = round_maxcut(Y, L, trials, 99);  // same seed stream
        EXPECT_GE(cut.value, prev);
        prev = cut.value;
    }
}

TEST(RoundMaxcut, GoemansWilliamsonExpectationOnK3) {
    // mean cut over many single trials compared against 0.878 x SDP value
    const SparseSym L = Graph::complete(3).laplacian();
    const Factor Y = optimal_k3_factor();
    double total = 0.0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i)
        total += round_maxcut(Y, L, 1, static_cast<std::uint64_t>(i)).value;
    const double mean = total / trials;
    EXPECT_GE(mean, 0.878 * 2.25 - 0.05);
}

TEST(RoundBisection, DisjointEdgesSplitAlongComponents) {
    const Graph g = Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    SolverConfig cfg;
    cfg.seed = 5;
    const SolveResult res = solve(build_minbisection(g), cfg);
    const CutSolution cut = round_bisection(res.Y, g.laplacian(), 50, 3);
    EXPECT_DOUBLE_EQ(cut.value, 0.0);
}

TEST(RoundBisection, CycleOfFour) {
    const Graph g = Graph::cycle(4);
    SolverConfig cfg;
    cfg.seed = 6;
    const SolveResult res = solve(build_minbisection(g), cfg);
    const CutSolution cut = round_bisection(res.Y, g.laplacian(), 50, 5);
    EXPECT_DOUBLE_EQ(cut.value, 2.0);  // exhaustive over the 3 bisections
    int count = 0;
    for (int i = 0; i < 4; ++i) count += cut.side[static_cast<std::size_t>(i)] ? 1 : 0;
    EXPECT_EQ(count, 2);
}

TEST(RoundBisection, K4AllBisectionsEqual) {
    std::mt19937_64 rng(29);
    const Graph g = Graph::complete(4);
    const Factor Y = oracles::random_factor(rng, 4, 3);
    const CutSolution cut = round_bisection(Y, g.laplacian(), 10, 11);
    EXPECT_DOUBLE_EQ(cut.value, 4.0);
}

TEST(RoundBisection, RepairAlwaysBalances) {
    std::mt19937_64 rng(31);
    const Graph g = Graph::random_gnp(16, 0.3, 21);
    const SparseSym L = g.laplacian();
    for (int trial = 0; trial < 10; ++trial) {
        const Factor Y = oracles::random_factor(rng, 16, 3);
        const CutSolution cut = round_bisection(Y, L, 3, rng());
        int count = 0;
        for (int i = 0; i < 16; ++i) count += cut.side[static_cast<std::size_t>(i)] ? 1 : 0;
        EXPECT_EQ(count, 8);
        EXPECT_DOUBLE_EQ(cut.value, cut_via_quadratic_form(L, cut.side));
    }
}

TEST(RoundBisection, OddSizeRejected) {
    std::mt19937_64 rng(37);
    const Factor Y = oracles::random_factor(rng, 5, 2);
    EXPECT_THROW(round_bisection(Y, Graph::cycle(5).laplacian(), 1, 0), std::invalid_argument);
}

TEST(RoundCutnorm, SingleEntry) {
    std::mt19937_64 rng(41);
    RectMatrix A{1, 1, {{0, 0, 1.0}}};
    const Factor Y = oracles::random_factor(rng, 2, 2);
    const CutNormSolution r = round_cutnorm(Y, A, 10, 2);
    EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(RoundCutnorm, AllOnesTwoByTwo) {
    std::mt19937_64 rng(43);
    RectMatrix A{2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}}};
    SolverConfig cfg;
    cfg.seed = 9;
    const SolveResult res = solve(build_cutnorm(A), cfg);
    const CutNormSolution r = round_cutnorm(res.Y, A, 100, 5);
    EXPECT_DOUBLE_EQ(r.value, 4.0);
}

TEST(RoundCutnorm, BoundedByExactAndNotFarBelow) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd A(4, 4);
        RectMatrix R{4, 4, {}};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double v = rng() % 2 == 0 ? 1.0 : -1.0;
                A(i, j) = v;
                R.entries.push_back({i, j, v});
            }
        double exact = 0.0;
        for (int s = 0; s < 16; ++s)
            for (int t = 0; t < 16; ++t) {
                double acc = 0.0;
                for (int i = 0; i < 4; ++i)
                    if (s & (1 << i))
                        for (int j = 0; j < 4; ++j)
                            if (t & (1 << j)) acc += A(i, j);
                exact = std::max(exact, std::abs(acc));
            }

        SolverConfig cfg;
        cfg.seed = rng();
        const SolveResult res = solve(build_cutnorm(R), cfg);
        const CutNormSolution r = round_cutnorm(res.Y, R, 500, rng());
        EXPECT_LE(r.value, exact + 1e-12);
        EXPECT_GE(r.value, 0.5 * exact);

        // reported value matches a recomputation from the returned subsets
        double recompute = 0.0;
        for (const auto& e : R.entries)
            if (r.row_set[static_cast<std::size_t>(e.row)] &&
                r.col_set[static_cast<std::size_t>(e.col)])
                recompute += e.value;
        EXPECT_DOUBLE_EQ(r.value, std::abs(recompute));
    }
}
