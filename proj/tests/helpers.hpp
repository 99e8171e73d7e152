#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here recomputes expectations from first principles (exhaustion, direct
// formulas) so the library is never checked against itself.

#include <limits>
#include <random>
#include <set>
#include <vector>

#include "dmet/cross_metric.hpp"
#include "dmet/graph.hpp"
#include "dmet/semigroup_ops.hpp"

namespace dmet::testing {

using Rng = std::mt19937_64;

inline int rand_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Shortest-path metric of a random connected graph with integer weights:
// always a genuine metric, always integer-valued.
inline SpacePtr random_space(Rng& rng, int max_points = 6) {
    const int n = rand_int(rng, 1, max_points);
    WeightedGraph g(n);
    for (int i = 1; i < n; ++i) g.add_edge(i, rand_int(rng, 0, i - 1), rand_int(rng, 1, 9));
    int extra = rand_int(rng, 0, n);
    for (int e = 0; e < extra; ++e) {
        int a = rand_int(rng, 0, n - 1), b = rand_int(rng, 0, n - 1);
        if (a != b) g.add_edge(a, b, rand_int(rng, 1, 9));
    }
    return make_space(g.all_pairs(), 0);
}

inline SubsetSpec random_subset(Rng& rng, int n) {
    SubsetSpec a;
    for (int i = 0; i < n; ++i)
        if (rand_int(rng, 0, 1)) a.indices.push_back(i);
    if (a.indices.empty()) a.indices.push_back(rand_int(rng, 0, n - 1));
    return a;
}

inline double diameter(const FiniteMetricSpace& s) {
    double d = 0.0;
    for (int i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.size(); ++j) d = std::max(d, s.d(i, j));
    return d;
}

// Random compatible cross metric: glue the two copies along random anchor
// pairs with random integer weights and take the doubled-graph metric.
// Rejection keeps only gluings that leave the diagonal blocks untouched.
inline CrossMetric random_glued_cross(Rng& rng, const SpacePtr& space) {
    const int n = space->size();
    const int diam = static_cast<int>(diameter(*space));
    for (int attempt = 0; attempt < 64; ++attempt) {
        WeightedGraph g(2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                g.add_edge(i, j, space->d(i, j));
                g.add_edge(n + i, n + j, space->d(i, j));
            }
        const int anchors = rand_int(rng, 1, 3);
        for (int k = 0; k < anchors; ++k)
            g.add_edge(rand_int(rng, 0, n - 1), n + rand_int(rng, 0, n - 1),
                       rand_int(rng, 1, diam + 3));
        SquareMatrix all = g.all_pairs();
        bool diag_ok = true;
        for (int i = 0; i < n && diag_ok; ++i)
            for (int j = 0; j < n && diag_ok; ++j)
                diag_ok = all(i, j) == space->d(i, j) && all(n + i, n + j) == space->d(i, j);
        if (!diag_ok) continue;
        SquareMatrix cross(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cross(i, j) = all(i, n + j);
        auto checked = validate_cross(space, cross, 1.0);
        if (checked.ok()) return *checked.value;
    }
    // always valid fallback
    return subset_metric(space, random_subset(rng, n));
}

// Mixes gluings, subset metrics and algebraic combinations for variety.
inline CrossMetric random_cross(Rng& rng, const SpacePtr& space) {
    switch (rand_int(rng, 0, 4)) {
        case 0: return subset_metric(space, random_subset(rng, space->size()));
        case 1: return star(random_glued_cross(rng, space));
        case 2: return compose(random_glued_cross(rng, space), random_glued_cross(rng, space));
        default: return random_glued_cross(rng, space);
    }
}

// Direct two-step min-plus evaluation used as the associativity oracle:
// min over u,v of tau(x,u') + 1 + sigma(u,v') + 1 + rho(v,y').
inline SquareMatrix naive_double_compose(const CrossMetric& rho, const CrossMetric& sigma,
                                         const CrossMetric& tau) {
    const int n = rho.size();
    SquareMatrix out(n, std::numeric_limits<double>::infinity());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    out(x, y) = std::min(out(x, y), tau.cross(x, u) + 1.0 + sigma.cross(u, v) +
                                                        1.0 + rho.cross(v, y));
    return out;
}

inline double naive_hausdorff(const FiniteMetricSpace& s, const std::vector<int>& a,
                              const std::vector<int>& b) {
    double h = 0.0;
    for (int p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (int q : b) best = std::min(best, s.d(p, q));
        h = std::max(h, best);
    }
    for (int q : b) {
        double best = std::numeric_limits<double>::infinity();
        for (int p : a) best = std::min(best, s.d(p, q));
        h = std::max(h, best);
    }
    return h;
}

}  // namespace dmet::testing
