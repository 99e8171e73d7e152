#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dmet/metric_space.hpp"

namespace dmet {

// The cross block rho(x, y') of a metric on the double X ⊔ X compatible with
// d_X. The two diagonal blocks are implicit (both equal d_X); everything the
// metric adds lives in this one matrix.
struct CrossMetric {
    SpacePtr space;
    SquareMatrix cross;       // cross(i,j) = rho(x_i, x_j')
    double min_gap = 1.0;

    int size() const { return cross.size(); }
    double rho(int i, int j) const { return cross(i, j); }

    friend bool operator==(const CrossMetric& a, const CrossMetric& b) {
        return a.cross == b.cross && a.min_gap == b.min_gap &&
               (a.space == b.space || (a.space && b.space && *a.space == *b.space));
    }
};

inline bool same_space(const CrossMetric& a, const CrossMetric& b) {
    return a.space == b.space || (a.space && b.space && *a.space == *b.space);
}

// Compatibility check: the mixed and co-triangle inequalities are exactly the
// triangle inequalities of the doubled space that involve the cross block.
inline Checked<CrossMetric> validate_cross(SpacePtr space, const SquareMatrix& cross,
                                           double min_gap = 1.0) {
    Checked<CrossMetric> out;
    auto& bad = out.report.violations;
    const int n = space ? space->size() : 0;
    if (!space || cross.size() != n) {
        bad.push_back({"shape", {-1, -1, -1}, static_cast<double>(cross.size()),
                       static_cast<double>(n), "cross block must match the space dimension"});
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(cross(i, j))) {
                bad.push_back({"finite", {i, j, -1}, cross(i, j), 0.0,
                               "cross values must be finite numbers"});
                return out;
            }
            if (definitely_greater(min_gap, cross(i, j)))
                bad.push_back({"gap", {i, j, -1}, cross(i, j), min_gap,
                               "cross value below the minimum gap"});
        }

    const auto& d = space->dist;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                // |rho(i,j') - rho(k,j')| <= d(i,k) and rho(i,j') + rho(k,j') >= d(i,k)
                if (definitely_greater(std::abs(cross(i, j) - cross(k, j)), d(i, k)))
                    bad.push_back({"mixed_triangle", {i, j, k},
                                   std::abs(cross(i, j) - cross(k, j)), d(i, k),
                                   "|rho(i,j')-rho(k,j')| exceeds dist(i,k)"});
                if (definitely_greater(d(i, k), cross(i, j) + cross(k, j)))
                    bad.push_back({"co_triangle", {i, j, k}, cross(i, j) + cross(k, j), d(i, k),
                                   "rho(i,j')+rho(k,j') below dist(i,k)"});
                // same on the primed side
                if (definitely_greater(std::abs(cross(i, j) - cross(i, k)), d(j, k)))
                    bad.push_back({"mixed_triangle_primed", {i, j, k},
                                   std::abs(cross(i, j) - cross(i, k)), d(j, k),
                                   "|rho(i,j')-rho(i,k')| exceeds dist(j,k)"});
                if (definitely_greater(d(j, k), cross(i, j) + cross(i, k)))
                    bad.push_back({"co_triangle_primed", {i, j, k}, cross(i, j) + cross(i, k),
                                   d(j, k), "rho(i,j')+rho(i,k') below dist(j,k)"});
            }

    if (!bad.empty()) return out;
    out.value = CrossMetric{std::move(space), cross, min_gap};
    return out;
}

inline CrossMetric make_cross(SpacePtr space, const SquareMatrix& cross, double min_gap = 1.0) {
    auto checked = validate_cross(std::move(space), cross, min_gap);
    if (!checked.ok())
        throw std::invalid_argument("invalid cross metric:\n" + checked.report.summary());
    return std::move(*checked.value);
}

// A subset of the points of a space, by index.
struct SubsetSpec {
    std::vector<int> indices;

    bool empty() const { return indices.empty(); }

    static SubsetSpec of_labels(const FiniteMetricSpace& space,
                                const std::vector<std::string>& labels) {
        SubsetSpec a;
        for (const auto& l : labels) {
            int i = space.index_of(l);
            if (i < 0) throw std::invalid_argument("unknown point label: " + l);
            a.indices.push_back(i);
        }
        return a;
    }
};

// rho_A(x,y') = min over a in A of d(x,a) + 1 + d(a,y): the double glued
// along A with gap 1. The fundamental family of idempotents.
inline CrossMetric subset_metric(SpacePtr space, const SubsetSpec& a, double gap = 1.0) {
    if (a.empty()) throw std::invalid_argument("subset_metric: empty subset");
    const int n = space->size();
    SquareMatrix c(n, std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k : a.indices)
                c(i, j) = std::min(c(i, j), space->d(i, k) + gap + space->d(k, j));
    return CrossMetric{std::move(space), c, gap};
}

inline double set_distance(const FiniteMetricSpace& space, int p, const SubsetSpec& a) {
    double best = std::numeric_limits<double>::infinity();
    for (int q : a.indices) best = std::min(best, space.d(p, q));
    return best;
}

inline double hausdorff_distance(const FiniteMetricSpace& space, const SubsetSpec& a,
                                 const SubsetSpec& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff_distance: empty subset");
    double h = 0.0;
    for (int p : a.indices) h = std::max(h, set_distance(space, p, b));
    for (int q : b.indices) h = std::max(h, set_distance(space, q, a));
    return h;
}

// The full (2n)x(2n) matrix [[d, rho],[rho^T, d]]. Feeding it back through
// validate_space is the canonical self-check that rho really is a metric on
// the double.
inline SquareMatrix doubled_matrix(const CrossMetric& rho) {
    const int n = rho.size();
    SquareMatrix m(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m(i, j) = rho.space->d(i, j);
            m(n + i, n + j) = rho.space->d(i, j);
            m(i, n + j) = rho.cross(i, j);
            m(n + j, i) = rho.cross(i, j);
        }
    return m;
}

inline SpacePtr doubled_space(const CrossMetric& rho) {
    const int n = rho.size();
    std::vector<std::string> ids;
    ids.reserve(2 * n);
    for (const auto& id : rho.space->point_ids) ids.push_back(id);
    for (const auto& id : rho.space->point_ids) ids.push_back(id + "'");
    return make_space(doubled_matrix(rho), rho.space->basepoint, std::move(ids));
}

}  // namespace dmet
