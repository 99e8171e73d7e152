#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dmet/cross_metric.hpp"

namespace dmet {

// Composition of cross metrics:
//   (rho ∘ sigma)(x,y') = min over u of sigma(x,u') + 1 + rho(u,y').
// The right factor acts first; the diagonal blocks stay equal to d_X. This is
// a min-plus matrix product with a unit gap, so it is exactly associative on
// integer data, not merely up to coarse equivalence.
inline CrossMetric compose(const CrossMetric& rho, const CrossMetric& sigma, double gap = 1.0) {
    if (!same_space(rho, sigma))
        throw std::invalid_argument("compose: cross metrics live over different spaces");
    const int n = rho.size();
    SquareMatrix out(n, std::numeric_limits<double>::infinity());
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double best = std::numeric_limits<double>::infinity();
            for (int u = 0; u < n; ++u)
                best = std::min(best, sigma.cross(x, u) + gap + rho.cross(u, y));
            out(x, y) = best;
        }
    return CrossMetric{rho.space, out, std::min(rho.min_gap, sigma.min_gap)};
}

// Pseudoinverse: rho*(x,y') = rho(y,x'). Transposes the cross block.
inline CrossMetric star(const CrossMetric& rho) {
    return CrossMetric{rho.space, rho.cross.transposed(), rho.min_gap};
}

// max |(rho∘rho)(x,y') - rho(x,y') - 2|. Zero certifies the exact idempotent
// identity rho∘rho = rho + 2, which every subset metric satisfies.
inline double idempotent_defect(const CrossMetric& rho) {
    CrossMetric sq = compose(rho, rho);
    double defect = 0.0;
    const int n = rho.size();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            defect = std::max(defect, std::abs(sq.cross(x, y) - rho.cross(x, y) - 2.0));
    return defect;
}

// Exact half of the pseudoinverse law s·s*·s = s: the composition
// rho∘rho*∘rho dominates rho + 2 entrywise. The coarse upper bound is not an
// entrywise identity and is checked through the equivalence tester instead.
inline bool sandwich_check(const CrossMetric& rho) {
    CrossMetric lhs = compose(rho, compose(star(rho), rho));
    const int n = rho.size();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (definitely_greater(rho.cross(x, y) + 2.0, lhs.cross(x, y))) return false;
    return true;
}

}  // namespace dmet
