#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "dmet/config.hpp"
#include "dmet/cross_metric.hpp"
#include "dmet/polar_grid.hpp"
#include "dmet/ray_analysis.hpp"

namespace dmet {

// An orthogonal operator restricted to a nested family of finite direction
// sets; the finite stand-in for u|_A with A an increasing union of closed
// subsets of the sphere.
struct IsometryStratum {
    int weight = 1;               // the m entering the gluing length m + 1
    std::vector<int> directions;  // the full A_m, as grid direction indices
};

struct PartialIsometry {
    std::vector<Vec> matrix;                // dim x dim rows
    std::vector<IsometryStratum> strata;    // weights increasing, sets nested

    Vec apply(const Vec& v) const {
        Vec out(matrix.size(), 0.0);
        for (size_t i = 0; i < matrix.size(); ++i) out[i] = dot(matrix[i], v);
        return out;
    }

    std::vector<int> domain() const {
        return strata.empty() ? std::vector<int>{} : strata.back().directions;
    }
};

inline ValidationReport validate_partial_isometry(const PolarGrid& grid,
                                                  const PartialIsometry& pi,
                                                  double snap_tolerance = 1e-9) {
    ValidationReport report;
    auto& bad = report.violations;
    const int d = grid.dim;
    if (static_cast<int>(pi.matrix.size()) != d) {
        bad.push_back({"matrix_shape", {-1, -1, -1}, static_cast<double>(pi.matrix.size()),
                       static_cast<double>(d), "operator must be dim x dim"});
        return report;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double g = dot(pi.matrix[i], pi.matrix[j]);
            double expect = i == j ? 1.0 : 0.0;
            if (std::abs(g - expect) > 1e-10)
                bad.push_back({"orthogonality", {i, j, -1}, g, expect,
                               "rows must be orthonormal"});
        }
    std::set<int> previous;
    int prev_weight = 0;
    for (size_t s = 0; s < pi.strata.size(); ++s) {
        const auto& st = pi.strata[s];
        if (st.weight <= prev_weight)
            bad.push_back({"stratum_weight", {static_cast<int>(s), -1, -1},
                           static_cast<double>(st.weight), static_cast<double>(prev_weight),
                           "stratum weights must strictly increase"});
        prev_weight = st.weight;
        std::set<int> cur(st.directions.begin(), st.directions.end());
        if (!std::includes(cur.begin(), cur.end(), previous.begin(), previous.end()))
            bad.push_back({"stratum_nesting", {static_cast<int>(s), -1, -1}, 0, 0,
                           "strata must be nested"});
        previous = std::move(cur);
        for (int dir : st.directions) {
            if (dir < 0 || dir >= grid.direction_count()) {
                bad.push_back({"direction_range", {static_cast<int>(s), dir, -1},
                               static_cast<double>(dir),
                               static_cast<double>(grid.direction_count()),
                               "direction index out of range"});
                continue;
            }
            if (grid.closest_direction(pi.apply(grid.directions[dir]), snap_tolerance) < 0)
                bad.push_back({"image_off_grid", {static_cast<int>(s), dir, -1}, 0,
                               snap_tolerance,
                               "image of a domain direction is not a grid direction"});
        }
    }
    return report;
}

// The gluing metric of a partial isometry:
//   cross(x,y') = min over strata m and grid points z on rays of A_m of
//                 d(x,z) + m + 1 + d(u z, y),
// together with the ever-present basepoint term d(x,0) + 1 + d(0,y).
inline CrossMetric chi_euclid(const PolarGrid& grid, const PartialIsometry& pi,
                              const AnalysisConfig& config = {}) {
    auto report = validate_partial_isometry(grid, pi, config.snap_tolerance);
    if (!report.ok())
        throw std::invalid_argument("chi_euclid: invalid partial isometry:\n" +
                                    report.summary());

    // effective weight per direction: the smallest stratum containing it
    std::vector<int> weight(grid.direction_count(), -1);
    for (auto it = pi.strata.rbegin(); it != pi.strata.rend(); ++it)
        for (int dir : it->directions) weight[dir] = it->weight;

    struct GluePoint {
        Vec z, uz;
        double w;
    };
    std::vector<GluePoint> glue;
    glue.push_back({Vec(grid.dim, 0.0), Vec(grid.dim, 0.0), 0.0});  // E_0 = {x_0}
    for (int dir = 0; dir < grid.direction_count(); ++dir) {
        if (weight[dir] < 0) continue;
        for (int ri = 0; ri < grid.radius_count(); ++ri) {
            Vec z = grid.coords(grid.point_index(dir, ri));
            glue.push_back({z, pi.apply(z), static_cast<double>(weight[dir])});
        }
    }

    const int n = grid.space->size();
    SquareMatrix cross(n);
    std::vector<Vec> pts(n);
    for (int p = 0; p < n; ++p) pts[p] = grid.coords(p);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& g : glue)
                best = std::min(best, euclidean_distance(pts[x], g.z) + g.w + 1.0 +
                                          euclidean_distance(g.uz, pts[y]));
            cross(x, y) = best;
        }
    auto checked = validate_cross(grid.space, cross, 1.0);
    if (!checked.ok())
        throw std::invalid_argument("chi_euclid: result fails cross validation:\n" +
                                    checked.report.summary());
    return std::move(*checked.value);
}

// Orthogonal Procrustes: the orthogonal operator closest to mapping each
// source direction onto its target. Reflections are admissible, so no
// determinant correction is applied.
inline std::vector<Vec> fit_orthogonal(const std::vector<std::pair<Vec, Vec>>& pairs, int dim) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& [r, t] : pairs)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) += r[i] * t[j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd u = svd.matrixV() * svd.matrixU().transpose();
    std::vector<Vec> rows(dim, Vec(dim, 0.0));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) rows[i][j] = u(i, j);
    return rows;
}

struct RecoveredIsometry {
    struct Pair {
        int source_dir = -1, target_dir = -1;
        double bound = 0.0;               // minimax cross value over the tail
        double certified_residual = 0.0;  // bound / largest matched radius
        double empirical_residual = 0.0;  // angle(u_fit . r, t)
    };

    std::vector<Pair> pairs;
    std::vector<Vec> fitted;  // orthogonal fit on the recovered pairs
    RayStrata ray_strata;
    bool conforming = true;

    std::vector<int> recovered_domain() const {
        std::vector<int> d;
        for (const auto& p : pairs) d.push_back(p.source_dir);
        return d;
    }
};

// Direction recovery from a cross metric over a doubled polar grid: per
// direction with a finite gluing bound, match the target direction by the
// minimax of radius-matched cross values, then fit the orthogonal operator.
inline RecoveredIsometry psi_euclid(const PolarGrid& grid, const CrossMetric& cross,
                                    std::vector<double> stage_radii,
                                    const AnalysisConfig& config = {}) {
    if (!(cross.space == grid.space || *cross.space == *grid.space))
        throw std::invalid_argument("psi_euclid: cross metric is not over this grid");
    if (stage_radii.empty() || stage_radii.back() != grid.radii.back())
        throw std::invalid_argument("psi_euclid: stages must end at the full radius");

    // radius-prefix truncations; point order makes these list prefixes
    std::vector<std::vector<int>> sets;
    for (double s : stage_radii) {
        int count = 0;
        while (count < grid.radius_count() && grid.radii[count] <= s) ++count;
        std::vector<int> idx(1 + count * grid.direction_count());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        sets.push_back(std::move(idx));
    }
    auto fam = truncate_family(cross, sets, stage_radii);

    RayFamily rays;
    for (int dir = 0; dir < grid.direction_count(); ++dir) {
        RayDescriptor ray;
        ray.id = "d" + std::to_string(dir);
        for (double s : stage_radii) {
            std::vector<RaySample> samples{{0, 0.0}};
            for (int ri = 0; ri < grid.radius_count() && grid.radii[ri] <= s; ++ri)
                samples.push_back({grid.point_index(dir, ri), grid.radii[ri]});
            ray.per_stage.push_back(std::move(samples));
        }
        rays.rays.push_back(std::move(ray));
    }

    RecoveredIsometry out;
    out.ray_strata = strata(fam, rays, config);

    const double r_max = grid.radii.back();
    const double lo = config.tail_window_fraction * r_max;
    std::vector<int> tail_radii;
    for (int ri = 0; ri < grid.radius_count(); ++ri)
        if (grid.radii[ri] >= lo) tail_radii.push_back(ri);

    std::vector<std::pair<Vec, Vec>> matched;
    for (int r = 0; r < grid.direction_count(); ++r) {
        if (out.ray_strata.estimates[r].verdict != RayVerdict::Finite) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_t = -1;
        for (int t = 0; t < grid.direction_count(); ++t) {
            double sup = 0.0;
            for (int ri : tail_radii)
                sup = std::max(sup, cross.cross(grid.point_index(r, ri),
                                                grid.point_index(t, ri)));
            if (sup < best) {
                best = sup;
                best_t = t;
            }
        }
        if (best_t < 0 || best > out.ray_strata.divergence_bound_used) continue;
        RecoveredIsometry::Pair p;
        p.source_dir = r;
        p.target_dir = best_t;
        p.bound = best;
        p.certified_residual = best / r_max;
        out.pairs.push_back(p);
        matched.emplace_back(grid.directions[r], grid.directions[best_t]);
    }

    out.fitted = matched.empty()
                     ? fit_orthogonal({{Vec(grid.dim, 0.0), Vec(grid.dim, 0.0)}}, grid.dim)
                     : fit_orthogonal(matched, grid.dim);
    PartialIsometry fit{out.fitted, {}};
    for (auto& p : out.pairs) {
        p.empirical_residual = angle_between(fit.apply(grid.directions[p.source_dir]),
                                             grid.directions[p.target_dir]);
        if (p.empirical_residual > config.angular_tolerance) out.conforming = false;
    }
    return out;
}

// The chord identity behind angle preservation: at radius R the chord between
// ray points is 2R sin(angle/2), so |sin(alpha/2) - sin(beta/2)| <= C/R for
// recovered pairs with gluing bound C.
struct AngleCheck {
    struct Row {
        double radius = 0.0;
        double source_chord = 0.0, image_chord = 0.0;
        double beta_estimate = 0.0;
        double lhs = 0.0, bound = 0.0;
        bool ok = true;
    };

    double alpha = 0.0;  // source angle
    std::vector<Row> rows;
    bool all_ok = true;
};

inline AngleCheck angle_preservation_check(const PolarGrid& grid, int r1, int t1, int r2, int t2,
                                           double c, const std::vector<double>& r_list) {
    AngleCheck out;
    out.alpha = angle_between(grid.directions[r1], grid.directions[r2]);
    const double sin_alpha = std::sin(out.alpha / 2.0);
    for (double radius : r_list) {
        AngleCheck::Row row;
        row.radius = radius;
        row.source_chord = radius * euclidean_distance(grid.directions[r1], grid.directions[r2]);
        row.image_chord = radius * euclidean_distance(grid.directions[t1], grid.directions[t2]);
        double sin_beta = row.image_chord / (2.0 * radius);
        row.beta_estimate = 2.0 * std::asin(std::min(1.0, sin_beta));
        row.lhs = std::abs(sin_alpha - sin_beta);
        row.bound = c / radius;
        row.ok = row.lhs <= row.bound + kRelTolerance;
        out.all_ok = out.all_ok && row.ok;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace dmet
