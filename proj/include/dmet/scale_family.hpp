#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "dmet/cross_metric.hpp"

namespace dmet {

// One truncation stage: a finite space, the cross block over it, and the
// injection of this stage's points into the next stage (empty for the last).
struct ScaleStage {
    CrossMetric cross;
    std::vector<int> inclusion;

    const FiniteMetricSpace& space() const { return *cross.space; }
};

// A coherent increasing sequence of truncations, the desk-scale stand-in for
// a coarse equivalence class [rho] on an infinite space. Coherence is exact:
// restricting a later stage along the inclusions reproduces earlier stages
// bit for bit.
struct ScaleFamily {
    std::vector<double> scales;
    std::vector<ScaleStage> stages;

    int stage_count() const { return static_cast<int>(stages.size()); }
    const ScaleStage& last() const { return stages.back(); }
};

inline ValidationReport validate_family(const ScaleFamily& fam) {
    ValidationReport report;
    auto& bad = report.violations;
    if (fam.scales.size() != fam.stages.size())
        bad.push_back({"shape", {-1, -1, -1}, static_cast<double>(fam.scales.size()),
                       static_cast<double>(fam.stages.size()),
                       "scales and stages must have the same length"});
    if (!fam.scales.empty() && fam.scales.front() <= 0.0)
        bad.push_back({"scales_positive", {0, -1, -1}, fam.scales.front(), 0.0,
                       "scales must be positive"});
    for (size_t t = 0; t + 1 < fam.scales.size(); ++t)
        if (!(fam.scales[t] < fam.scales[t + 1]))
            bad.push_back({"scales_increasing", {static_cast<int>(t), -1, -1}, fam.scales[t],
                           fam.scales[t + 1], "scales must strictly increase"});

    for (size_t t = 0; t + 1 < fam.stages.size(); ++t) {
        const auto& cur = fam.stages[t];
        const auto& nxt = fam.stages[t + 1];
        const int n = cur.space().size();
        if (static_cast<int>(cur.inclusion.size()) != n) {
            bad.push_back({"inclusion_shape", {static_cast<int>(t), -1, -1},
                           static_cast<double>(cur.inclusion.size()), static_cast<double>(n),
                           "inclusion must map every stage point"});
            continue;
        }
        for (int i = 0; i < n; ++i) {
            int ii = cur.inclusion[i];
            if (ii < 0 || ii >= nxt.space().size()) {
                bad.push_back({"inclusion_range", {static_cast<int>(t), i, -1},
                               static_cast<double>(ii), static_cast<double>(nxt.space().size()),
                               "inclusion image out of range"});
                continue;
            }
            for (int j = 0; j < n; ++j) {
                int jj = cur.inclusion[j];
                if (jj < 0 || jj >= nxt.space().size()) continue;
                if (cur.space().d(i, j) != nxt.space().d(ii, jj))
                    bad.push_back({"dist_coherence", {static_cast<int>(t), i, j},
                                   cur.space().d(i, j), nxt.space().d(ii, jj),
                                   "restricted distance differs from earlier stage"});
                if (cur.cross.cross(i, j) != nxt.cross.cross(ii, jj))
                    bad.push_back({"cross_coherence", {static_cast<int>(t), i, j},
                                   cur.cross.cross(i, j), nxt.cross.cross(ii, jj),
                                   "restricted cross value differs from earlier stage"});
            }
        }
        if (cur.inclusion[cur.space().basepoint] != nxt.space().basepoint)
            bad.push_back({"basepoint_coherence", {static_cast<int>(t), -1, -1},
                           static_cast<double>(cur.inclusion[cur.space().basepoint]),
                           static_cast<double>(nxt.space().basepoint),
                           "basepoints must correspond under inclusions"});
    }
    return report;
}

// Builds a family by restricting one computed instance along nested index
// sets. Coherence then holds by construction, which is the only way we ever
// manufacture families internally.
inline ScaleFamily truncate_family(const CrossMetric& full,
                                   const std::vector<std::vector<int>>& stage_indices,
                                   std::vector<double> scales) {
    if (stage_indices.size() != scales.size())
        throw std::invalid_argument("truncate_family: one index set per scale required");
    ScaleFamily fam;
    fam.scales = std::move(scales);
    for (size_t t = 0; t < stage_indices.size(); ++t) {
        const auto& idx = stage_indices[t];
        const int m = static_cast<int>(idx.size());
        SquareMatrix d(m), c(m);
        std::vector<std::string> ids(m);
        int base = -1;
        for (int i = 0; i < m; ++i) {
            ids[i] = full.space->point_ids[idx[i]];
            if (idx[i] == full.space->basepoint) base = i;
            for (int j = 0; j < m; ++j) {
                d(i, j) = full.space->d(idx[i], idx[j]);
                c(i, j) = full.cross(idx[i], idx[j]);
            }
        }
        if (base < 0)
            throw std::invalid_argument("truncate_family: every stage must contain the basepoint");
        auto space = make_space(d, base, std::move(ids));
        ScaleStage stage{CrossMetric{space, c, full.min_gap}, {}};
        if (t > 0) {
            const auto& prev = stage_indices[t - 1];
            auto& inc = fam.stages.back().inclusion;
            inc.resize(prev.size());
            for (size_t i = 0; i < prev.size(); ++i) {
                auto it = std::find(idx.begin(), idx.end(), prev[i]);
                if (it == idx.end())
                    throw std::invalid_argument("truncate_family: stage index sets must be nested");
                inc[i] = static_cast<int>(it - idx.begin());
            }
        }
        fam.stages.push_back(std::move(stage));
    }
    return fam;
}

// True when both families run over the same point sets with the same
// inclusions, which is the precondition for comparing their metrics.
inline bool same_skeleton(const ScaleFamily& a, const ScaleFamily& b) {
    if (a.stage_count() != b.stage_count()) return false;
    for (int t = 0; t < a.stage_count(); ++t) {
        if (a.stages[t].space().point_ids != b.stages[t].space().point_ids) return false;
        if (a.stages[t].inclusion != b.stages[t].inclusion) return false;
        if (a.stages[t].space().dist != b.stages[t].space().dist) return false;
    }
    return true;
}

}  // namespace dmet
