#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmet/config.hpp"
#include "dmet/graph.hpp"
#include "dmet/partial_bijection.hpp"
#include "dmet/prefix_map.hpp"
#include "dmet/ray_analysis.hpp"
#include "dmet/semigroup_ops.hpp"
#include "dmet/tree.hpp"

namespace dmet {

struct TreeCrossMetric {
    CrossMetric cross;
    PrefixMap provenance;
};

// Builds the cross metric of a boundary map as the intrinsic metric of the
// doubled tree: two copies, a basepoint gluing edge, and one edge of length
// 2C_i from every node z of a domain subtree to the depth-matched transport
// of z. Shortest paths give the cross block; the diagonal blocks must come
// out untouched or the map's constants were inconsistent and we refuse.
inline TreeCrossMetric chi_tree(const RootedTreeTruncation& tree, const PrefixMap& map,
                                const AnalysisConfig& config = {}) {
    auto report = validate_prefix_map(tree, map);
    if (!report.ok())
        throw std::invalid_argument("chi_tree: invalid prefix map:\n" + report.summary());

    const int n = tree.size();
    WeightedGraph g(2 * n);
    for (int v = 1; v < n; ++v) {
        g.add_edge(v, tree.parent(v), 1.0);
        g.add_edge(n + v, n + tree.parent(v), 1.0);
    }
    g.add_edge(0, n, config.glue_length);  // stratum-0 term, E_0 = {x_0}
    for (const auto& p : map.pairs) {
        int top = tree.node_at(p.u);
        // every node of the domain subtree, found by filtering on words
        for (int z = top; z < n; ++z)
            if (detail::is_prefix(p.u, tree.word_of(z)))
                g.add_edge(z, n + transport_node(tree, p, z), 2.0 * p.C);
    }

    SquareMatrix all = g.all_pairs();
    SquareMatrix cross(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double da = tree.distance(a, b);
            if (definitely_greater(da, all(a, b)) || definitely_greater(da, all(n + a, n + b)))
                throw std::invalid_argument(
                    "chi_tree: gluing shortcuts the tree metric; stratum constants are too "
                    "small for this map");
            cross(a, b) = all(a, n + b);
        }

    auto space = tree.as_metric_space();
    auto checked = validate_cross(space, cross, std::min(1.0, config.glue_length));
    if (!checked.ok())
        throw std::invalid_argument("chi_tree: result fails cross validation:\n" +
                                    checked.report.summary());
    return TreeCrossMetric{std::move(*checked.value), map};
}

// The scale family of depth truncations of a cross metric over the doubled
// tree, with every full-depth word as a ray. BFS node order makes each
// truncation a prefix of the node list, so stage indices equal global ones.
struct TreeBoundaryAnalysis {
    ScaleFamily fam;
    RayFamily rays;
    std::vector<BoundaryPoint> words;
};

inline TreeBoundaryAnalysis analyze_tree_cross(const RootedTreeTruncation& tree,
                                               const CrossMetric& cross,
                                               std::vector<int> stage_depths) {
    if (stage_depths.empty() || stage_depths.back() != tree.depth())
        throw std::invalid_argument("stage depths must end at the truncation depth");
    TreeBoundaryAnalysis out;
    std::vector<std::vector<int>> sets;
    std::vector<double> scales;
    for (int d : stage_depths) {
        std::vector<int> idx(tree.nodes_to_depth(d));
        for (int i = 0; i < static_cast<int>(idx.size()); ++i) idx[i] = i;
        sets.push_back(std::move(idx));
        scales.push_back(d);
    }
    out.fam = truncate_family(cross, sets, scales);
    out.words = all_boundary_words(tree);
    for (const auto& w : out.words) {
        RayDescriptor ray;
        ray.id = RootedTreeTruncation::word_to_string(w.word);
        for (int d : stage_depths) {
            std::vector<RaySample> samples;
            int v = 0;
            samples.push_back({0, 0.0});
            for (int k = 0; k < d; ++k) {
                v = tree.child(v, w.word[k]);
                samples.push_back({v, static_cast<double>(k + 1)});
            }
            ray.per_stage.push_back(std::move(samples));
        }
        out.rays.rays.push_back(std::move(ray));
    }
    return out;
}

// A recovered boundary map: per surviving ray, the matched target ray and
// the sup of depth-matched cross values over the tail window.
struct RecoveredBoundaryMap {
    struct Pair {
        BoundaryPoint source, target;
        double bound = 0.0;
    };

    std::vector<Pair> pairs;  // sorted by source word
    RayStrata ray_strata;
    bool injective = true;

    std::vector<std::pair<BoundaryPoint, BoundaryPoint>> as_action() const {
        std::vector<std::pair<BoundaryPoint, BoundaryPoint>> a;
        for (const auto& p : pairs) a.emplace_back(p.source, p.target);
        return a;
    }
};

// Recovery: rays with a finite gluing bound are matched to the full-depth
// word minimizing the depth-matched tail sup of cross values; ties break to
// the lexicographically smallest target.
inline RecoveredBoundaryMap psi_tree(const RootedTreeTruncation& tree, const CrossMetric& cross,
                                     std::vector<int> stage_depths,
                                     const AnalysisConfig& config = {}) {
    auto analysis = analyze_tree_cross(tree, cross, std::move(stage_depths));
    RecoveredBoundaryMap out;
    out.ray_strata = strata(analysis.fam, analysis.rays, config);

    const int depth = tree.depth();
    const int lo = static_cast<int>(config.tail_window_fraction * depth);
    // depth-indexed node paths for all candidate words
    std::vector<std::vector<int>> paths(analysis.words.size());
    for (size_t i = 0; i < analysis.words.size(); ++i) {
        std::vector<int> path{0};
        int v = 0;
        for (int k = 0; k < depth; ++k) {
            v = tree.child(v, analysis.words[i].word[k]);
            path.push_back(v);
        }
        paths[i] = std::move(path);
    }

    for (size_t r = 0; r < analysis.words.size(); ++r) {
        if (out.ray_strata.estimates[r].verdict != RayVerdict::Finite) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_t = -1;
        for (size_t t = 0; t < analysis.words.size(); ++t) {
            double sup = 0.0;
            for (int k = lo; k <= depth; ++k)
                sup = std::max(sup, cross.cross(paths[r][k], paths[t][k]));
            if (sup < best) {
                best = sup;
                best_t = static_cast<int>(t);
            }
        }
        if (best_t < 0 || best > out.ray_strata.divergence_bound_used) continue;
        out.pairs.push_back({analysis.words[r], analysis.words[best_t], best});
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const auto& a, const auto& b) { return a.source < b.source; });
    for (size_t i = 0; i < out.pairs.size(); ++i)
        for (size_t j = i + 1; j < out.pairs.size(); ++j)
            if (out.pairs[i].target == out.pairs[j].target) out.injective = false;
    return out;
}

// The meet-depth inequality behind the bi-Lipschitz ratio bound: recovered
// pairs with bound C must satisfy |M - L| < C, with a one-unit boundary band
// reported rather than failed.
enum class RatioStatus { Within, Boundary, Violation };

struct RatioReport {
    int source_meet = 0, target_meet = 0;
    double ratio = 1.0;  // d(t1,t2) / d(r1,r2) on the boundary
    RatioStatus status = RatioStatus::Within;
};

inline RatioReport rays_lemma_check(const RootedTreeTruncation& tree, const BoundaryPoint& r1,
                                    const BoundaryPoint& t1, const BoundaryPoint& r2,
                                    const BoundaryPoint& t2, double c) {
    RatioReport rep;
    rep.source_meet = common_prefix_length(r1.word, r2.word);
    rep.target_meet = common_prefix_length(t1.word, t2.word);
    rep.ratio = boundary_distance(tree, t1, t2) / boundary_distance(tree, r1, r2);
    double gap = std::abs(rep.target_meet - rep.source_meet);
    rep.status = gap < c              ? RatioStatus::Within
                 : gap < c + 1.0      ? RatioStatus::Boundary
                                      : RatioStatus::Violation;
    return rep;
}

// Realizability survey for trees whose boundary rays are the root branches
// (chains below depth one): every partial bijection of the branch set is
// built as a prefix map, pushed through chi and recovered through psi.
struct RealizabilityReport {
    int boundary_rays = 0;
    int attempted = 0;
    int recovered_exactly = 0;
    bool matches_partial_bijection_count = false;
};

inline RealizabilityReport survey_boundary_maps(const RootedTreeTruncation& tree,
                                                const std::vector<int>& stage_depths,
                                                const AnalysisConfig& config = {}) {
    const auto words = all_boundary_words(tree);
    const int k = static_cast<int>(words.size());
    if (k != tree.child_count(0))
        throw std::invalid_argument(
            "survey_boundary_maps: boundary rays must be exactly the root branches");

    RealizabilityReport rep;
    rep.boundary_rays = k;
    for (const auto& pb : all_partial_bijections(k)) {
        PrefixMap map;
        for (int i = 0; i < k; ++i)
            if (pb.defined_at(i)) map.pairs.push_back(PrefixPair{{i}, {pb.apply(i)}, 1.0});
        auto glued = chi_tree(tree, map, config);
        auto recovered = psi_tree(tree, glued.cross, stage_depths, config);
        ++rep.attempted;
        if (recovered.as_action() == boundary_action(tree, map)) ++rep.recovered_exactly;
    }
    rep.matches_partial_bijection_count =
        rep.attempted == rep.recovered_exactly;
    return rep;
}

}  // namespace dmet
