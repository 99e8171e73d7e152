#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dmet/tree.hpp"

namespace dmet {

// One stratum of a boundary map: rays through u are rewritten to rays
// through v, and the induced map on that cylinder is e^C bi-Lipschitz.
struct PrefixPair {
    std::vector<int> u, v;
    double C = 1.0;
};

// A finite description of a partial bijective locally bi-Lipschitz boundary
// map: disjoint domain cylinders, disjoint codomain cylinders, suffixes
// carried over unchanged. This is exactly the finitely-describable core of
// such maps; constants per pair are the stratum data.
struct PrefixMap {
    std::vector<PrefixPair> pairs;

    bool empty() const { return pairs.empty(); }
};

// Every cross edge must be at least as long as the cross-metric gap, hence
// the floor on stratum constants.
inline constexpr double kMinStratumConstant = 0.5;

namespace detail {

inline bool is_prefix(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

// Ordered-shape agreement of the subtrees below a and b down to `levels`.
inline bool shapes_agree(const RootedTreeTruncation& t, int a, int b, int levels) {
    if (levels <= 0) return true;
    if (t.child_count(a) != t.child_count(b)) return false;
    for (int s = 0; s < t.child_count(a); ++s)
        if (!shapes_agree(t, t.child(a, s), t.child(b, s), levels - 1)) return false;
    return true;
}

}  // namespace detail

inline ValidationReport validate_prefix_map(const RootedTreeTruncation& tree,
                                            const PrefixMap& map) {
    ValidationReport report;
    auto& bad = report.violations;
    const int n = static_cast<int>(map.pairs.size());
    for (int i = 0; i < n; ++i) {
        const auto& p = map.pairs[i];
        if (static_cast<int>(p.u.size()) >= tree.depth() ||
            static_cast<int>(p.v.size()) >= tree.depth()) {
            bad.push_back({"prefix_depth", {i, -1, -1},
                           static_cast<double>(std::max(p.u.size(), p.v.size())),
                           static_cast<double>(tree.depth()),
                           "prefix length must stay below the truncation depth"});
            continue;
        }
        int un = tree.node_at(p.u), vn = tree.node_at(p.v);
        if (un < 0 || vn < 0) {
            bad.push_back({"prefix_missing", {i, -1, -1}, 0, 0,
                           "prefix word leaves the tree"});
            continue;
        }
        double floor = std::max(kMinStratumConstant,
                                std::abs(static_cast<double>(p.u.size()) -
                                         static_cast<double>(p.v.size())));
        if (p.C < floor)
            bad.push_back({"stratum_constant", {i, -1, -1}, p.C, floor,
                           "C must dominate the depth shift and the gap floor"});
        int du = tree.depth() - static_cast<int>(p.u.size());
        int dv = tree.depth() - static_cast<int>(p.v.size());
        if (!detail::shapes_agree(tree, un, vn, std::min(du, dv)))
            bad.push_back({"subtree_shape", {i, -1, -1}, 0, 0,
                           "domain and codomain subtrees are not isomorphic"});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (detail::is_prefix(map.pairs[i].u, map.pairs[j].u) ||
                detail::is_prefix(map.pairs[j].u, map.pairs[i].u))
                bad.push_back({"domain_overlap", {i, j, -1}, 0, 0,
                               "domain cylinders must be pairwise disjoint"});
            if (detail::is_prefix(map.pairs[i].v, map.pairs[j].v) ||
                detail::is_prefix(map.pairs[j].v, map.pairs[i].v))
                bad.push_back({"codomain_overlap", {i, j, -1}, 0, 0,
                               "codomain cylinders must be pairwise disjoint"});
        }
    return report;
}

// Rewrites a ray word u·w to v·w; when the result is shorter than `len` it
// is extended along first children (the canonical ray choice), when longer
// it is truncated. Deterministic, so recovery can be compared exactly.
inline std::vector<int> transport_word(const RootedTreeTruncation& tree, const PrefixPair& p,
                                       const std::vector<int>& word, int len) {
    std::vector<int> out = p.v;
    out.insert(out.end(), word.begin() + static_cast<long>(p.u.size()), word.end());
    if (static_cast<int>(out.size()) > len) out.resize(len);
    int node = tree.node_at(out);
    while (static_cast<int>(out.size()) < len) {
        out.push_back(0);
        node = tree.child(node, 0);
    }
    return out;
}

// Depth-preserving node transport: the point at the same radius on the
// rewritten ray.
inline int transport_node(const RootedTreeTruncation& tree, const PrefixPair& p, int z) {
    auto w = transport_word(tree, p, tree.word_of(z), tree.node_depth(z));
    return tree.node_at(w);
}

// The pair whose domain cylinder contains the word, if any.
inline int stratum_of(const PrefixMap& map, const std::vector<int>& word) {
    for (int i = 0; i < static_cast<int>(map.pairs.size()); ++i)
        if (detail::is_prefix(map.pairs[i].u, word)) return i;
    return -1;
}

// The boundary action at the truncation depth: every full-depth word in a
// domain cylinder paired with its rewritten image.
inline std::vector<std::pair<BoundaryPoint, BoundaryPoint>> boundary_action(
    const RootedTreeTruncation& tree, const PrefixMap& map) {
    std::vector<std::pair<BoundaryPoint, BoundaryPoint>> out;
    for (const auto& bp : all_boundary_words(tree)) {
        int i = stratum_of(map, bp.word);
        if (i < 0) continue;
        out.emplace_back(bp, BoundaryPoint{transport_word(tree, map.pairs[i], bp.word,
                                                          tree.depth())});
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dmet
