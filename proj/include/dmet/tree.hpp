#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmet/metric_space.hpp"

namespace dmet {

// A rooted tree cut off at a fixed depth, unit edge lengths, no dead ends:
// every node above the cut has at least one child, so every node lies on a
// ray. Nodes are stored in BFS order, which makes every depth-prefix of the
// node list a coherent truncation.
class RootedTreeTruncation {
public:
    // counts[k][i] = number of children of the i-th node at depth k.
    static RootedTreeTruncation from_child_counts(const std::vector<std::vector<int>>& counts) {
        RootedTreeTruncation t;
        t.depth_ = static_cast<int>(counts.size());
        t.parent_.push_back(-1);
        t.slot_.push_back(-1);
        t.node_depth_.push_back(0);
        t.level_offset_ = {0, 1};
        int level_start = 0, level_size = 1;
        for (int k = 0; k < t.depth_; ++k) {
            if (static_cast<int>(counts[k].size()) != level_size)
                throw std::invalid_argument("child counts do not match level " +
                                            std::to_string(k));
            int next_size = 0;
            for (int i = 0; i < level_size; ++i) {
                int c = counts[k][i];
                if (c < 1)
                    throw std::invalid_argument("dead end at depth " + std::to_string(k));
                if (c > 10)
                    throw std::invalid_argument("branching above 10 is not supported");
                int v = level_start + i;
                for (int s = 0; s < c; ++s) {
                    t.parent_.push_back(v);
                    t.slot_.push_back(s);
                    t.node_depth_.push_back(k + 1);
                }
                next_size += c;
            }
            level_start = static_cast<int>(t.parent_.size()) - next_size;
            level_size = next_size;
            t.level_offset_.push_back(static_cast<int>(t.parent_.size()));
        }
        t.build_children();
        return t;
    }

    static RootedTreeTruncation regular(int arity, int depth) {
        std::vector<std::vector<int>> counts(depth);
        int width = 1;
        for (int k = 0; k < depth; ++k) {
            counts[k].assign(width, arity);
            width *= arity;
        }
        return from_child_counts(counts);
    }

    static RootedTreeTruncation binary(int depth) { return regular(2, depth); }
    static RootedTreeTruncation unary_chain(int depth) { return regular(1, depth); }

    // Root with `rays` children, each continuing as a chain: a k-ray star.
    static RootedTreeTruncation star(int rays, int depth) {
        std::vector<std::vector<int>> counts(depth);
        counts[0].assign(1, rays);
        for (int k = 1; k < depth; ++k) counts[k].assign(rays, 1);
        return from_child_counts(counts);
    }

    int size() const { return static_cast<int>(parent_.size()); }
    int depth() const { return depth_; }
    int node_depth(int v) const { return node_depth_[v]; }
    int parent(int v) const { return parent_[v]; }
    int child_count(int v) const { return static_cast<int>(children_[v].size()); }
    int child(int v, int slot) const { return children_[v][slot]; }
    int nodes_to_depth(int d) const { return level_offset_[d + 1]; }

    int meet(int a, int b) const {
        while (node_depth_[a] > node_depth_[b]) a = parent_[a];
        while (node_depth_[b] > node_depth_[a]) b = parent_[b];
        while (a != b) {
            a = parent_[a];
            b = parent_[b];
        }
        return a;
    }

    double distance(int a, int b) const {
        return node_depth_[a] + node_depth_[b] - 2 * node_depth_[meet(a, b)];
    }

    std::vector<int> word_of(int v) const {
        std::vector<int> w(node_depth_[v]);
        for (int i = node_depth_[v] - 1; i >= 0; --i) {
            w[i] = slot_[v];
            v = parent_[v];
        }
        return w;
    }

    // -1 when the word leaves the tree
    int node_at(const std::vector<int>& word) const {
        int v = 0;
        for (int s : word) {
            if (s < 0 || s >= child_count(v)) return -1;
            v = children_[v][s];
        }
        return v;
    }

    std::string label(int v) const { return word_to_string(word_of(v)); }

    static std::string word_to_string(const std::vector<int>& w) {
        std::string s;
        for (int c : w) s += static_cast<char>('0' + c);
        return s;
    }

    static std::vector<int> word_from_string(const std::string& s) {
        std::vector<int> w;
        for (char c : s) {
            if (c < '0' || c > '9') throw std::invalid_argument("bad word character");
            w.push_back(c - '0');
        }
        return w;
    }

    SpacePtr as_metric_space() const {
        const int n = size();
        SquareMatrix d(n);
        std::vector<std::string> ids(n);
        for (int a = 0; a < n; ++a) {
            ids[a] = label(a);
            for (int b = 0; b < n; ++b) d(a, b) = distance(a, b);
        }
        return make_space(d, 0, std::move(ids));
    }

private:
    void build_children() {
        children_.assign(size(), {});
        for (int v = 1; v < size(); ++v) children_[parent_[v]].push_back(v);
    }

    int depth_ = 0;
    std::vector<int> parent_, slot_, node_depth_, level_offset_;
    std::vector<std::vector<int>> children_;
};

// A truncated ray: the root-to-cut path, named by its word.
struct BoundaryPoint {
    std::vector<int> word;

    friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
    friend auto operator<=>(const BoundaryPoint& a, const BoundaryPoint& b) {
        return a.word <=> b.word;
    }
};

inline std::vector<BoundaryPoint> all_boundary_words(const RootedTreeTruncation& t) {
    std::vector<BoundaryPoint> out;
    std::vector<int> word;
    auto rec = [&](auto&& self, int v) -> void {
        if (t.node_depth(v) == t.depth()) {
            out.push_back({word});
            return;
        }
        for (int s = 0; s < t.child_count(v); ++s) {
            word.push_back(s);
            self(self, t.child(v, s));
            word.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

inline int common_prefix_length(const std::vector<int>& a, const std::vector<int>& b) {
    int k = 0;
    while (k < static_cast<int>(a.size()) && k < static_cast<int>(b.size()) && a[k] == b[k]) ++k;
    return k;
}

// d(lambda, mu) = e^{-|common prefix|}; identical truncated words collapse to
// the sentinel e^{-N}, an upper bound at this resolution.
inline double boundary_distance(const RootedTreeTruncation& t, const BoundaryPoint& a,
                                const BoundaryPoint& b) {
    if (static_cast<int>(a.word.size()) != t.depth() ||
        static_cast<int>(b.word.size()) != t.depth())
        throw std::invalid_argument("boundary points must be full-depth words");
    if (t.node_at(a.word) < 0 || t.node_at(b.word) < 0)
        throw std::invalid_argument("boundary word does not belong to this tree");
    return std::exp(-static_cast<double>(common_prefix_length(a.word, b.word)));
}

}  // namespace dmet
