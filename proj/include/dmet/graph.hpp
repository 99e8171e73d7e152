#pragma once

#include <limits>
#include <queue>
#include <vector>

#include "dmet/matrix.hpp"

namespace dmet {

// Undirected weighted graph on dense small vertex sets; only what the doubled
// constructions need: add edges, then take all-pairs shortest paths.
class WeightedGraph {
public:
    explicit WeightedGraph(int n) : adj_(n) {}

    int size() const { return static_cast<int>(adj_.size()); }

    void add_edge(int a, int b, double w) {
        adj_[a].push_back({b, w});
        adj_[b].push_back({a, w});
    }

    std::vector<double> dijkstra(int src) const {
        std::vector<double> dist(size(), std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[src] = 0.0;
        heap.push({0.0, src});
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > dist[v]) continue;
            for (auto [u, w] : adj_[v])
                if (d + w < dist[u]) {
                    dist[u] = d + w;
                    heap.push({dist[u], u});
                }
        }
        return dist;
    }

    SquareMatrix all_pairs() const {
        SquareMatrix m(size());
        for (int v = 0; v < size(); ++v) {
            auto row = dijkstra(v);
            for (int u = 0; u < size(); ++u) m(v, u) = row[u];
        }
        return m;
    }

private:
    struct Arc {
        int to;
        double w;
    };
    std::vector<std::vector<Arc>> adj_;
};

}  // namespace dmet
