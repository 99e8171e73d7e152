#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmet/metric_space.hpp"

namespace dmet {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double euclidean_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double angle_between(const Vec& a, const Vec& b) {
    double c = dot(a, b) / (norm(a) * norm(b));
    c = std::max(-1.0, std::min(1.0, c));
    return std::acos(c);
}

// Finite polar truncation of R^n (n = 2 or 3): a set of unit directions, a
// set of radii, all their products plus the origin, with exact Euclidean
// distances. Points are ordered origin first, then radius-major, so every
// radius prefix of the point list is a coherent truncation.
struct PolarGrid {
    int dim = 2;
    std::vector<Vec> directions;
    std::vector<double> radii;
    SpacePtr space;

    int direction_count() const { return static_cast<int>(directions.size()); }
    int radius_count() const { return static_cast<int>(radii.size()); }

    int point_index(int dir, int radius_idx) const {
        return 1 + radius_idx * direction_count() + dir;
    }

    Vec coords(int point) const {
        if (point == 0) return Vec(dim, 0.0);
        int radius_idx = (point - 1) / direction_count();
        int dir = (point - 1) % direction_count();
        Vec v = directions[dir];
        for (double& x : v) x *= radii[radius_idx];
        return v;
    }

    // -1 when no grid direction is within tol of v
    int closest_direction(const Vec& v, double tol) const {
        int best = -1;
        double best_d = tol;
        for (int d = 0; d < direction_count(); ++d) {
            double dist = euclidean_distance(directions[d], v);
            if (dist <= best_d) {
                best_d = dist;
                best = d;
            }
        }
        return best;
    }
};

inline PolarGrid make_polar_grid(int dim, std::vector<Vec> directions, std::vector<double> radii) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("polar grids support dimensions 2 and 3 only");
    for (auto& d : directions) {
        if (static_cast<int>(d.size()) != dim)
            throw std::invalid_argument("direction dimension mismatch");
        double n = norm(d);
        if (std::abs(n - 1.0) > 1e-12) {
            if (n == 0.0) throw std::invalid_argument("zero direction vector");
            for (double& x : d) x /= n;
        }
    }
    if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
        throw std::invalid_argument("radii must be positive and increasing");

    PolarGrid g;
    g.dim = dim;
    g.directions = std::move(directions);
    g.radii = std::move(radii);

    const int n = 1 + g.direction_count() * g.radius_count();
    SquareMatrix dist(n);
    std::vector<std::string> ids(n);
    ids[0] = "o";
    for (int p = 1; p < n; ++p) {
        int ri = (p - 1) / g.direction_count();
        int di = (p - 1) % g.direction_count();
        std::ostringstream os;
        os << "d" << di << "@r" << g.radii[ri];
        ids[p] = os.str();
    }
    for (int p = 0; p < n; ++p) {
        Vec cp = p == 0 ? Vec(dim, 0.0) : g.coords(p);
        for (int q = 0; q < n; ++q) {
            Vec cq = q == 0 ? Vec(dim, 0.0) : g.coords(q);
            dist(p, q) = euclidean_distance(cp, cq);
        }
    }
    g.space = make_space(dist, 0, std::move(ids));
    return g;
}

// Planar grid from direction angles in radians.
inline PolarGrid make_planar_grid(const std::vector<double>& angles, std::vector<double> radii) {
    std::vector<Vec> dirs;
    for (double a : angles) dirs.push_back({std::cos(a), std::sin(a)});
    return make_polar_grid(2, std::move(dirs), std::move(radii));
}

inline std::vector<double> uniform_angles(int count, double offset = 0.0) {
    std::vector<double> a(count);
    for (int i = 0; i < count; ++i) a[i] = offset + 2.0 * M_PI * i / count;
    return a;
}

}  // namespace dmet
