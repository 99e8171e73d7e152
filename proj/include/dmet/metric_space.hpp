#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmet/matrix.hpp"

namespace dmet {

// All shipped fixtures use integer or dyadic values, so the algebraic
// identities downstream hold as exact double equalities. User data may be
// arbitrary floats; validators then compare with this relative slack.
inline constexpr double kRelTolerance = 1e-9;

inline double tol_for(double a, double b) {
    double m = std::abs(a) > std::abs(b) ? std::abs(a) : std::abs(b);
    return kRelTolerance * (m > 1.0 ? m : 1.0);
}

// a > b beyond tolerance
inline bool definitely_greater(double a, double b) { return a > b + tol_for(a, b); }

struct Violation {
    std::string rule;           // which axiom failed
    std::array<int, 3> where;   // witnessing point indices, -1 when unused
    double lhs = 0.0;           // offending value
    double rhs = 0.0;           // bound it had to respect
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }

    std::string summary() const {
        std::ostringstream os;
        for (const auto& v : violations) {
            os << v.rule << " at (";
            bool first = true;
            for (int w : v.where) {
                if (w < 0) continue;
                if (!first) os << ",";
                os << w;
                first = false;
            }
            os << "): " << v.detail << "\n";
        }
        return os.str();
    }
};

// Validation result: either a value or the report saying why not.
template <class T>
struct Checked {
    std::optional<T> value;
    ValidationReport report;

    bool ok() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    const T* operator->() const { return &*value; }
};

// A finite pointed metric space given by its distance matrix.
struct FiniteMetricSpace {
    std::vector<std::string> point_ids;
    SquareMatrix dist;
    int basepoint = 0;

    int size() const { return dist.size(); }
    double d(int i, int j) const { return dist(i, j); }

    int index_of(const std::string& id) const {
        for (int i = 0; i < static_cast<int>(point_ids.size()); ++i)
            if (point_ids[i] == id) return i;
        return -1;
    }

    friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

inline std::vector<std::string> default_labels(int n) {
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return ids;
}

// Checks every metric axiom and reports each violation with a witnessing
// index triple. Idempotent: re-validating an accepted matrix accepts.
inline Checked<FiniteMetricSpace> validate_space(const SquareMatrix& dist, int basepoint = 0,
                                                 std::vector<std::string> point_ids = {}) {
    Checked<FiniteMetricSpace> out;
    const int n = dist.size();
    if (n == 0) {
        out.report.violations.push_back({"empty", {-1, -1, -1}, 0, 0, "matrix has no points"});
        return out;
    }
    if (basepoint < 0 || basepoint >= n) {
        out.report.violations.push_back(
            {"basepoint", {basepoint, -1, -1}, 0, 0, "basepoint index out of range"});
        return out;
    }
    if (point_ids.empty()) point_ids = default_labels(n);

    auto& bad = out.report.violations;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(dist(i, j))) {
                bad.push_back({"finite", {i, j, -1}, dist(i, j), 0.0,
                               "distances must be finite numbers"});
                return out;
            }
    for (int i = 0; i < n; ++i) {
        if (dist(i, i) != 0.0)
            bad.push_back({"diagonal", {i, -1, -1}, dist(i, i), 0.0, "dist(i,i) must be 0"});
        for (int j = i + 1; j < n; ++j) {
            if (dist(i, j) != dist(j, i))
                bad.push_back({"symmetry", {i, j, -1}, dist(i, j), dist(j, i),
                               "dist(i,j) != dist(j,i)"});
            if (dist(i, j) <= 0.0)
                bad.push_back({"positivity", {i, j, -1}, dist(i, j), 0.0,
                               "dist(i,j) must be > 0 for distinct points"});
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (definitely_greater(dist(i, k), dist(i, j) + dist(j, k))) {
                    std::ostringstream os;
                    os << "dist(" << i << "," << k << ")=" << dist(i, k) << " > "
                       << dist(i, j) + dist(j, k) << " via " << j;
                    bad.push_back({"triangle", {i, j, k}, dist(i, k), dist(i, j) + dist(j, k),
                                   os.str()});
                }

    if (!bad.empty()) return out;
    out.value = FiniteMetricSpace{std::move(point_ids), dist, basepoint};
    return out;
}

inline SpacePtr make_space(const SquareMatrix& dist, int basepoint = 0,
                           std::vector<std::string> point_ids = {}) {
    auto checked = validate_space(dist, basepoint, std::move(point_ids));
    if (!checked.ok())
        throw std::invalid_argument("invalid metric space:\n" + checked.report.summary());
    return std::make_shared<const FiniteMetricSpace>(std::move(*checked.value));
}

// Points 0..n-1 on the integer line, unit spacing.
inline SpacePtr make_line_space(int n, int basepoint = 0) {
    SquareMatrix d(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = std::abs(i - j);
    return make_space(d, basepoint);
}

// Finite subset of the half-line with the induced metric; labels carry the
// coordinates. `coords` must be sorted and start at the basepoint coordinate.
inline SpacePtr make_sampled_line_space(const std::vector<double>& coords, int basepoint = 0) {
    const int n = static_cast<int>(coords.size());
    SquareMatrix d(n);
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) {
        std::ostringstream os;
        os << coords[i];
        ids[i] = os.str();
        for (int j = 0; j < n; ++j) d(i, j) = std::abs(coords[i] - coords[j]);
    }
    return make_space(d, basepoint, std::move(ids));
}

}  // namespace dmet
