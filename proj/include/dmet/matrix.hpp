#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace dmet {

// Dense square matrix of scalars, row-major. Small sizes only (validation and
// min-plus kernels are O(n^3)); no linear algebra beyond element access.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, double fill = 0.0)
        : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

    static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        SquareMatrix m(static_cast<int>(rows.size()));
        for (int i = 0; i < m.n_; ++i) {
            assert(static_cast<int>(rows[i].size()) == m.n_);
            for (int j = 0; j < m.n_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    int size() const { return n_; }

    double operator()(int i, int j) const { return a_[idx(i, j)]; }
    double& operator()(int i, int j) { return a_[idx(i, j)]; }

    SquareMatrix transposed() const {
        SquareMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t idx(int i, int j) const {
        assert(i >= 0 && i < n_ && j >= 0 && j < n_);
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }

    int n_ = 0;
    std::vector<double> a_;
};

}  // namespace dmet
