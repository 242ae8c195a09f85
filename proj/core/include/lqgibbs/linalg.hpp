#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lqgibbs/errors.hpp"

namespace lqg {

/// Row-major dense matrix, just large enough for the free-node systems here.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double* data() { return data_.data(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Solve A x = b by LU with partial pivoting; A is overwritten.
inline std::vector<double> lu_solve(DenseMatrix a, std::vector<double> b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n) throw NumericalError("lu_solve: shape mismatch");
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0.0) throw NumericalError("lu_solve: singular matrix");
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a(c, k), a(piv, k));
            std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(piv)]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            if (f == 0.0) continue;
            for (int k = c + 1; k < n; ++k) a(r, k) -= f * a(c, k);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int k = r + 1; k < n; ++k) s -= a(r, k) * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(r)] = s / a(r, r);
    }
    return b;
}

}  // namespace lqg
