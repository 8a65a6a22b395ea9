#pragma once

#include "vesselstress/core/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace vesselstress {

/// Compressed sparse row matrix with sorted column indices in each row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> row_ptr{0};
    std::vector<std::int32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }

    /// y = A x. Rows are split into fixed contiguous ranges, so the result
    /// does not depend on the thread count.
    void multiply(std::span<const double> x, std::span<double> y, int threads = 1) const {
        parallel_ranges(rows, threads, [&](std::size_t lo, std::size_t hi, int) {
            for (std::size_t i = lo; i < hi; ++i) {
                double s = 0.0;
                for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
                y[i] = s;
            }
        });
    }

    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(rows);
        multiply(x, y);
        return y;
    }

    /// Entry (i, j), zero when outside the pattern.
    double at(std::size_t i, std::size_t j) const {
        auto b = col.begin() + row_ptr[i], e = col.begin() + row_ptr[i + 1];
        auto it = std::lower_bound(b, e, static_cast<std::int32_t>(j));
        return (it != e && *it == static_cast<std::int32_t>(j)) ? val[it - col.begin()] : 0.0;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(std::min(rows, cols), 0.0);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
        return d;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : val) m = std::max(m, std::abs(v));
        return m;
    }

    /// Infinity norm (max absolute row sum).
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += std::abs(val[k]);
            m = std::max(m, s);
        }
        return m;
    }

    bool structurally_symmetric() const {
        if (rows != cols) return false;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                const auto j = static_cast<std::size_t>(col[k]);
                auto b = col.begin() + row_ptr[j], e = col.begin() + row_ptr[j + 1];
                if (!std::binary_search(b, e, static_cast<std::int32_t>(i))) return false;
            }
        return true;
    }

    /// max |a_ij - a_ji| over the pattern.
    double symmetry_error() const {
        double m = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                m = std::max(m, std::abs(val[k] - at(static_cast<std::size_t>(col[k]), i)));
        return m;
    }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                A(static_cast<Eigen::Index>(i), col[k]) += val[k];
        return A;
    }

    static CsrMatrix from_dense(const Eigen::MatrixXd& A, double drop = 0.0) {
        CsrMatrix m;
        m.rows = static_cast<std::size_t>(A.rows());
        m.cols = static_cast<std::size_t>(A.cols());
        m.row_ptr.assign(1, 0);
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                if (std::abs(A(i, j)) > drop || i == j) {
                    m.col.push_back(static_cast<std::int32_t>(j));
                    m.val.push_back(A(i, j));
                }
            m.row_ptr.push_back(static_cast<std::int64_t>(m.val.size()));
        }
        return m;
    }

    static CsrMatrix identity(std::size_t n) {
        CsrMatrix m;
        m.rows = m.cols = n;
        m.row_ptr.resize(n + 1);
        m.col.resize(n);
        m.val.assign(n, 1.0);
        for (std::size_t i = 0; i <= n; ++i) m.row_ptr[i] = static_cast<std::int64_t>(i);
        for (std::size_t i = 0; i < n; ++i) m.col[i] = static_cast<std::int32_t>(i);
        return m;
    }
};

}  // namespace vesselstress
