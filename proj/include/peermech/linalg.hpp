#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

namespace peermech {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Exact scalars compare against zero directly; floating point gets a small
// absolute tolerance so the same kernels stay usable for quick sanity runs.
template <typename Scalar>
bool is_zero(const Scalar& x) {
    if constexpr (std::is_floating_point_v<Scalar>)
        return std::abs(x) <= 64 * std::numeric_limits<Scalar>::epsilon();
    else
        return x == Scalar(0);
}

template <typename Scalar>
struct Echelon {
    Matrix<Scalar> reduced;     // reduced row echelon form, zero rows at the bottom
    std::vector<Index> pivots;  // pivot column of each nonzero row
};

/// Gauss-Jordan elimination to reduced row echelon form.
template <typename Derived>
Echelon<typename Derived::Scalar> reduced_row_echelon(const Eigen::MatrixBase<Derived>& input) {
    using Scalar = typename Derived::Scalar;
    Echelon<Scalar> out{Matrix<Scalar>(input), {}};
    Matrix<Scalar>& m = out.reduced;
    Index row = 0;
    for (Index col = 0; col < m.cols() && row < m.rows(); ++col) {
        Index pivot = -1;
        for (Index r = row; r < m.rows(); ++r) {
            if (!is_zero(m(r, col))) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != row) m.row(pivot).swap(m.row(row));
        const Scalar inv = Scalar(1) / m(row, col);
        for (Index c = col; c < m.cols(); ++c) m(row, c) *= inv;
        for (Index r = 0; r < m.rows(); ++r) {
            if (r == row || is_zero(m(r, col))) continue;
            const Scalar f = m(r, col);
            for (Index c = col; c < m.cols(); ++c)
                if (!is_zero(m(row, c))) m(r, c) -= f * m(row, c);
        }
        out.pivots.push_back(col);
        ++row;
    }
    return out;
}

template <typename Derived>
Index rank(const Eigen::MatrixBase<Derived>& m) {
    return static_cast<Index>(reduced_row_echelon(m).pivots.size());
}

/// Basis of {x : m x = 0}, one column per free variable.
template <typename Derived>
Matrix<typename Derived::Scalar> null_space(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    const auto ech = reduced_row_echelon(m);
    const Index cols = m.cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (Index p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = true;

    std::vector<Index> free_cols;
    for (Index c = 0; c < cols; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) free_cols.push_back(c);

    Matrix<Scalar> basis = Matrix<Scalar>::Zero(cols, static_cast<Index>(free_cols.size()));
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
        const Index f = free_cols[k];
        basis(f, static_cast<Index>(k)) = Scalar(1);
        for (std::size_t r = 0; r < ech.pivots.size(); ++r)
            basis(ech.pivots[r], static_cast<Index>(k)) = -ech.reduced(static_cast<Index>(r), f);
    }
    return basis;
}

}  // namespace peermech
