#pragma once

#include "peermech/linalg.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace peermech {

enum class RowSense { less_equal, equal };
enum class LpStatus { optimal, infeasible, unbounded, pivot_limit };

enum class PivotRule {
    bland,               // smallest-index entering and leaving variables
    dantzig_then_bland,  // largest reduced cost until a degenerate streak, then Bland for good
};

struct SimplexOptions {
    PivotRule rule = PivotRule::bland;
    std::size_t max_pivots = 2'000'000;
    std::size_t degenerate_streak_limit = 64;
};

template <typename Scalar>
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Scalar objective{0};
    Vector<Scalar> x;  // structural variables only
    std::size_t pivots = 0;
};

namespace detail {

template <typename Scalar>
class Tableau {
public:
    Tableau(Index rows, Index cols) : t_(Matrix<Scalar>::Zero(rows, cols + 1)), basis_(rows, -1), cols_(cols) {}

    Scalar& at(Index r, Index c) { return t_(r, c); }
    Scalar& rhs(Index r) { return t_(r, cols_); }
    const Scalar& rhs(Index r) const { return t_(r, cols_); }
    Index rows() const { return t_.rows(); }
    Index cols() const { return cols_; }
    std::vector<Index>& basis() { return basis_; }

    void price(const std::vector<Scalar>& cost) {
        cost_ = cost;
        reduced_.assign(static_cast<std::size_t>(cols_), Scalar(0));
        for (Index j = 0; j < cols_; ++j) reduced_[j] = cost[j];
        value_ = Scalar(0);
        for (Index r = 0; r < rows(); ++r) {
            const Scalar& cb = cost[basis_[r]];
            if (is_zero(cb)) continue;
            for (Index j = 0; j < cols_; ++j)
                if (!is_zero(t_(r, j))) reduced_[j] -= cb * t_(r, j);
            value_ += cb * t_(r, cols_);
        }
    }

    const Scalar& value() const { return value_; }

    // Returns optimal, unbounded or pivot_limit.
    LpStatus optimize(const std::vector<bool>& allowed, const SimplexOptions& options, std::size_t& pivots) {
        bool bland = options.rule == PivotRule::bland;
        std::size_t streak = 0;
        while (true) {
            Index enter = -1;
            for (Index j = 0; j < cols_; ++j) {
                if (!allowed[j] || !(reduced_[j] > Scalar(0))) continue;
                if (enter < 0) {
                    enter = j;
                    if (bland) break;
                } else if (reduced_[j] > reduced_[enter]) {
                    enter = j;
                }
            }
            if (enter < 0) return LpStatus::optimal;

            Index leave = -1;
            Scalar best;
            for (Index r = 0; r < rows(); ++r) {
                const Scalar& a = t_(r, enter);
                if (!(a > Scalar(0))) continue;
                Scalar ratio = t_(r, cols_) / a;
                if (leave < 0 || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
                    leave = r;
                    best = std::move(ratio);
                }
            }
            if (leave < 0) return LpStatus::unbounded;
            if (pivots >= options.max_pivots) return LpStatus::pivot_limit;

            if (is_zero(best)) {
                if (++streak >= options.degenerate_streak_limit) bland = true;
            } else {
                streak = 0;
            }
            pivot(leave, enter);
            ++pivots;
        }
    }

    void pivot(Index row, Index col) {
        const Scalar inv = Scalar(1) / t_(row, col);
        std::vector<Index> nz;
        for (Index j = 0; j <= cols_; ++j) {
            if (is_zero(t_(row, j))) continue;
            t_(row, j) *= inv;
            nz.push_back(j);
        }
        for (Index r = 0; r < rows(); ++r) {
            if (r == row || is_zero(t_(r, col))) continue;
            const Scalar f = t_(r, col);
            for (Index j : nz) t_(r, j) -= f * t_(row, j);
        }
        const Scalar d = reduced_[col];
        if (!is_zero(d)) {
            for (Index j : nz) {
                if (j == cols_)
                    value_ += d * t_(row, j);
                else
                    reduced_[j] -= d * t_(row, j);
            }
        }
        basis_[row] = col;
    }

private:
    Matrix<Scalar> t_;
    std::vector<Index> basis_;
    Index cols_;
    std::vector<Scalar> cost_;
    std::vector<Scalar> reduced_;
    Scalar value_{0};
};

}  // namespace detail

/// Maximizes c.x subject to A x (<= or =) b row-wise and x >= 0.
/// Rows with sense less_equal need b >= 0; equality rows may have any sign.
/// The returned point is a basic feasible solution, hence a vertex of the
/// feasible polyhedron.
template <typename Scalar>
LpSolution<Scalar> maximize(const Matrix<Scalar>& A, const Vector<Scalar>& b, const Vector<Scalar>& c,
                            const std::vector<RowSense>& senses, const SimplexOptions& options = {}) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (b.size() != m || c.size() != n || static_cast<Index>(senses.size()) != m)
        throw std::invalid_argument("maximize: dimension mismatch");

    Index slacks = 0, artificials = 0;
    for (Index r = 0; r < m; ++r) {
        if (senses[r] == RowSense::less_equal) {
            if (b(r) < Scalar(0)) throw std::invalid_argument("maximize: <= row with negative right-hand side");
            ++slacks;
        } else {
            ++artificials;
        }
    }
    const Index total = n + slacks + artificials;
    detail::Tableau<Scalar> tab(m, total);
    Index next_slack = n, next_art = n + slacks;
    std::vector<bool> is_artificial(static_cast<std::size_t>(total), false);
    for (Index r = 0; r < m; ++r) {
        const bool flip = senses[r] == RowSense::equal && b(r) < Scalar(0);
        for (Index j = 0; j < n; ++j)
            if (!is_zero(A(r, j))) tab.at(r, j) = flip ? Scalar(-A(r, j)) : A(r, j);
        tab.rhs(r) = flip ? Scalar(-b(r)) : b(r);
        const Index aux = senses[r] == RowSense::less_equal ? next_slack++ : next_art++;
        if (senses[r] == RowSense::equal) is_artificial[aux] = true;
        tab.at(r, aux) = Scalar(1);
        tab.basis()[r] = aux;
    }

    LpSolution<Scalar> out;
    std::vector<bool> allowed(static_cast<std::size_t>(total), true);

    if (artificials > 0) {
        std::vector<Scalar> phase1(static_cast<std::size_t>(total), Scalar(0));
        for (Index j = 0; j < total; ++j)
            if (is_artificial[j]) phase1[j] = Scalar(-1);
        tab.price(phase1);
        const LpStatus s = tab.optimize(allowed, options, out.pivots);
        if (s == LpStatus::pivot_limit) {
            out.status = s;
            return out;
        }
        if (tab.value() < Scalar(0)) {
            out.status = LpStatus::infeasible;
            return out;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (Index r = 0; r < m; ++r) {
            if (!is_artificial[tab.basis()[r]]) continue;
            for (Index j = 0; j < total; ++j) {
                if (!is_artificial[j] && !is_zero(tab.at(r, j))) {
                    tab.pivot(r, j);
                    ++out.pivots;
                    break;
                }
            }
        }
        for (Index j = 0; j < total; ++j)
            if (is_artificial[j]) allowed[j] = false;
    }

    std::vector<Scalar> cost(static_cast<std::size_t>(total), Scalar(0));
    for (Index j = 0; j < n; ++j) cost[j] = c(j);
    tab.price(cost);
    out.status = tab.optimize(allowed, options, out.pivots);
    if (out.status != LpStatus::optimal) return out;

    out.x = Vector<Scalar>::Zero(n);
    for (Index r = 0; r < m; ++r)
        if (tab.basis()[r] < n) out.x(tab.basis()[r]) = tab.rhs(r);
    out.objective = tab.value();
    return out;
}

}  // namespace peermech
