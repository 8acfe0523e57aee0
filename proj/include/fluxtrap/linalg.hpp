#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fluxtrap/expr.hpp"

namespace fluxtrap {

/// Dense matrix of exact expressions; sized for the handful of phase
/// space dimensions these models carry.
using ExprMatrix = std::vector<std::vector<Expr>>;
using ExprVector = std::vector<Expr>;

inline ExprMatrix make_matrix(std::size_t rows, std::size_t cols,
                              const SymbolTablePtr& t) {
    return ExprMatrix(rows, ExprVector(cols, Expr::zero(t)));
}

inline ExprMatrix identity_matrix(std::size_t n, const SymbolTablePtr& t) {
    ExprMatrix m = make_matrix(n, n, t);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Expr::one(t);
    return m;
}

inline ExprMatrix matrix_multiply(const ExprMatrix& a, const ExprMatrix& b) {
    std::size_t n = a.size(), k = b.size(), m = b[0].size();
    ExprMatrix r = make_matrix(n, m, a[0][0].table());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < k; ++l)
                r[i][j] = r[i][j] + a[i][l] * b[l][j];
    return r;
}

inline Expr determinant(const ExprMatrix& m) {
    std::size_t n = m.size();
    const SymbolTablePtr& t = m[0][0].table();
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Expr det = Expr::zero(t);
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        ExprMatrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            ExprVector row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        Expr c = m[0][j] * determinant(minor);
        det = (j % 2 == 0) ? det + c : det - c;
    }
    return det;
}

/// Inverse over the rational-function field; nullopt when singular.
inline std::optional<ExprMatrix> matrix_inverse(const ExprMatrix& m) {
    std::size_t n = m.size();
    const SymbolTablePtr& t = m[0][0].table();
    ExprMatrix a = m;
    ExprMatrix inv = identity_matrix(n, t);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        Expr p = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col].is_zero()) continue;
            Expr f = a[i][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] = a[i][j] - f * a[col][j];
                inv[i][j] = inv[i][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

inline std::size_t matrix_rank(ExprMatrix a) {
    if (a.empty()) return 0;
    std::size_t rows = a.size(), cols = a[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            if (a[i][col].is_zero()) continue;
            Expr f = a[i][col] / a[rank][col];
            for (std::size_t j = col; j < cols; ++j)
                a[i][j] = a[i][j] - f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

/// Basis of the null space of a (exact kernel vectors).
inline std::vector<ExprVector> null_space(const ExprMatrix& m) {
    std::size_t rows = m.size(), cols = m[0].size();
    const SymbolTablePtr& t = m[0][0].table();
    ExprMatrix a = m;
    std::vector<std::optional<std::size_t>> pivot_of_col(cols);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[rank]);
        Expr p = a[rank][col];
        for (std::size_t j = 0; j < cols; ++j) a[rank][j] = a[rank][j] / p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][col].is_zero()) continue;
            Expr f = a[i][col];
            for (std::size_t j = 0; j < cols; ++j)
                a[i][j] = a[i][j] - f * a[rank][j];
        }
        pivot_of_col[col] = rank;
        ++rank;
    }
    std::vector<ExprVector> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (pivot_of_col[free]) continue;
        ExprVector v(cols, Expr::zero(t));
        v[free] = Expr::one(t);
        for (std::size_t col = 0; col < cols; ++col)
            if (pivot_of_col[col]) v[col] = -a[*pivot_of_col[col]][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace fluxtrap
