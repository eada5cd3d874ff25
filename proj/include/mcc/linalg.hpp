#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <vector>

#include "mcc/rational.hpp"

namespace mcc {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>; // row major

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational dot(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline QVec operator+(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vec add: size mismatch");
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline QVec operator-(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vec sub: size mismatch");
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline QVec operator*(const Rational& c, const QVec& a) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline bool is_zero(const QVec& a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& x) { return x == 0; });
}

// Scale to coprime integer entries, preserving direction. Zero vector stays zero.
inline QVec primitive(const QVec& a) {
    Int l = 1;
    for (const auto& x : a) l = lcm_int(l, den(x));
    Int g = 0;
    std::vector<Int> ints(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ints[i] = num(a[i]) * (l / den(a[i]));
        g = gcd(g, ints[i]);
    }
    QVec r(a.size(), Rational(0));
    if (g == 0) return r;
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = Rational(ints[i] / g);
    return r;
}

inline bool lex_less(const QVec& a, const QVec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Reduced row echelon form in place; returns pivot column per pivot row.
inline std::vector<int> rref(QMat& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pr = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) { pr = i; break; }
        if (pr < 0) continue;
        std::swap(m[r], m[pr]);
        Rational inv = Rational(1) / m[r][c];
        for (int j = c; j < cols; ++j) m[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    return pivots;
}

inline int rank(QMat m) { return static_cast<int>(rref(m).size()); }

// Basis of {x : rows * x = 0}. Depends only on the row space, so the result
// is canonical for a given subspace.
inline QMat kernel_basis(const QMat& rows, int dim) {
    QMat m = rows;
    for (auto& row : m) assert(static_cast<int>(row.size()) == dim);
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(dim, false);
    for (int p : pivots) is_pivot[p] = true;
    QMat basis;
    for (int f = 0; f < dim; ++f) {
        if (is_pivot[f]) continue;
        QVec v(dim, Rational(0));
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Unique solution of a square nonsingular system; nullopt when singular.
inline std::optional<QVec> solve_square(QMat a, QVec b) {
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) a[i].push_back(b[i]);
    std::vector<int> pivots = rref(a);
    if (static_cast<int>(pivots.size()) != n) return std::nullopt;
    for (int i = 0; i < n; ++i)
        if (pivots[i] != i) return std::nullopt; // pivot landed in the rhs column
    QVec x(n);
    for (int i = 0; i < n; ++i) x[i] = a[i][n];
    return x;
}

} // namespace mcc
