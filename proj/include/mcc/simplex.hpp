#pragma once

#include <vector>

#include "mcc/linalg.hpp"

namespace mcc {

// Exact-rational two-phase simplex with Bland's rule (anti-cycling).
// Standard form: x >= 0 with A x = b; all pivots exact.

struct FeasibilityResult {
    bool feasible = false;
    QVec x; // valid when feasible
};

struct LpResult {
    enum class Status { Infeasible, Unbounded, Optimal } status = Status::Infeasible;
    QVec x;
    Rational value;
};

namespace detail {

struct SimplexTableau {
    int m = 0;       // rows
    int n = 0;       // structural columns
    QMat t;          // m x (cols + 1), last column is the rhs
    QVec z;          // reduced-cost row, same width
    std::vector<int> basis;
    int cols = 0;    // structural + artificial columns

    void pivot(int pr, int pc) {
        Rational inv = Rational(1) / t[pr][pc];
        for (int j = 0; j <= cols; ++j) t[pr][j] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == pr || t[i][pc] == 0) continue;
            Rational f = t[i][pc];
            for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[pr][j];
        }
        if (z[pc] != 0) {
            Rational f = z[pc];
            for (int j = 0; j <= cols; ++j) z[j] -= f * t[pr][j];
        }
        basis[pr] = pc;
    }

    // Bland: lowest-index entering column with a negative reduced cost;
    // lowest-basis-index leaving row among the minimum ratios. Returns
    // false at optimality, throws on unboundedness via the flag.
    bool step(int max_entering, bool* unbounded) {
        int entering = -1;
        for (int j = 0; j < max_entering; ++j)
            if (z[j] < 0) { entering = j; break; }
        if (entering < 0) return false;

        int leaving = -1;
        Rational best;
        for (int i = 0; i < m; ++i) {
            if (t[i][entering] <= 0) continue;
            Rational ratio = t[i][cols] / t[i][entering];
            if (leaving < 0 || ratio < best ||
                (ratio == best && basis[i] < basis[leaving])) {
                leaving = i;
                best = ratio;
            }
        }
        if (leaving < 0) {
            *unbounded = true;
            return false;
        }
        pivot(leaving, entering);
        return true;
    }
};

// Phase 1: artificial basis, minimize the artificial sum. On success the
// artificials are driven out of the basis (redundant rows get dropped) so
// phase 2 can run on structural columns alone.
inline bool phase1(SimplexTableau& s, QMat a, QVec b) {
    s.m = static_cast<int>(a.size());
    s.n = s.m == 0 ? 0 : static_cast<int>(a[0].size());
    for (int i = 0; i < s.m; ++i) {
        if (b[i] < 0) {
            b[i] = -b[i];
            for (auto& x : a[i]) x = -x;
        }
    }
    s.cols = s.n + s.m;
    s.t.assign(s.m, QVec(s.cols + 1, Rational(0)));
    s.basis.resize(s.m);
    for (int i = 0; i < s.m; ++i) {
        for (int j = 0; j < s.n; ++j) s.t[i][j] = a[i][j];
        s.t[i][s.n + i] = 1;
        s.t[i][s.cols] = b[i];
        s.basis[i] = s.n + i;
    }
    s.z.assign(s.cols + 1, Rational(0));
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.m; ++i) s.z[j] -= s.t[i][j];
    for (int i = 0; i < s.m; ++i) s.z[s.cols] -= s.t[i][s.cols];

    bool unbounded = false;
    while (s.step(s.cols, &unbounded)) {}
    if (s.z[s.cols] != 0) return false; // positive infeasibility remains

    // Remove artificials that linger in the basis at value zero.
    for (int i = s.m - 1; i >= 0; --i) {
        if (s.basis[i] < s.n) continue;
        int pc = -1;
        for (int j = 0; j < s.n; ++j)
            if (s.t[i][j] != 0) { pc = j; break; }
        if (pc >= 0) {
            s.pivot(i, pc);
            continue;
        }
        // all-zero structural row: the constraint was redundant
        s.t.erase(s.t.begin() + i);
        s.basis.erase(s.basis.begin() + i);
        --s.m;
    }
    return true;
}

} // namespace detail

inline FeasibilityResult find_nonneg_solution(QMat a, QVec b) {
    const int n = a.empty() ? 0 : static_cast<int>(a[0].size());
    detail::SimplexTableau s;
    if (!detail::phase1(s, std::move(a), std::move(b))) return {false, {}};
    FeasibilityResult res;
    res.feasible = true;
    res.x.assign(n, Rational(0));
    for (int i = 0; i < s.m; ++i)
        if (s.basis[i] < s.n) res.x[s.basis[i]] = s.t[i][s.cols];
    return res;
}

// Minimize c.x subject to A x = b, x >= 0.
inline LpResult lp_minimize(QMat a, QVec b, const QVec& c) {
    detail::SimplexTableau s;
    LpResult res;
    if (!detail::phase1(s, std::move(a), std::move(b))) return res;

    // Phase 2 reduced costs over structural columns only.
    s.z.assign(s.cols + 1, Rational(0));
    for (int j = 0; j < s.n; ++j) s.z[j] = c[j];
    for (int i = 0; i < s.m; ++i) {
        const Rational& cb = c[s.basis[i]];
        if (cb == 0) continue;
        for (int j = 0; j <= s.cols; ++j) s.z[j] -= cb * s.t[i][j];
    }
    for (int j = s.n; j < s.cols; ++j) s.z[j] = 0; // artificials never re-enter

    bool unbounded = false;
    while (s.step(s.n, &unbounded)) {}
    if (unbounded) {
        res.status = LpResult::Status::Unbounded;
        return res;
    }
    res.status = LpResult::Status::Optimal;
    res.x.assign(s.n, Rational(0));
    for (int i = 0; i < s.m; ++i)
        if (s.basis[i] < s.n) res.x[s.basis[i]] = s.t[i][s.cols];
    res.value = dot(c, res.x);
    return res;
}

} // namespace mcc
