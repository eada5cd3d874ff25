#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mcc/linalg.hpp"
#include "mcc/simplex.hpp"

namespace mcc {

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

// One inequality: normal . x <= offset.
struct LinIneq {
    QVec normal;
    Rational offset;
    bool operator==(const LinIneq&) const = default;
};

// Facet description. The nonneg flag adds x_j >= 0 for every coordinate.
struct HRep {
    int dim = 0;
    std::vector<LinIneq> ineqs;
    bool nonneg = false;
    bool operator==(const HRep&) const = default;
};

// Generator description: conv(vertices) + cone(rays). A VRep without
// vertices denotes the empty set. Rays are kept as primitive integer
// vectors; for a non-pointed region the rays list carries +/- pairs
// spanning the lineality space.
struct VRep {
    int dim = 0;
    std::vector<QVec> vertices;
    std::vector<QVec> rays;
    bool operator==(const VRep&) const = default;
    bool empty_region() const { return vertices.empty(); }
};

struct RegionSpec {
    std::variant<HRep, VRep> rep;
    bool canonical = false;

    int dim() const {
        return std::holds_alternative<HRep>(rep) ? std::get<HRep>(rep).dim
                                                 : std::get<VRep>(rep).dim;
    }
    bool operator==(const RegionSpec& o) const { return rep == o.rep; }
};

inline VRep cone_of(int dim, std::vector<QVec> rays) {
    VRep v;
    v.dim = dim;
    v.vertices.push_back(QVec(dim, Rational(0)));
    for (auto& r : rays) v.rays.push_back(primitive(r));
    return v;
}

// ---------------------------------------------------------------------------
// Double description method
// ---------------------------------------------------------------------------

namespace detail {

using Bitset = std::vector<std::uint64_t>;

inline Bitset make_bitset(std::size_t bits) { return Bitset((bits + 63) / 64, 0); }
inline void set_bit(Bitset& b, std::size_t i) { b[i / 64] |= std::uint64_t(1) << (i % 64); }
inline bool subset_of(const Bitset& a, const Bitset& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}
inline Bitset intersect(const Bitset& a, const Bitset& b) {
    Bitset r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
    return r;
}

inline int popcount(const Bitset& a) {
    int c = 0;
    for (auto w : a) c += __builtin_popcountll(w);
    return c;
}

struct DdRay {
    QVec v;
    Bitset tight; // over processed constraint indices
};

// Extreme rays of the pointed cone {x : rows.x <= 0}; requires rank(rows)=n.
// Incremental insertion starting from a simplicial subcone given by n
// independent constraints; adjacency decided by the combinatorial test.
inline std::vector<QVec> dd_pointed(const QMat& rows, int n) {
    const std::size_t m = rows.size();

    // Pick n linearly independent constraints for the initial simplicial cone.
    std::vector<int> basis_idx;
    QMat reduced; // row echelon of the chosen rows
    for (std::size_t k = 0; k < m && static_cast<int>(basis_idx.size()) < n; ++k) {
        QVec cand = rows[k];
        for (const auto& r : reduced) {
            int lead = 0;
            while (r[lead] == 0) ++lead;
            if (cand[lead] != 0) cand = cand - (cand[lead] / r[lead]) * r;
        }
        if (!is_zero(cand)) {
            reduced.push_back(cand);
            // keep echelon ordering by leading column
            for (std::size_t i = reduced.size(); i-- > 1;) {
                auto lead = [](const QVec& v) {
                    int l = 0;
                    while (l < static_cast<int>(v.size()) && v[l] == 0) ++l;
                    return l;
                };
                if (lead(reduced[i]) < lead(reduced[i - 1]))
                    std::swap(reduced[i], reduced[i - 1]);
                else
                    break;
            }
            basis_idx.push_back(static_cast<int>(k));
        }
    }
    if (static_cast<int>(basis_idx.size()) != n)
        throw std::logic_error("dd_pointed: constraint matrix is rank deficient");

    std::vector<bool> processed(m, false);
    QMat b(n);
    for (int j = 0; j < n; ++j) {
        b[j] = rows[basis_idx[j]];
        processed[basis_idx[j]] = true;
    }

    auto recompute_tight = [&](DdRay& r) {
        r.tight = make_bitset(m);
        for (std::size_t k = 0; k < m; ++k)
            if (processed[k] && dot(rows[k], r.v) == 0) set_bit(r.tight, k);
    };

    // Rays of the simplicial cone: columns of -B^{-1}.
    std::vector<DdRay> rays;
    for (int j = 0; j < n; ++j) {
        QVec e(n, Rational(0));
        e[j] = -1;
        auto sol = solve_square(b, e);
        if (!sol) throw std::logic_error("dd_pointed: singular initial basis");
        DdRay r;
        r.v = primitive(*sol);
        recompute_tight(r);
        rays.push_back(std::move(r));
    }

    for (std::size_t k = 0; k < m; ++k) {
        if (processed[k]) continue;
        processed[k] = true;

        std::vector<Rational> s(rays.size());
        bool any_pos = false;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            s[i] = dot(rows[k], rays[i].v);
            if (s[i] > 0) any_pos = true;
        }
        if (!any_pos) {
            for (std::size_t i = 0; i < rays.size(); ++i)
                if (s[i] == 0) set_bit(rays[i].tight, k);
            continue;
        }

        std::vector<DdRay> next;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (s[i] < 0) next.push_back(rays[i]);
            if (s[i] == 0) {
                set_bit(rays[i].tight, k);
                next.push_back(rays[i]);
            }
        }

        auto adjacent = [&](std::size_t p, std::size_t q) {
            Bitset common = intersect(rays[p].tight, rays[q].tight);
            // adjacent rays share a face of dimension n-2, so fewer common
            // tight constraints than n-2 rules the pair out immediately
            if (popcount(common) < n - 2) return false;
            for (std::size_t i = 0; i < rays.size(); ++i) {
                if (i == p || i == q) continue;
                if (subset_of(common, rays[i].tight)) return false;
            }
            return true;
        };

        std::set<QVec> seen;
        for (std::size_t p = 0; p < rays.size(); ++p) {
            if (s[p] <= 0) continue;
            for (std::size_t q = 0; q < rays.size(); ++q) {
                if (s[q] >= 0) continue;
                if (!adjacent(p, q)) continue;
                DdRay w;
                w.v = primitive(s[p] * rays[q].v - s[q] * rays[p].v);
                if (!seen.insert(w.v).second) continue;
                recompute_tight(w);
                next.push_back(std::move(w));
            }
        }
        rays = std::move(next);
    }

    std::vector<QVec> out;
    out.reserve(rays.size());
    for (auto& r : rays) out.push_back(std::move(r.v));
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

struct ConeGenerators {
    QMat lineality; // canonical basis rows (primitive, RREF order)
    QMat rays;      // extreme rays of the pointed part, primitive, sorted
};

// Generators of {x : rows.x <= 0} for an arbitrary (possibly non-pointed)
// cone. The cone splits as lineality + pointed part; the pointed part is
// computed inside the canonical coordinate complement of the lineality
// space, which makes the output depend only on the cone as a set.
inline ConeGenerators cone_generators(const QMat& rows, int n) {
    ConeGenerators out;
    QMat lin = kernel_basis(rows, n);
    if (lin.empty()) {
        out.rays = dd_pointed(rows, n);
        return out;
    }

    std::vector<int> pivots = rref(lin);
    for (auto& l : lin) out.lineality.push_back(primitive(l));

    std::vector<bool> is_pivot(n, false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    if (free_cols.empty()) return out; // whole space: lineality only

    QMat sub_rows;
    sub_rows.reserve(rows.size());
    for (const auto& r : rows) {
        QVec s(free_cols.size());
        for (std::size_t j = 0; j < free_cols.size(); ++j) s[j] = r[free_cols[j]];
        sub_rows.push_back(std::move(s));
    }

    QMat sub_rays = dd_pointed(sub_rows, static_cast<int>(free_cols.size()));
    for (const auto& sr : sub_rays) {
        QVec full(n, Rational(0));
        for (std::size_t j = 0; j < free_cols.size(); ++j) full[free_cols[j]] = sr[j];
        out.rays.push_back(primitive(full));
    }
    std::sort(out.rays.begin(), out.rays.end(), lex_less);
    return out;
}

inline QMat homogenized_rows(const HRep& h) {
    QMat rows;
    for (const auto& iq : h.ineqs) {
        if (static_cast<int>(iq.normal.size()) != h.dim)
            throw DimensionMismatch("HRep inequality dimension mismatch");
        QVec r = iq.normal;
        r.push_back(-iq.offset);
        rows.push_back(std::move(r));
    }
    if (h.nonneg) {
        for (int j = 0; j < h.dim; ++j) {
            QVec r(h.dim + 1, Rational(0));
            r[j] = -1;
            rows.push_back(std::move(r));
        }
    }
    QVec t(h.dim + 1, Rational(0)); // homogenization: t >= 0
    t[h.dim] = -1;
    rows.push_back(std::move(t));
    return rows;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

// Minimal generator description of {x : all inequalities hold}. The empty
// region comes back as a VRep with no generators, not as a fault.
inline VRep h_to_v(const HRep& h) {
    if (h.dim < 1) throw DimensionMismatch("h_to_v: dimension must be >= 1");
    auto gens = detail::cone_generators(detail::homogenized_rows(h), h.dim + 1);

    VRep v;
    v.dim = h.dim;
    for (const auto& r : gens.rays) {
        const Rational& t = r[h.dim];
        QVec x(r.begin(), r.begin() + h.dim);
        if (t > 0) {
            v.vertices.push_back((Rational(1) / t) * x);
        } else if (!is_zero(x)) {
            v.rays.push_back(primitive(x));
        }
    }
    if (v.vertices.empty()) return VRep{h.dim, {}, {}}; // infeasible system

    // Lineality of the homogenized cone always lies in {t = 0}.
    for (const auto& l : gens.lineality) {
        QVec x(l.begin(), l.begin() + h.dim);
        v.rays.push_back(primitive(x));
        QVec neg = Rational(-1) * x;
        v.rays.push_back(primitive(neg));
    }
    std::sort(v.vertices.begin(), v.vertices.end(), lex_less);
    std::sort(v.rays.begin(), v.rays.end(), lex_less);
    v.rays.erase(std::unique(v.rays.begin(), v.rays.end()), v.rays.end());
    return v;
}

// Canonical facet form of the empty set in a given dimension.
inline HRep empty_hrep(int dim) {
    HRep h;
    h.dim = dim;
    QVec e(dim, Rational(0));
    e[0] = 1;
    h.ineqs.push_back({e, Rational(-1)});
    e[0] = -1;
    h.ineqs.push_back({e, Rational(-1)});
    return h;
}

// Minimal facet description of conv(vertices) + cone(rays), computed via the
// polar of the homogenization. Implicit equalities show up as +/- pairs.
inline HRep v_to_h(const VRep& v) {
    if (v.dim < 1) throw DimensionMismatch("v_to_h: dimension must be >= 1");
    if (v.empty_region()) return empty_hrep(v.dim);

    QMat rows;
    for (const auto& p : v.vertices) {
        if (static_cast<int>(p.size()) != v.dim)
            throw DimensionMismatch("VRep vertex dimension mismatch");
        QVec r = p;
        r.push_back(Rational(1));
        rows.push_back(std::move(r));
    }
    for (const auto& ray : v.rays) {
        if (static_cast<int>(ray.size()) != v.dim)
            throw DimensionMismatch("VRep ray dimension mismatch");
        QVec r = ray;
        r.push_back(Rational(0));
        rows.push_back(std::move(r));
    }

    auto polar = detail::cone_generators(rows, v.dim + 1);

    HRep h;
    h.dim = v.dim;
    auto emit = [&](const QVec& g) {
        QVec normal(g.begin(), g.begin() + v.dim);
        if (is_zero(normal)) return; // the trivial 0.x <= const facet
        QVec scaled = primitive(g);
        h.ineqs.push_back({QVec(scaled.begin(), scaled.begin() + v.dim), -scaled[v.dim]});
    };
    for (const auto& l : polar.lineality) {
        emit(l);
        emit(Rational(-1) * l);
    }
    for (const auto& r : polar.rays) emit(r);

    std::sort(h.ineqs.begin(), h.ineqs.end(), [](const LinIneq& a, const LinIneq& b) {
        if (a.normal != b.normal) return lex_less(a.normal, b.normal);
        return a.offset < b.offset;
    });
    h.ineqs.erase(std::unique(h.ineqs.begin(), h.ineqs.end()), h.ineqs.end());
    return h;
}

// ---------------------------------------------------------------------------
// Canonicalization, membership, sums, equality
// ---------------------------------------------------------------------------

inline HRep canonicalize(const HRep& h) { return v_to_h(h_to_v(h)); }
inline VRep canonicalize(const VRep& v) { return h_to_v(v_to_h(v)); }

inline RegionSpec canonicalize(const RegionSpec& r) {
    RegionSpec out;
    if (std::holds_alternative<HRep>(r.rep))
        out.rep = canonicalize(std::get<HRep>(r.rep));
    else
        out.rep = canonicalize(std::get<VRep>(r.rep));
    out.canonical = true;
    return out;
}

inline bool contains(const HRep& h, const QVec& p) {
    if (static_cast<int>(p.size()) != h.dim)
        throw DimensionMismatch("contains: point dimension mismatch");
    for (const auto& iq : h.ineqs)
        if (dot(iq.normal, p) > iq.offset) return false;
    if (h.nonneg)
        for (const auto& x : p)
            if (x < 0) return false;
    return true;
}

// Membership in conv(vertices) + cone(rays) as an exact feasibility LP.
inline bool contains(const VRep& v, const QVec& p) {
    if (static_cast<int>(p.size()) != v.dim)
        throw DimensionMismatch("contains: point dimension mismatch");
    if (v.empty_region()) return false;
    const int cols = static_cast<int>(v.vertices.size() + v.rays.size());
    QMat a(v.dim + 1, QVec(cols, Rational(0)));
    for (std::size_t j = 0; j < v.vertices.size(); ++j) {
        for (int i = 0; i < v.dim; ++i) a[i][j] = v.vertices[j][i];
        a[v.dim][j] = 1; // convex weights sum to one
    }
    for (std::size_t j = 0; j < v.rays.size(); ++j)
        for (int i = 0; i < v.dim; ++i) a[i][v.vertices.size() + j] = v.rays[j][i];
    QVec b = p;
    b.push_back(Rational(1));
    return find_nonneg_solution(std::move(a), std::move(b)).feasible;
}

inline bool contains(const RegionSpec& r, const QVec& p) {
    return std::holds_alternative<HRep>(r.rep) ? contains(std::get<HRep>(r.rep), p)
                                               : contains(std::get<VRep>(r.rep), p);
}

inline VRep to_vrep(const RegionSpec& r) {
    return std::holds_alternative<VRep>(r.rep) ? std::get<VRep>(r.rep)
                                               : h_to_v(std::get<HRep>(r.rep));
}
inline HRep to_hrep(const RegionSpec& r) {
    return std::holds_alternative<HRep>(r.rep) ? std::get<HRep>(r.rep)
                                               : v_to_h(std::get<VRep>(r.rep));
}

inline VRep minkowski_sum(const VRep& a, const VRep& b) {
    if (a.dim != b.dim) throw DimensionMismatch("minkowski_sum: dimension mismatch");
    if (a.empty_region() || b.empty_region()) return VRep{a.dim, {}, {}};
    VRep sum;
    sum.dim = a.dim;
    for (const auto& va : a.vertices)
        for (const auto& vb : b.vertices) sum.vertices.push_back(va + vb);
    sum.rays = a.rays;
    sum.rays.insert(sum.rays.end(), b.rays.begin(), b.rays.end());
    return canonicalize(sum);
}

// Ray containment in the recession cone of an H-representation.
inline bool recession_contains(const HRep& h, const QVec& ray) {
    for (const auto& iq : h.ineqs)
        if (dot(iq.normal, ray) > 0) return false;
    if (h.nonneg)
        for (const auto& x : ray)
            if (x < 0) return false;
    return true;
}

inline bool regions_equal(const RegionSpec& a, const RegionSpec& b) {
    if (a.dim() != b.dim()) return false;

    RegionSpec ca = a.canonical ? a : canonicalize(a);
    RegionSpec cb = b.canonical ? b : canonicalize(b);
    if (ca.rep.index() == cb.rep.index() && ca == cb) return true;

    // Mutual inclusion on exact representations; robust for flat regions
    // where the canonical facet form is representation-dependent.
    VRep va = to_vrep(ca), vb = to_vrep(cb);
    if (va.empty_region() || vb.empty_region())
        return va.empty_region() == vb.empty_region();
    HRep ha = to_hrep(ca), hb = to_hrep(cb);
    for (const auto& p : va.vertices)
        if (!contains(hb, p)) return false;
    for (const auto& r : va.rays)
        if (!recession_contains(hb, r)) return false;
    for (const auto& p : vb.vertices)
        if (!contains(ha, p)) return false;
    for (const auto& r : vb.rays)
        if (!recession_contains(ha, r)) return false;
    return true;
}

} // namespace mcc
