#pragma once

#include <array>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mcc/geometry.hpp"

namespace mcc {

// ---------------------------------------------------------------------------
// Message indices
//
// A message index is the nonempty receiver subset it is destined for,
// held as a bitmask over receivers {1,2,3}. Canonical display order is
// 1, 2, 3, 12, 13, 23, 123 for L=3 and 1, 2, 12 for L=2.
// ---------------------------------------------------------------------------

constexpr int M1 = 0b001, M2 = 0b010, M3 = 0b100;
constexpr int M12 = 0b011, M13 = 0b101, M23 = 0b110, M123 = 0b111;

inline const std::vector<int>& index_order(int l) {
    static const std::vector<int> order3 = {M1, M2, M3, M12, M13, M23, M123};
    static const std::vector<int> order2 = {M1, M2, M12};
    if (l == 2) return order2;
    if (l == 3) return order3;
    throw std::invalid_argument("index_order: l must be 2 or 3");
}

inline int index_count(int l) { return (1 << l) - 1; }

inline int index_position(int l, int mask) {
    const auto& order = index_order(l);
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == mask) return static_cast<int>(i);
    throw std::invalid_argument("index_position: bad message index");
}

inline std::string index_label(int mask) {
    std::string s;
    for (int i = 0; i < 3; ++i)
        if (mask & (1 << i)) s += static_cast<char>('1' + i);
    return s;
}

inline int parse_index(const std::string& s) {
    int mask = 0;
    for (char c : s) {
        if (c < '1' || c > '3') throw ParseError("bad message index '" + s + "'");
        mask |= 1 << (c - '1');
    }
    if (mask == 0) throw ParseError("empty message index");
    return mask;
}

// ---------------------------------------------------------------------------
// Rate vectors
// ---------------------------------------------------------------------------

struct NegativeRate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rates (or signed difference directions) indexed by message subset.
struct RateVector {
    int l = 3;
    std::array<Rational, 7> entries{}; // canonical order positions

    RateVector() = default;
    explicit RateVector(int l_) : l(l_) {}
    RateVector(int l_, const QVec& v) : l(l_) {
        if (static_cast<int>(v.size()) != index_count(l_))
            throw DimensionMismatch("RateVector: wrong component count");
        for (int i = 0; i < index_count(l_); ++i) entries[i] = v[i];
    }

    int size() const { return index_count(l); }
    Rational& at(int mask) { return entries[index_position(l, mask)]; }
    const Rational& at(int mask) const { return entries[index_position(l, mask)]; }

    QVec as_qvec() const { return QVec(entries.begin(), entries.begin() + size()); }

    bool nonnegative() const {
        for (int i = 0; i < size(); ++i)
            if (entries[i] < 0) return false;
        return true;
    }

    bool operator==(const RateVector& o) const {
        return l == o.l && as_qvec() == o.as_qvec();
    }

    friend RateVector operator+(const RateVector& a, const RateVector& b) {
        if (a.l != b.l) throw DimensionMismatch("RateVector add: L mismatch");
        RateVector r(a.l);
        for (int i = 0; i < r.size(); ++i) r.entries[i] = a.entries[i] + b.entries[i];
        return r;
    }
    friend RateVector operator*(const Rational& c, const RateVector& a) {
        RateVector r(a.l);
        for (int i = 0; i < r.size(); ++i) r.entries[i] = c * a.entries[i];
        return r;
    }
};

inline RateVector all_ones_rate(int l) {
    RateVector r(l);
    for (int i = 0; i < r.size(); ++i) r.entries[i] = 1;
    return r;
}

// ---------------------------------------------------------------------------
// Canonical matrices (columns are facets of G / rays of H)
// ---------------------------------------------------------------------------

namespace detail {
template <std::size_t R, std::size_t C>
std::vector<QVec> columns_of(const int (&m)[R][C]) {
    std::vector<QVec> cols(C, QVec(R));
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) cols[c][r] = Rational(m[r][c]);
    return cols;
}
} // namespace detail

// Facet normals and extremal rays of the multicast cones as published;
// all immutable integer data. Coordinates follow the canonical index order.
inline const std::vector<QVec>& g_bc_2() {
    static const int m[3][3] = {{1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

inline const std::vector<QVec>& h_bc_2() {
    static const int m[3][3] = {{1, 0, -1}, {0, 1, -1}, {-1, -1, 1}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

// The published MAC L=2 matrices coincide with the broadcast ones.
inline const std::vector<QVec>& g_mac_2() { return g_bc_2(); }
inline const std::vector<QVec>& h_mac_2() { return h_bc_2(); }

inline const std::vector<QVec>& g_bc_3() {
    static const int m[7][15] = {
        {1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1, 2, 2, 1, 2},
        {0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 2, 1, 2, 2},
        {0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2},
        {1, 1, 0, 1, 1, 1, 1, 2, 1, 1, 2, 2, 2, 2, 2},
        {1, 0, 1, 1, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 2},
        {0, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2},
        {1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

inline const std::vector<QVec>& h_bc_3() {
    static const int m[7][16] = {
        {-1, -1, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0},
        {-1, 0, -1, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, 0, 0, 0},
        {0, -1, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0},
        {1, 0, 0, -1, -1, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1},
        {0, 1, 0, 0, 0, 0, -1, -1, -1, 0, 0, 0, 0, 1, 0, -1},
        {0, 0, 1, 0, 0, 0, 0, 0, 0, -1, -1, -1, 0, 0, 1, -1},
        {0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, -1, -1, -1, 2}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

inline const std::vector<QVec>& g_mac_3() {
    static const int m[7][11] = {
        {1, 0, 0, 1, 1, 0, 1, 1, 1, 1, 1},
        {0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1},
        {0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1},
        {0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1},
        {0, 0, 0, 0, 1, 0, 1, 0, 1, 1, 1},
        {0, 0, 0, 0, 0, 1, 1, 1, 0, 1, 1},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

inline const std::vector<QVec>& h_mac_3() {
    static const int m[7][10] = {
        {1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 1, 1, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 1, 1, 0, 0, 0, 0},
        {-1, 0, -1, 0, 0, 0, 1, 0, 0, 0},
        {0, -1, 0, 0, -1, 0, 0, 1, 0, 0},
        {0, 0, 0, -1, 0, -1, 0, 0, 1, 0},
        {0, 0, 0, 0, 0, 0, -1, -1, -1, 1}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

// The MAC L=2 facet/ray pair implied by the operational description
// (relabel a private stream as common; lower the common rate). The
// published figure repeats the broadcast matrices instead; verify-cones
// reports that discrepancy rather than patching the published data.
inline const std::vector<QVec>& g_mac_2_operational() {
    static const int m[3][3] = {{1, 0, 1}, {0, 1, 1}, {0, 0, 1}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

inline const std::vector<QVec>& h_mac_2_operational() {
    static const int m[3][3] = {{-1, 0, 0}, {0, -1, 0}, {1, 1, -1}};
    static const auto cols = detail::columns_of(m);
    return cols;
}

// ---------------------------------------------------------------------------
// Cut collections and the floor operator
// ---------------------------------------------------------------------------

// A collection of links, i.e. a set of message indices. Bit `mask` of
// `links` is set when the link carrying message `mask` belongs to the
// collection. The empty collection is legal.
struct CutCollection {
    unsigned links = 0;

    bool contains_link(int mask) const { return links & (1u << mask); }
    void add(int mask) { links |= 1u << mask; }

    bool subset_of(const CutCollection& o) const { return (links & ~o.links) == 0; }
    CutCollection united(const CutCollection& o) const { return {links | o.links}; }
    CutCollection intersected(const CutCollection& o) const { return {links & o.links}; }
    bool operator==(const CutCollection&) const = default;

    std::vector<int> sorted_links(int l = 3) const {
        std::vector<int> out;
        for (int mask : index_order(l))
            if (contains_link(mask)) out.push_back(mask);
        return out;
    }
};

inline CutCollection make_collection(std::initializer_list<int> masks) {
    CutCollection c;
    for (int m : masks) c.add(m);
    return c;
}

// Links reaching receiver i (all indices containing i).
inline CutCollection receiver_links(int receiver, int l = 3) {
    CutCollection c;
    for (int mask : index_order(l))
        if (mask & (1 << (receiver - 1))) c.add(mask);
    return c;
}

// Floor operator: the message indices destined for receivers all of whose
// incoming links lie in `a`.
inline CutCollection floor_op(const CutCollection& a, int l = 3) {
    CutCollection out;
    for (int i = 1; i <= l; ++i) {
        CutCollection incoming = receiver_links(i, l);
        if (incoming.subset_of(a)) out = out.united(incoming);
    }
    return out;
}

inline bool lemma51_condition(const CutCollection& a1, const CutCollection& a2,
                              const CutCollection& a3) {
    return a1.subset_of(a2.united(a3)) || a2.subset_of(a1.united(a3)) ||
           a3.subset_of(a1.united(a2));
}

struct ConditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sum(lhs_I R_I) <= Sum(rhs_I R*_I); coefficients in canonical index order.
struct CutInequality {
    int l = 3;
    std::array<int, 7> lhs{};
    std::array<int, 7> rhs{};

    QVec lhs_qvec() const {
        QVec v(index_count(l));
        for (int i = 0; i < index_count(l); ++i) v[i] = Rational(lhs[i]);
        return v;
    }
    QVec rhs_qvec() const {
        QVec v(index_count(l));
        for (int i = 0; i < index_count(l); ++i) v[i] = Rational(rhs[i]);
        return v;
    }
    bool operator==(const CutInequality&) const = default;
};

// The three-collection cut bound. lhs counts membership of each index in
// floor(a1 u a2 u a3), in the pairwise-floor intersection, and in the
// intersection of the three single floors; rhs counts plain multiplicity
// across the collections.
inline CutInequality cut_inequality(const CutCollection& a1, const CutCollection& a2,
                                    const CutCollection& a3, int l = 3) {
    if (!lemma51_condition(a1, a2, a3))
        throw ConditionViolated("cut_inequality: no collection is contained in the "
                                "union of the other two");
    CutInequality out;
    out.l = l;
    CutCollection f_all = floor_op(a1.united(a2).united(a3), l);
    CutCollection f_pair = floor_op(a1.united(a2), l)
                               .intersected(floor_op(a1.united(a3), l))
                               .intersected(floor_op(a2.united(a3), l));
    CutCollection f_single =
        floor_op(a1, l).intersected(floor_op(a2, l)).intersected(floor_op(a3, l));
    for (int i = 0; i < index_count(l); ++i) {
        int mask = index_order(l)[i];
        out.lhs[i] = f_all.contains_link(mask) + f_pair.contains_link(mask) +
                     f_single.contains_link(mask);
        out.rhs[i] = a1.contains_link(mask) + a2.contains_link(mask) +
                     a3.contains_link(mask);
    }
    return out;
}

// The bound for the collection triple whose containment condition fails;
// derived from the separate entropy chain rather than the cut lemma.
inline CutInequality special_bound_11() {
    CutInequality out;
    out.l = 3;
    out.lhs = {1, 1, 1, 2, 2, 2, 2};
    out.rhs = {1, 1, 1, 2, 2, 2, 2};
    return out;
}

// ---------------------------------------------------------------------------
// Table 1
// ---------------------------------------------------------------------------

struct Table1Row {
    CutCollection a1, a2, a3;
    bool operator==(const Table1Row&) const = default;
};

inline const std::array<Table1Row, 15>& table1_rows() {
    static const std::array<Table1Row, 15> rows = {{
        {make_collection({M1, M12, M13, M123}), {}, {}},
        {make_collection({M2, M12, M23, M123}), {}, {}},
        {make_collection({M3, M13, M23, M123}), {}, {}},
        {make_collection({M1, M2, M12, M13, M23, M123}), {}, {}},
        {make_collection({M1, M3, M12, M13, M23, M123}), {}, {}},
        {make_collection({M2, M3, M12, M13, M23, M123}), {}, {}},
        {make_collection({M1, M2, M3, M12, M13, M23, M123}), {}, {}},
        {make_collection({M1, M3, M12, M13, M123}),
         make_collection({M2, M12, M23, M123}),
         {}},
        {make_collection({M1, M2, M12, M13, M123}),
         make_collection({M3, M13, M23, M123}),
         {}},
        {make_collection({M1, M2, M12, M23, M123}),
         make_collection({M3, M13, M23, M123}),
         {}},
        {make_collection({M1, M12, M13, M123}),
         make_collection({M2, M12, M23, M123}),
         make_collection({M3, M13, M23})},
        {make_collection({M1, M2, M12, M13, M123}),
         make_collection({M2, M3, M12, M23, M123}),
         make_collection({M3, M13, M23, M123})},
        {make_collection({M3, M13, M23, M123}),
         make_collection({M1, M2, M12, M23, M123}),
         make_collection({M1, M3, M12, M13, M123})},
        {make_collection({M1, M2, M12, M13, M123}),
         make_collection({M2, M12, M23, M123}),
         make_collection({M1, M3, M13, M23, M123})},
        {make_collection({M1, M2, M12, M13, M123}),
         make_collection({M2, M3, M12, M23, M123}),
         make_collection({M1, M3, M13, M23, M123})},
    }};
    return rows;
}

constexpr int kTable1SpecialRow = 10; // zero-based position of the failing triple

// File format: one row per line, three semicolon-separated link lists,
// e.g. "1,12,13,123;2,12,23,123;3,13,23"; an empty list is an empty field.
inline CutCollection parse_collection(const std::string& field) {
    CutCollection c;
    std::stringstream ss(field);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) c.add(parse_index(item));
    return c;
}

inline std::vector<Table1Row> parse_table1(const std::string& text) {
    std::vector<Table1Row> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto first = line.find(';');
        auto second = line.find(';', first + 1);
        if (first == std::string::npos || second == std::string::npos)
            throw ParseError("table row needs three ';'-separated fields: " + line);
        rows.push_back({parse_collection(line.substr(0, first)),
                        parse_collection(line.substr(first + 1, second - first - 1)),
                        parse_collection(line.substr(second + 1))});
    }
    return rows;
}

inline std::string format_collection(const CutCollection& c, int l = 3) {
    std::string out;
    for (int mask : c.sorted_links(l)) {
        if (!out.empty()) out += ',';
        out += index_label(mask);
    }
    return out;
}

inline std::string format_table1() {
    std::string out;
    for (const auto& row : table1_rows())
        out += format_collection(row.a1) + ";" + format_collection(row.a2) + ";" +
               format_collection(row.a3) + "\n";
    return out;
}

// All fifteen published bounds: the cut lemma on every row whose condition
// holds, the separate chain bound on the one row where it fails.
inline std::vector<CutInequality> table1_generate(
    const std::vector<Table1Row>& rows = {table1_rows().begin(), table1_rows().end()}) {
    std::vector<CutInequality> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (lemma51_condition(r.a1, r.a2, r.a3))
            out.push_back(cut_inequality(r.a1, r.a2, r.a3));
        else
            out.push_back(special_bound_11());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Region builders and the dual-cone membership test
// ---------------------------------------------------------------------------

enum class Channel { BC, MAC };

inline std::string channel_name(Channel c) { return c == Channel::BC ? "bc" : "mac"; }

inline const std::vector<QVec>& facet_columns(Channel ch, int l) {
    if (ch == Channel::BC) return l == 2 ? g_bc_2() : g_bc_3();
    return l == 2 ? g_mac_2_operational() : g_mac_3();
}

// {R >= 0 : g.R <= g.R* for every facet column g}.
inline RegionSpec multicast_region(Channel ch, const RateVector& r_star) {
    if (!r_star.nonnegative()) throw NegativeRate("multicast region needs R* >= 0");
    const auto& cols = facet_columns(ch, r_star.l);
    HRep h;
    h.dim = r_star.size();
    h.nonneg = true;
    QVec rs = r_star.as_qvec();
    for (const auto& g : cols) h.ineqs.push_back({g, dot(g, rs)});
    return RegionSpec{h, false};
}

inline RegionSpec bc_region(const RateVector& r_star) {
    return multicast_region(Channel::BC, r_star);
}
inline RegionSpec mac_region(const RateVector& r_star) {
    return multicast_region(Channel::MAC, r_star);
}

// alpha belongs to the minimal dual weight set: alpha >= 0 and
// alpha . h <= 0 for every extremal ray column h.
inline bool hstar_membership(const QVec& alpha) {
    if (alpha.size() != 7) throw DimensionMismatch("hstar_membership: need 7 components");
    for (const auto& x : alpha)
        if (x < 0) return false;
    for (const auto& h : h_bc_3())
        if (dot(alpha, h) > 0) return false;
    return true;
}

} // namespace mcc
