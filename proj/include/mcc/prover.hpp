#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcc/rational.hpp"
#include "mcc/simplex.hpp"

namespace mcc {

struct UnknownVariable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooManyVariables : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownLemma : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Entropy expressions in the joint-entropy basis
//
// A vector holds sum(c_S * H(X_S)) over nonempty subsets S of the ground
// variables {0..n-1}; conditional entropies and mutual informations are
// always expanded into this basis.
// ---------------------------------------------------------------------------

struct EntropyVector {
    int n = 0;
    std::map<unsigned, Rational> coeffs; // subset mask -> coefficient, no zeros

    void add(unsigned mask, const Rational& c) {
        if (mask == 0 || c == 0) return; // H() = 0
        auto it = coeffs.find(mask);
        if (it == coeffs.end()) {
            coeffs.emplace(mask, c);
        } else {
            it->second += c;
            if (it->second == 0) coeffs.erase(it);
        }
    }

    bool zero() const { return coeffs.empty(); }

    EntropyVector& operator+=(const EntropyVector& o) {
        for (const auto& [m, c] : o.coeffs) add(m, c);
        return *this;
    }
    EntropyVector& operator-=(const EntropyVector& o) {
        for (const auto& [m, c] : o.coeffs) add(m, -c);
        return *this;
    }
    friend EntropyVector operator+(EntropyVector a, const EntropyVector& b) { return a += b; }
    friend EntropyVector operator-(EntropyVector a, const EntropyVector& b) { return a -= b; }
    friend EntropyVector operator*(const Rational& c, EntropyVector v) {
        if (c == 0) return EntropyVector{v.n, {}};
        for (auto& [m, x] : v.coeffs) x *= c;
        return v;
    }

    EntropyVector rebased(int new_n) const {
        EntropyVector out;
        out.n = new_n;
        for (const auto& [m, c] : coeffs) {
            if (m >= (1u << new_n))
                throw DimensionMismatch("rebase drops a ground variable");
            out.coeffs.emplace(m, c);
        }
        return out;
    }

    bool operator==(const EntropyVector& o) const { return coeffs == o.coeffs; }
};

inline EntropyVector entropy(int n, unsigned set) {
    EntropyVector v;
    v.n = n;
    v.add(set, 1);
    return v;
}

inline EntropyVector cond_entropy(int n, unsigned set, unsigned given) {
    EntropyVector v;
    v.n = n;
    v.add(set | given, 1);
    v.add(given, -1);
    return v;
}

// I(P1;...;Pk | C) by inclusion-exclusion over nonempty part subsets.
inline EntropyVector mutual_info(int n, const std::vector<unsigned>& parts,
                                 unsigned cond = 0) {
    EntropyVector v;
    v.n = n;
    const unsigned k = static_cast<unsigned>(parts.size());
    for (unsigned s = 1; s < (1u << k); ++s) {
        unsigned joint = cond;
        int bits = 0;
        for (unsigned i = 0; i < k; ++i)
            if (s & (1u << i)) {
                joint |= parts[i];
                ++bits;
            }
        Rational sign = (bits % 2 == 1) ? 1 : -1;
        v.add(joint, sign);
        v.add(cond, -sign);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Expression grammar
//
//   expr    := term (('+'|'-') term)*
//   term    := [coeff '*'] atom
//   atom    := 'H(' varlist ['|' varlist] ')'
//            | 'I(' varlist (';' varlist)+ ['|' varlist] ')'
//   varlist := var (',' var)*
//   coeff   := integer | integer '/' integer
// ---------------------------------------------------------------------------

struct SymbolTable {
    std::vector<std::string> names;
    std::map<std::string, int> ids;

    int size() const { return static_cast<int>(names.size()); }

    int lookup(const std::string& name, bool allow_new, std::size_t pos) {
        auto it = ids.find(name);
        if (it != ids.end()) return it->second;
        if (!allow_new)
            throw UnknownVariable("unknown variable '" + name + "' at position " +
                                  std::to_string(pos));
        int id = size();
        ids.emplace(name, id);
        names.push_back(name);
        return id;
    }
};

namespace detail {

struct ExprParser {
    const std::string& text;
    SymbolTable& table;
    bool allow_new;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected a variable name");
        return text.substr(start, pos - start);
    }

    Int integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos == start) fail("expected an integer");
        return Int(text.substr(start, pos - start));
    }

    unsigned varlist() {
        unsigned mask = 0;
        do {
            std::size_t at = pos;
            mask |= 1u << table.lookup(ident(), allow_new, at);
        } while (eat(','));
        return mask;
    }

    EntropyVector atom() {
        skip_ws();
        if (pos >= text.size()) fail("expected 'H(' or 'I('");
        char head = text[pos];
        if (head != 'H' && head != 'I') fail("expected 'H(' or 'I('");
        ++pos;
        expect('(');
        std::vector<unsigned> parts{varlist()};
        if (head == 'I') {
            while (eat(';')) parts.push_back(varlist());
            if (parts.size() < 2) fail("mutual information needs at least two parts");
        }
        unsigned cond = 0;
        if (eat('|')) cond = varlist();
        expect(')');
        // n gets fixed after the whole expression is read
        if (head == 'H') return cond_entropy(0, parts[0], cond);
        return mutual_info(0, parts, cond);
    }

    EntropyVector term() {
        skip_ws();
        Rational coeff = 1;
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            Int p = integer();
            Int q = 1;
            if (eat('/')) q = integer();
            if (q == 0) fail("zero denominator");
            coeff = Rational(p, q);
            expect('*');
        }
        return coeff * atom();
    }

    EntropyVector parse() {
        EntropyVector v;
        skip_ws();
        bool negate = false;
        if (eat('-')) negate = true;
        else eat('+');
        EntropyVector first = term();
        v = negate ? Rational(-1) * first : first;
        while (true) {
            skip_ws();
            if (pos >= text.size()) break;
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else fail("expected '+' or '-'");
        }
        v.n = table.size();
        return v;
    }
};

} // namespace detail

inline EntropyVector parse_expression(const std::string& text, SymbolTable& table,
                                      bool allow_new_vars = true) {
    detail::ExprParser p{text, table, allow_new_vars};
    return p.parse();
}

inline EntropyVector parse_expression(const std::string& text) {
    SymbolTable table;
    return parse_expression(text, table);
}

// Canonical printing: joint entropies only, subsets in ascending mask order.
// parse(print(v)) == v.
inline std::string print_expression(const EntropyVector& v, const SymbolTable& table) {
    if (v.coeffs.empty()) return "0*H(" + (table.names.empty() ? "X1" : table.names[0]) + ")";
    std::string out;
    for (const auto& [mask, coeff] : v.coeffs) {
        Rational c = coeff;
        if (out.empty()) {
            if (c < 0) {
                out += "- ";
                c = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            if (c < 0) c = -c;
        }
        if (c != 1) out += to_string(c) + "*";
        out += "H(";
        bool first = true;
        for (int i = 0; i < v.n; ++i) {
            if (!(mask & (1u << i))) continue;
            if (!first) out += ",";
            out += table.names[i];
            first = false;
        }
        out += ")";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Elemental inequalities
// ---------------------------------------------------------------------------

struct ElementalInequality {
    std::string label;
    EntropyVector vec; // asserted >= 0
};

namespace detail {

inline std::vector<std::string> default_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
    return names;
}

inline std::string set_label(unsigned mask, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!(mask & (1u << i))) continue;
        if (!out.empty()) out += ",";
        out += names[i];
    }
    return out;
}

// Complete elemental set: H(Xi | rest) >= 0 and I(Xi;Xj | K) >= 0 for all
// K among the remaining variables. No size guard here; the public entry
// point enforces the documented bound.
inline std::vector<ElementalInequality> elementals_unchecked(
    int n, const std::vector<std::string>& names) {
    std::vector<ElementalInequality> out;
    const unsigned all = (1u << n) - 1;
    for (int i = 0; i < n; ++i) {
        unsigned rest = all & ~(1u << i);
        ElementalInequality e;
        e.vec = cond_entropy(n, 1u << i, rest);
        e.label = "H(" + names[i] + (rest ? "|" + set_label(rest, names) : "") + ")";
        out.push_back(std::move(e));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            unsigned others = all & ~(1u << i) & ~(1u << j);
            // iterate subsets of `others`, including the empty set
            unsigned k = 0;
            while (true) {
                ElementalInequality e;
                e.vec = mutual_info(n, {1u << i, 1u << j}, k);
                e.label = "I(" + names[i] + ";" + names[j] +
                          (k ? "|" + set_label(k, names) : "") + ")";
                out.push_back(std::move(e));
                if (k == others) break;
                k = (k - others) & others; // next subset
            }
        }
    }
    return out;
}

} // namespace detail

// n + C(n,2)*2^(n-2) inequalities generating all Shannon-type bounds.
inline std::vector<ElementalInequality> elemental_inequalities(int n) {
    if (n < 1 || n > 6)
        throw TooManyVariables("elemental set is limited to 1..6 variables");
    return detail::elementals_unchecked(n, detail::default_names(n));
}

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

struct Constraint {
    std::string label;
    EntropyVector vec; // asserted == 0
};

struct ConstraintSet {
    std::vector<Constraint> equalities;

    // H(func | of) = 0, encoded as H(func,of) - H(of) = 0.
    void add_functional(int n, unsigned func, unsigned of,
                        const std::vector<std::string>& names) {
        Constraint c;
        c.vec = cond_entropy(n, func, of);
        c.label = "H(" + detail::set_label(func, names) +
                  (of ? "|" + detail::set_label(of, names) : "") + ")=0";
        equalities.push_back(std::move(c));
    }

    // Mutual independence of the groups: every sub-collection of two or
    // more groups factorizes (all these equalities follow from mutual
    // independence, and spelling them out keeps certificates short).
    void add_mutual_independence(int n, const std::vector<unsigned>& groups,
                                 const std::vector<std::string>& names) {
        const unsigned g = static_cast<unsigned>(groups.size());
        for (unsigned s = 1; s < (1u << g); ++s) {
            if (__builtin_popcount(s) < 2) continue;
            Constraint c;
            c.vec.n = n;
            unsigned joint = 0;
            for (unsigned i = 0; i < g; ++i) {
                if (!(s & (1u << i))) continue;
                joint |= groups[i];
                c.vec.add(groups[i], -1);
            }
            c.vec.add(joint, 1);
            c.label = "independence over {" + detail::set_label(joint, names) + "}";
            equalities.push_back(std::move(c));
        }
    }
};

// ---------------------------------------------------------------------------
// Proof search
// ---------------------------------------------------------------------------

struct CertificateTerm {
    std::string label;
    Rational coeff;
    EntropyVector vec;
};

// target = sum(lambda_i * elemental_i) + sum(mu_j * equality_j), lambda >= 0.
struct ProofCertificate {
    std::vector<CertificateTerm> elemental;
    std::vector<CertificateTerm> constraint;

    EntropyVector expansion(int n) const {
        EntropyVector v;
        v.n = n;
        for (const auto& t : elemental) v += t.coeff * t.vec;
        for (const auto& t : constraint) v += t.coeff * t.vec;
        return v;
    }
};

// Uniform-probability witnesses keep every marginal entropy an exact
// number of bits; evaluation happens in double precision.
struct WitnessDistribution {
    std::string description;
    int n = 0;
    std::vector<Rational> pmf; // size 2^n, outcomes are bit patterns

    double entropy(unsigned set) const {
        std::map<unsigned, double> marginal;
        for (std::size_t outcome = 0; outcome < pmf.size(); ++outcome) {
            double p = pmf[outcome].convert_to<double>();
            if (p > 0) marginal[static_cast<unsigned>(outcome) & set] += p;
        }
        double h = 0;
        for (const auto& [_, p] : marginal) h -= p * std::log2(p);
        return h;
    }

    double evaluate(const EntropyVector& v) const {
        double s = 0;
        for (const auto& [mask, c] : v.coeffs) s += c.convert_to<double>() * entropy(mask);
        return s;
    }
};

// A,B uniform independent bits, C = A xor B: the standard witness that
// triple information can be negative.
inline WitnessDistribution xor_witness() {
    WitnessDistribution w;
    w.description = "A,B uniform independent bits, C = A xor B";
    w.n = 3;
    w.pmf.assign(8, Rational(0));
    for (unsigned a = 0; a <= 1; ++a)
        for (unsigned b = 0; b <= 1; ++b)
            w.pmf[a | (b << 1) | ((a ^ b) << 2)] = Rational(1, 4);
    return w;
}

// `proved == false` means not provable from elemental inequalities plus
// the given equalities -- not a disproof.
struct ProofResult {
    bool proved = false;
    std::optional<ProofCertificate> certificate;
    std::optional<WitnessDistribution> witness;
};

inline ProofResult prove(const EntropyVector& target, const ConstraintSet& constraints = {},
                         const std::vector<std::string>& names = {}) {
    const int n = target.n;
    if (n < 1 || n > 9)
        throw TooManyVariables("prove supports 1..9 ground variables");
    auto elem = detail::elementals_unchecked(
        n, names.empty() ? detail::default_names(n) : names);

    const unsigned dim = (1u << n) - 1;
    const std::size_t e_cols = elem.size();
    const std::size_t c_cols = constraints.equalities.size();
    QMat a(dim, QVec(e_cols + 2 * c_cols, Rational(0)));
    for (std::size_t j = 0; j < e_cols; ++j)
        for (const auto& [mask, c] : elem[j].vec.coeffs) a[mask - 1][j] = c;
    for (std::size_t j = 0; j < c_cols; ++j)
        for (const auto& [mask, c] : constraints.equalities[j].vec.coeffs) {
            a[mask - 1][e_cols + 2 * j] = c;
            a[mask - 1][e_cols + 2 * j + 1] = -c;
        }
    QVec b(dim, Rational(0));
    for (const auto& [mask, c] : target.coeffs) b[mask - 1] = c;

    auto sol = find_nonneg_solution(std::move(a), std::move(b));
    ProofResult res;
    if (!sol.feasible) {
        // Attach the catalogued counterexample when the query is the bare
        // triple information.
        if (c_cols == 0 && n == 3 && target == mutual_info(3, {1, 2, 4}))
            res.witness = xor_witness();
        return res;
    }

    res.proved = true;
    ProofCertificate cert;
    for (std::size_t j = 0; j < e_cols; ++j)
        if (sol.x[j] != 0) cert.elemental.push_back({elem[j].label, sol.x[j], elem[j].vec});
    for (std::size_t j = 0; j < c_cols; ++j) {
        Rational mu = sol.x[e_cols + 2 * j] - sol.x[e_cols + 2 * j + 1];
        if (mu != 0)
            cert.constraint.push_back(
                {constraints.equalities[j].label, mu, constraints.equalities[j].vec});
    }
    res.certificate = std::move(cert);
    return res;
}

// ---------------------------------------------------------------------------
// Lemma suite
// ---------------------------------------------------------------------------

struct LemmaInstance {
    std::string description;
    bool proved = false;
};

struct LemmaReport {
    std::string lemma;
    std::size_t instance_count = 0;
    std::size_t proved_count = 0;
    bool passed = false;
    std::vector<LemmaInstance> instances;
};

namespace detail {

inline bool containment_holds(unsigned x1, unsigned x2, unsigned x3) {
    return (x1 & ~(x2 | x3)) == 0 || (x2 & ~(x1 | x3)) == 0 || (x3 & ~(x1 | x2)) == 0;
}

inline std::string triple_desc(int m, unsigned x1, unsigned x2, unsigned x3,
                               const std::vector<std::string>& names) {
    auto part = [&](unsigned x) {
        return x ? set_label(x, names) : std::string("-");
    };
    return "m=" + std::to_string(m) + " X1={" + part(x1) + "} X2={" + part(x2) +
           "} X3={" + part(x3) + "}";
}

// Unordered triples suffice: hypotheses and targets of the set-valued
// lemmas are symmetric under permuting the three sets.
template <typename Hypothesis, typename RunInstance>
void enumerate_triples(int max_ground, Hypothesis hyp, RunInstance run) {
    for (int m = 1; m <= max_ground; ++m) {
        const unsigned top = 1u << m;
        for (unsigned x1 = 0; x1 < top; ++x1)
            for (unsigned x2 = x1; x2 < top; ++x2)
                for (unsigned x3 = x2; x3 < top; ++x3)
                    if (hyp(x1, x2, x3)) run(m, x1, x2, x3);
    }
}

} // namespace detail

inline LemmaReport verify_lemma(const std::string& name, int max_ground_vars = 4) {
    LemmaReport report;
    report.lemma = name;

    auto record = [&](const std::string& desc, bool ok) {
        report.instances.push_back({desc, ok});
        ++report.instance_count;
        if (ok) ++report.proved_count;
    };

    // An instance only counts as proved when its certificate re-expands to
    // the target exactly.
    auto proved_exactly = [](const EntropyVector& target, const ConstraintSet& cs,
                             const std::vector<std::string>& names) {
        ProofResult res = prove(target, cs, names);
        return res.proved && res.certificate &&
               res.certificate->expansion(target.n) == target;
    };

    if (name == "7.1") {
        // Containment triples, W a function of each set: I(X1;X2;X3) >= H(W).
        detail::enumerate_triples(
            max_ground_vars, detail::containment_holds,
            [&](int m, unsigned x1, unsigned x2, unsigned x3) {
                int n = m + 1;
                unsigned w = 1u << m;
                auto names = detail::default_names(m);
                names.push_back("W");
                ConstraintSet cs;
                for (unsigned x : {x1, x2, x3}) cs.add_functional(n, w, x, names);
                EntropyVector target =
                    mutual_info(n, {x1, x2, x3}) - entropy(n, w);
                record(detail::triple_desc(m, x1, x2, x3, names),
                       proved_exactly(target, cs, names));
            });
    } else if (name == "7.2") {
        // H(A)+H(B)+H(C) = H(A,B,C) + I(AB;AC;BC) + I(A;B;C), symbolically.
        const unsigned A = 1, B = 2, C = 4;
        EntropyVector diff = entropy(3, A) + entropy(3, B) + entropy(3, C) -
                             entropy(3, A | B | C) -
                             mutual_info(3, {A | B, A | C, B | C}) -
                             mutual_info(3, {A, B, C});
        record("identity expands to the zero vector", diff.zero());
        record("lhs - rhs provable", proved_exactly(diff, {}, {"A", "B", "C"}));
        record("rhs - lhs provable",
               proved_exactly(Rational(-1) * diff, {}, {"A", "B", "C"}));
    } else if (name == "7.3") {
        // Independent ground variables, empty triple intersection:
        // H(Y|X1)+H(Y|X2)+H(Y|X3) >= H(Y).
        detail::enumerate_triples(
            max_ground_vars,
            [](unsigned x1, unsigned x2, unsigned x3) { return (x1 & x2 & x3) == 0; },
            [&](int m, unsigned x1, unsigned x2, unsigned x3) {
                int n = m + 1;
                unsigned y = 1u << m;
                auto names = detail::default_names(m);
                names.push_back("Y");
                ConstraintSet cs;
                std::vector<unsigned> singles;
                for (int i = 0; i < m; ++i) singles.push_back(1u << i);
                if (m >= 2) cs.add_mutual_independence(n, singles, names);
                EntropyVector target;
                target.n = n;
                for (unsigned x : {x1, x2, x3}) target += cond_entropy(n, y, x);
                target -= entropy(n, y);
                record(detail::triple_desc(m, x1, x2, x3, names),
                       proved_exactly(target, cs, names));
            });
    } else if (name == "7.4") {
        // Containment triples: I(X1;X2;X3|W) >= 0 for any W.
        detail::enumerate_triples(
            max_ground_vars, detail::containment_holds,
            [&](int m, unsigned x1, unsigned x2, unsigned x3) {
                int n = m + 1;
                unsigned w = 1u << m;
                auto names = detail::default_names(m);
                names.push_back("W");
                EntropyVector target = mutual_info(n, {x1, x2, x3}, w);
                record(detail::triple_desc(m, x1, x2, x3, names),
                       proved_exactly(target, {}, names));
            });
    } else if (name == "7.5") {
        // H(Z|X)=0 and H(Z|Y)=0 imply I(X;Y|W) >= H(Z|W).
        const unsigned X = 1, Y = 2, Z = 4, W = 8;
        std::vector<std::string> names = {"X", "Y", "Z", "W"};
        ConstraintSet cs;
        cs.add_functional(4, Z, X, names);
        cs.add_functional(4, Z, Y, names);
        EntropyVector target = mutual_info(4, {X, Y}, W) - cond_entropy(4, Z, W);
        record("I(X;Y|W) >= H(Z|W) given H(Z|X)=H(Z|Y)=0",
               proved_exactly(target, cs, names));
    } else {
        throw UnknownLemma("no lemma named '" + name + "'");
    }

    report.passed = report.proved_count == report.instance_count;
    return report;
}

} // namespace mcc
