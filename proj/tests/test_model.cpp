#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "mcc/io.hpp"
#include "mcc/model.hpp"

using namespace mcc;

namespace {

QVec qv(std::initializer_list<int> xs) {
    QVec v;
    for (int x : xs) v.push_back(Rational(x));
    return v;
}

std::vector<QVec> sorted_cols(std::vector<QVec> cols) {
    std::sort(cols.begin(), cols.end(), lex_less);
    return cols;
}

} // namespace

TEST_CASE("floor operator on the worked examples") {
    CHECK(floor_op(make_collection({M1, M2, M12, M13, M123})) ==
          make_collection({M1, M12, M13, M123}));
    CHECK(floor_op(make_collection({M2, M3, M12, M13, M23, M123})) ==
          make_collection({M2, M3, M12, M13, M23, M123}));
    CHECK(floor_op(make_collection({M1, M12, M23, M123})) == CutCollection{});
}

TEST_CASE("floor operator is monotone") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<unsigned> bits(0, (1u << 7) - 1);
    for (int t = 0; t < 200; ++t) {
        unsigned sub = bits(rng);
        unsigned extra = bits(rng);
        CutCollection a{sub << 1}, b{(sub | extra) << 1};
        CHECK(floor_op(a).subset_of(floor_op(b)));
    }
}

TEST_CASE("cut condition holds and fails on the expected rows") {
    const auto& rows = table1_rows();
    CHECK(lemma51_condition(rows[0].a1, rows[0].a2, rows[0].a3));
    CHECK_FALSE(lemma51_condition(rows[10].a1, rows[10].a2, rows[10].a3));
    CHECK(lemma51_condition(rows[14].a1, rows[14].a2, rows[14].a3));
}

TEST_CASE("cut inequality on single collections reproduces plain cut-set bounds") {
    // With the other two collections empty the bound collapses to
    // sum over floor(a1) <= sum over a1.
    const auto& rows = table1_rows();
    for (int i = 0; i < 7; ++i) {
        CutInequality iq = cut_inequality(rows[i].a1, {}, {});
        CutCollection fl = floor_op(rows[i].a1);
        for (int pos = 0; pos < 7; ++pos) {
            int mask = index_order(3)[pos];
            CHECK(iq.lhs[pos] == (fl.contains_link(mask) ? 1 : 0));
            CHECK(iq.rhs[pos] == (rows[i].a1.contains_link(mask) ? 1 : 0));
        }
    }
}

TEST_CASE("cut inequality reproduces specific facet columns") {
    const auto& rows = table1_rows();

    CutInequality row1 = cut_inequality(rows[0].a1, rows[0].a2, rows[0].a3);
    CHECK(row1.lhs_qvec() == qv({1, 0, 0, 1, 1, 0, 1}));
    CHECK(row1.lhs == row1.rhs);

    CutInequality row7 = cut_inequality(rows[6].a1, rows[6].a2, rows[6].a3);
    CHECK(row7.lhs_qvec() == qv({1, 1, 1, 1, 1, 1, 1}));
    CHECK(row7.lhs == row7.rhs);

    CutInequality row8 = cut_inequality(rows[7].a1, rows[7].a2, rows[7].a3);
    CHECK(row8.lhs_qvec() == qv({1, 1, 1, 2, 1, 1, 2}));

    CutInequality row15 = cut_inequality(rows[14].a1, rows[14].a2, rows[14].a3);
    CHECK(row15.lhs == row15.rhs);
    bool found = false;
    for (const auto& col : g_bc_3()) found = found || col == row15.lhs_qvec();
    CHECK(found);
    for (int c : row15.lhs) CHECK((c >= 1 && c <= 3));
}

TEST_CASE("cut inequality refuses a condition-violating triple") {
    const auto& r11 = table1_rows()[kTable1SpecialRow];
    CHECK_THROWS_AS(cut_inequality(r11.a1, r11.a2, r11.a3), ConditionViolated);
}

TEST_CASE("the separate bound for the failing row") {
    CutInequality iq = special_bound_11();
    CHECK(iq.lhs_qvec() == qv({1, 1, 1, 2, 2, 2, 2}));
    CHECK(iq.rhs_qvec() == qv({1, 1, 1, 2, 2, 2, 2}));
    CHECK(iq.lhs == iq.rhs);
    // rhs really is the link multiplicity across the row's collections
    const auto& r11 = table1_rows()[kTable1SpecialRow];
    for (int pos = 0; pos < 7; ++pos) {
        int mask = index_order(3)[pos];
        int mult = r11.a1.contains_link(mask) + r11.a2.contains_link(mask) +
                   r11.a3.contains_link(mask);
        CHECK(iq.rhs[pos] == mult);
    }
}

TEST_CASE("table regeneration matches the facet columns as a multiset") {
    auto inequalities = table1_generate();
    REQUIRE(inequalities.size() == 15);
    std::vector<QVec> lhs;
    for (const auto& iq : inequalities) {
        lhs.push_back(iq.lhs_qvec());
        CHECK(iq.lhs == iq.rhs);
    }
    CHECK(sorted_cols(lhs) == sorted_cols(g_bc_3()));
}

TEST_CASE("table file round-trips and matches the builtin rows") {
    std::string path = std::string(MCC_SOURCE_DIR) + "/data/table1.txt";
    auto rows = parse_table1(read_text_file(path));
    REQUIRE(rows.size() == 15);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == table1_rows()[i]);
    // and the serialized builtin parses back to itself
    auto reparsed = parse_table1(format_table1());
    for (std::size_t i = 0; i < reparsed.size(); ++i)
        CHECK(reparsed[i] == table1_rows()[i]);
}

TEST_CASE("broadcast region for L=2 all-ones") {
    RegionSpec region = bc_region(all_ones_rate(2));
    HRep h = std::get<HRep>(region.rep);
    REQUIRE(h.ineqs.size() == 3);
    CHECK(h.nonneg);
    CHECK(h.ineqs[0].normal == qv({1, 0, 1}));
    CHECK(h.ineqs[0].offset == 2);
    CHECK(h.ineqs[2].normal == qv({1, 1, 1}));
    CHECK(h.ineqs[2].offset == 3);

    VRep v = to_vrep(region);
    auto has_vertex = [&](QVec p) {
        return std::find(v.vertices.begin(), v.vertices.end(), p) != v.vertices.end();
    };
    CHECK(has_vertex(qv({1, 1, 1})));
    CHECK(has_vertex(qv({2, 1, 0})));
    CHECK(has_vertex(qv({1, 2, 0})));
    CHECK(has_vertex(qv({0, 0, 2})));
}

TEST_CASE("zero anchor collapses the region to the origin") {
    RateVector zero(3);
    VRep v = to_vrep(bc_region(zero));
    CHECK(v.vertices == std::vector<QVec>{qv({0, 0, 0, 0, 0, 0, 0})});
    CHECK(v.rays.empty());
}

TEST_CASE("broadcast L=3 all-ones region reaches the network-coding vertex") {
    VRep v = to_vrep(bc_region(all_ones_rate(3)));
    QVec target = qv({1, 1, 1, 0, 0, 0, 3});
    CHECK(std::find(v.vertices.begin(), v.vertices.end(), target) != v.vertices.end());
}

TEST_CASE("negative anchor rates are rejected") {
    RateVector bad(2);
    bad.at(M1) = -1;
    CHECK_THROWS_AS(bc_region(bad), NegativeRate);
}

TEST_CASE("MAC L=2 region uses the operational facets") {
    RegionSpec region = mac_region(all_ones_rate(2));
    CHECK(contains(region, qv({0, 1, 2})));
    CHECK(contains(region, qv({1, 0, 2})));
    CHECK(contains(region, qv({1, 1, 1})));
    CHECK_FALSE(contains(region, qv({2, 1, 0}))); // private rates cannot grow
}

TEST_CASE("duality: broadcast matrices are exact, MAC published rays are negated") {
    auto rays_of = [](const std::vector<QVec>& facets) {
        HRep h;
        h.dim = static_cast<int>(facets.front().size());
        for (const auto& g : facets) h.ineqs.push_back({g, Rational(0)});
        return h_to_v(h).rays;
    };
    CHECK(rays_of(g_bc_2()) == sorted_cols(h_bc_2()));
    CHECK(rays_of(g_bc_3()) == sorted_cols(h_bc_3()));

    std::vector<QVec> negated;
    for (const auto& c : h_mac_3()) negated.push_back(Rational(-1) * c);
    auto computed = rays_of(g_mac_3());
    CHECK(computed.size() == 10);
    CHECK(computed == sorted_cols(negated));
    CHECK(computed != sorted_cols(h_mac_3()));

    // published L=2 MAC matrices duplicate the broadcast pair
    CHECK(g_mac_2() == g_bc_2());
    CHECK(h_mac_2() == h_bc_2());
    CHECK(rays_of(g_mac_2_operational()) == sorted_cols(h_mac_2_operational()));
}

TEST_CASE("anchored region equals the generator description") {
    // The facet form G.R <= G.R* against {R >= 0 : R <= R* + H delta}.
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> num(0, 8);
    std::uniform_int_distribution<int> den(1, 8);
    for (int t = 0; t < 3; ++t) {
        RateVector rs(3);
        for (int mask : index_order(3)) rs.at(mask) = Rational(num(rng), den(rng));
        VRep eq2;
        eq2.dim = 7;
        eq2.vertices.push_back(rs.as_qvec());
        for (const auto& c : h_bc_3()) eq2.rays.push_back(c);
        for (int j = 0; j < 7; ++j) {
            QVec e(7, Rational(0));
            e[j] = -1;
            eq2.rays.push_back(e);
        }
        HRep h = v_to_h(eq2);
        h.nonneg = true;
        CHECK(regions_equal(RegionSpec{h, false}, bc_region(rs)));
    }
}

TEST_CASE("dual weight-set membership") {
    for (const auto& g : g_bc_3()) CHECK(hstar_membership(g));
    // elementwise oracle: membership of a facet column is the statement
    // that its products with all ray columns are nonpositive
    for (const auto& g : g_bc_3())
        for (const auto& h : h_bc_3()) CHECK(dot(g, h) <= 0);

    QVec e1 = qv({1, 0, 0, 0, 0, 0, 0});
    CHECK_FALSE(hstar_membership(e1)); // row one of the ray matrix has a +1
    CHECK(hstar_membership(qv({0, 0, 0, 0, 0, 0, 0})));

    QVec negative = qv({-1, 0, 0, 0, 0, 0, 0});
    CHECK_FALSE(hstar_membership(negative));

    std::mt19937 rng(23);
    std::uniform_int_distribution<int> coef(0, 5);
    int violating = 0;
    for (int t = 0; t < 500 && violating < 100; ++t) {
        QVec alpha(7);
        for (auto& x : alpha) x = coef(rng);
        bool violates = false;
        for (const auto& h : h_bc_3()) violates = violates || dot(alpha, h) > 0;
        if (!violates) continue;
        ++violating;
        CHECK_FALSE(hstar_membership(alpha));
    }
    CHECK(violating == 100);
}

TEST_CASE("message index helpers") {
    CHECK(index_label(M12) == "12");
    CHECK(parse_index("123") == M123);
    CHECK_THROWS_AS(parse_index("4"), ParseError);
    CHECK(index_order(2).size() == 3);
    CHECK(index_position(3, M123) == 6);
    CHECK_THROWS_AS(index_position(2, M13), std::invalid_argument);
    CHECK(format_collection(make_collection({M123, M1, M13})) == "1,13,123");
}
