#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mcc/io.hpp"

using namespace mcc;

namespace {

std::string run_cli(const std::string& args, int* exit_code) {
    std::string out_path =
        (std::filesystem::temp_directory_path() / "mcc_cli_out.txt").string();
    std::string cmd = std::string(MCC_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    int status = std::system(cmd.c_str());
    *exit_code = WEXITSTATUS(status);
    return read_text_file(out_path);
}

} // namespace

TEST_CASE("rationals serialize as p/q strings") {
    CHECK(to_string(Rational(3, 2)) == "3/2");
    CHECK(to_string(Rational(-4, 2)) == "-2");
    CHECK(parse_rational("7/3") == Rational(7, 3));
    CHECK(parse_rational("-5") == Rational(-5));
    CHECK_THROWS_AS(parse_rational("1.5"), ParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
}

TEST_CASE("rate vectors round-trip through json and csv") {
    RateVector r(3);
    int i = 1;
    for (int mask : index_order(3)) r.at(mask) = Rational(i++, 4);
    Json j = to_json(r);
    CHECK(j.at("123").get<std::string>() == "7/4");
    CHECK(rate_vector_from_json(j) == r);

    RateVector two = rate_vector_from_csv("1,1/2,3");
    CHECK(two.l == 2);
    CHECK(two.at(M12) == 3);
    CHECK_THROWS_AS(rate_vector_from_csv("1,2"), ParseError);
}

TEST_CASE("matrix csv round-trips column data") {
    auto cols = g_bc_3();
    std::string csv = matrix_to_csv(cols);
    CHECK(matrix_from_csv(csv) == cols);
}

TEST_CASE("region json exposes the documented keys") {
    Json j = region_to_json(bc_region(all_ones_rate(2)));
    CHECK(j.contains("dim"));
    CHECK(j.contains("ineqs"));
    CHECK(j.contains("vertices"));
    CHECK(j.contains("rays"));
    CHECK(j["dim"] == 3);
    CHECK(j["ineqs"].size() == 3);
    CHECK(j["ineqs"][0].contains("normal"));
    CHECK(j["ineqs"][0].contains("offset"));
}

TEST_CASE("schedules round-trip including operation chains") {
    auto ops = list_ops(Channel::BC, 3);
    Schedule s;
    s.channel = Channel::BC;
    s.l = 3;
    s.parts.push_back({ops[0], Rational(1, 2), Rational(1, 4)});
    s.parts.push_back(
        {{{ops[5], Rational(1)}, {ops[7], Rational(1, 2)}}, Rational(1, 2)});
    Json j = to_json(s);
    Schedule back = schedule_from_json(j, Channel::BC, 3);
    REQUIRE(back.parts.size() == 2);
    CHECK(back.parts[0].stages.size() == 1);
    CHECK(back.parts[1].stages.size() == 2);
    CHECK(back.parts[1].stages[1].op.id == ops[7].id);
    CHECK(back.parts[1].weight == Rational(1, 2));
}

TEST_CASE("message fixtures round-trip through the packed format") {
    RateVector r = all_ones_rate(3);
    MessageVector m = random_messages(3, 13, r, 77);
    auto path = (std::filesystem::temp_directory_path() / "mcc_fixture.bin").string();
    write_message_fixture(m, path);
    MessageVector back = read_message_fixture(path);
    CHECK(back == m);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("trial configs parse with schedule or single operation") {
    Json j{{"channel", "bc"},
           {"rstar", to_json(all_ones_rate(3))},
           {"op", "bc3:xor-pairs"},
           {"n", 64},
           {"seed", 5},
           {"trials", 2}};
    TrialConfig cfg = trial_config_from_json(j);
    CHECK(cfg.channel == Channel::BC);
    CHECK(cfg.n == 64);
    CHECK(cfg.trials == 2);
    REQUIRE(cfg.schedule.parts.size() == 1);
    CHECK(cfg.schedule.parts[0].stages[0].delta == 1); // defaults to the max step
}

TEST_CASE("op registry lists every operation with its direction") {
    Json reg = op_registry_json();
    CHECK(reg.size() == 16 + 10 + 3 + 3);
    bool found = false;
    for (const auto& e : reg)
        if (e["id"] == "mac3:shrink-123") {
            found = true;
            CHECK(e["channel"] == "mac");
            CHECK(e["direction"]["123"] == "-1");
        }
    CHECK(found);
}

TEST_CASE("cli: verify-cones succeeds and is byte-deterministic") {
    int code = 0;
    std::string first = run_cli("verify-cones", &code);
    CHECK(code == 0);
    Json report = Json::parse(first);
    CHECK(report["ok"] == true);
    CHECK(report["pairs"].size() == 4);

    std::string second = run_cli("verify-cones", &code);
    CHECK(first == second);
}

TEST_CASE("cli: region emits the expected vertices") {
    int code = 0;
    std::string out = run_cli("region --channel bc --l 2 --rstar 1,1,1", &code);
    CHECK(code == 0);
    Json report = Json::parse(out);
    std::vector<QVec> vertices;
    for (const auto& v : report["vrep"]["vertices"]) vertices.push_back(qvec_from_json(v));
    auto has = [&](std::initializer_list<int> xs) {
        QVec q;
        for (int x : xs) q.push_back(Rational(x));
        return std::find(vertices.begin(), vertices.end(), q) != vertices.end();
    };
    CHECK(has({1, 1, 1}));
    CHECK(has({2, 1, 0}));
    CHECK(has({1, 2, 0}));
    CHECK(has({0, 0, 2}));
}

TEST_CASE("cli: malformed rate vectors exit with the dedicated code") {
    int code = 0;
    run_cli("region --channel bc --l 2 --rstar 1,1", &code);
    CHECK(code == 2);
    run_cli("region --channel bc --l 3 --rstar 1,1,oops,1,1,1,1", &code);
    CHECK(code == 2);
    run_cli("region --channel bc --l 2 --rstar -1,1,1", &code);
    CHECK(code == 2);
}

TEST_CASE("cli: simulate runs clean and flags infeasible configs") {
    int code = 0;
    std::string out = run_cli(
        "simulate --channel bc --rstar 1,1,1,1,1,1,1 --op bc3:xor-pairs --n 1024", &code);
    CHECK(code == 0);
    Json report = Json::parse(out);
    CHECK(report["total_errors"] == 0);
    CHECK(report["trials"][0]["achieved"]["123"] == "3");

    // a block length that cannot be cut into the required segments
    run_cli("simulate --channel bc --rstar 1,1,1,1,1,1,1 --op bc3:xor-pairs "
            "--delta 1/3 --n 64",
            &code);
    CHECK(code == 3);

    std::string mac = run_cli(
        "simulate --channel mac --rstar 1,1,1,1,1,1,1 --op mac3:shrink-123 --n 64 --k 2",
        &code);
    CHECK(code == 0);
    CHECK(Json::parse(mac)["total_errors"] == 0);
}

TEST_CASE("cli: prove handles lemmas, targets and the unproven path") {
    int code = 0;
    std::string out = run_cli("prove --lemma 7.5", &code);
    CHECK(code == 0);
    CHECK(Json::parse(out)["result"]["passed"] == true);

    run_cli("prove --target \"I(A;B;C)\"", &code);
    CHECK(code == 4);

    auto cpath = (std::filesystem::temp_directory_path() / "mcc_constraints.txt").string();
    {
        std::ofstream f(cpath);
        f << "# functional dependences\n";
        f << "H(Z|X) = 0\n";
        f << "H(Z|Y)\n";
    }
    std::string proof =
        run_cli("prove --target \"I(X;Y|W) - H(Z|W)\" --constraints " + cpath, &code);
    CHECK(code == 0);
    Json rep = Json::parse(proof);
    CHECK(rep["result"]["proved"] == true);
    CHECK(rep["result"]["certificate"]["elemental"].size() > 0);
    std::remove(cpath.c_str());
}

TEST_CASE("cli: cuts regenerates the facet columns") {
    int code = 0;
    std::string out = run_cli("cuts", &code);
    CHECK(code == 0);
    Json report = Json::parse(out);
    CHECK(report["lhs_multiset_matches_facets"] == true);
    CHECK(report["lhs_equals_rhs"] == true);
    CHECK(report["rows"].size() == 15);
    CHECK(report["rows"][10]["condition_holds"] == false);

    std::string table = std::string(MCC_SOURCE_DIR) + "/data/table1.txt";
    std::string out2 = run_cli("cuts --table " + table, &code);
    CHECK(code == 0);
    CHECK(Json::parse(out2)["lhs_multiset_matches_facets"] == true);
}
