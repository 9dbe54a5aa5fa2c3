#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "freelip/io.hpp"

using namespace freelip;
namespace fs = std::filesystem;

namespace {

Json parse(const char* text) { return Json::parse(text); }

} // namespace

TEST_CASE("space from matrix json") {
    auto j = parse(R"({"labels": ["a", "b", "c"], "base": "b",
                       "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]})");
    auto M = space_from_json_d(j);
    CHECK(M.size() == 3);
    CHECK(M.base == 1);
    CHECK(M.labels[0] == "a");
    CHECK(M.d(0, 2) == 2.0);

    auto Q = space_from_json_q(j);
    CHECK(Q.d(0, 2) == Rational(2));
}

TEST_CASE("space from coords json with default labels") {
    auto j = parse(R"({"coords": {"points": [[0, 0], [1, 0], [0, 1]], "p": 2}})");
    auto M = space_from_json_d(j);
    CHECK(M.size() == 3);
    CHECK(M.base == 0);
    CHECK(M.labels[2] == "p2");
    CHECK(M.d(1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    auto ji = parse(R"({"coords": {"points": [[0, 0], [3, 4]], "p": "inf"}})");
    CHECK(space_from_json_d(ji).d(0, 1) == 4.0);

    // p defaults to 2
    auto jd = parse(R"({"coords": {"points": [[0, 0], [3, 4]]}})");
    CHECK(space_from_json_d(jd).d(0, 1) == 5.0);
}

TEST_CASE("exact mode parses decimals through their text") {
    auto j = parse(R"({"coords": {"points": [[0], [0.1], ["3/10"]], "p": 1}})");
    auto Q = space_from_json_q(j);
    CHECK(Q.d(0, 1) == Rational(1, 10));
    CHECK(Q.d(1, 2) == Rational(1, 5));
}

TEST_CASE("space json rejections") {
    CHECK_THROWS_AS(space_from_json_d(parse(R"({"matrix": [[0]], "coords": {}})")), Error);
    CHECK_THROWS_AS(space_from_json_d(parse(R"({"labels": ["a"]})")), Error);
    CHECK_THROWS_AS(space_from_json_d(parse(R"({"matrix": [[0, 1], [1, 0]],
                                               "labels": ["a"]})")),
                    Error);
    CHECK_THROWS_AS(space_from_json_d(parse(R"({"matrix": [[0, 1], [1, 0]],
                                               "base": "zz"})")),
                    Error);
    CHECK_THROWS_AS(space_from_json_d(parse(R"({"matrix": [[0, 1]]})")), Error);
    try {
        space_from_json_d(parse(R"({"matrix": [[0, 5], [5, 0]], "base": 0})"));
        FAIL("expected BadInput");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BadInput);
    }
}

TEST_CASE("map from json, inline space, scalar values") {
    auto j = parse(R"({"space": {"labels": ["a", "b", "c"],
                                 "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
                       "values": {"a": 0, "b": 1, "c": 2}})");
    auto lm = map_from_json_d(j);
    CHECK(lm.map.dim == 1);
    auto n = lip_norm(lm.map);
    CHECK(n.norm == 1.0);
    CHECK(lm.space->labels[1] == "b");

    auto lq = map_from_json_q(j);
    CHECK(lip_norm(lq.map).norm == Rational(1));
}

TEST_CASE("map from json, vector values and target norm") {
    auto j = parse(R"({"space": {"coords": {"points": [[0, 0], [1, 0]], "p": 1}},
                       "values": {"p0": [0, 0], "p1": [1, 1]},
                       "target_p": 1})");
    auto lm = map_from_json_d(j);
    CHECK(lm.map.dim == 2);
    CHECK(lm.map.target == NormP::One);
    CHECK(lip_norm(lm.map).norm == 2.0);

    // target defaults to the sup norm
    auto jd = parse(R"({"space": {"coords": {"points": [[0, 0], [1, 0]], "p": 1}},
                        "values": {"p0": [0, 0], "p1": [1, 1]}})");
    CHECK(map_from_json_d(jd).map.target == NormP::Inf);
}

TEST_CASE("map from json rejections") {
    CHECK_THROWS_AS(map_from_json_d(parse(R"({"values": {}})")), Error);
    CHECK_THROWS_AS(
        map_from_json_d(parse(R"({"space": {"matrix": [[0, 1], [1, 0]]},
                                  "values": {"p0": 0}})")),
        Error);
    CHECK_THROWS_AS(
        map_from_json_d(parse(R"({"space": {"matrix": [[0, 1], [1, 0]]},
                                  "values": {"p0": 0, "p1": [1, 2]}})")),
        Error);
    CHECK_THROWS_AS(
        map_from_json_d(parse(R"({"space": {"matrix": [[0, 1], [1, 0]]},
                                  "values": {"p0": 0, "p1": 1, "zz": 2}})")),
        Error);
}

TEST_CASE("map file referencing a space file") {
    const fs::path dir = fs::temp_directory_path() / "freelip_io_test";
    fs::create_directories(dir);
    const std::string spath = (dir / "line.json").string();
    write_text_file(spath, R"({"labels": ["a", "b"], "matrix": [[0, 1], [1, 0]]})");
    Json mj;
    mj["space"] = spath;
    mj["values"] = {{"a", 0.0}, {"b", 1.0}};
    auto lm = map_from_json_d(mj);
    CHECK(lm.space->size() == 2);
    CHECK(lip_norm(lm.map).norm == 1.0);

    CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), Error);
    write_text_file((dir / "broken.json").string(), "{not json");
    CHECK_THROWS_AS(read_json_file((dir / "broken.json").string()), Error);
}

TEST_CASE("classify csv freezes the three point line") {
    auto M = space_from_json_d(parse(R"({"labels": ["a", "b", "c"],
                                         "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]})"));
    auto reps = classify_molecules(M);
    CHECK(classify_csv(M, reps) ==
          "x,y,d,extreme,witness,epsilon_star,strongly_exposed\n"
          "a,b,1,1,,1,1\n"
          "a,c,2,0,b,0,0\n"
          "b,c,1,1,,1,1\n");

    auto Q = space_from_json_q(parse(R"({"labels": ["a", "b", "c"],
                                         "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]})"));
    CHECK(classify_csv(Q, classify_molecules(Q)) ==
          "x,y,d,extreme,witness,epsilon_star,strongly_exposed\n"
          "a,b,1,1,,1,1\n"
          "a,c,2,0,b,0,0\n"
          "b,c,1,1,,1,1\n");
}

TEST_CASE("trend csv emitters") {
    auto measures = stage_measure_check(2);
    std::vector<StageNormReport> norms;
    for (unsigned n = 0; n <= 2; ++n) norms.push_back(stage_norm_analysis(n));
    const std::string trend = cantor_trend_csv(measures, norms);
    CHECK(trend.substr(0, 21) == "n,lambda,ell,L,argmax");
    CHECK(std::count(trend.begin(), trend.end(), '\n') == 4);
    CHECK(trend.find("1,1/4,0.125,") != std::string::npos);

    std::vector<std::pair<double, ConcavityScan>> scans;
    scans.emplace_back(1.0, circle_concavity_scan(1.0, 100));
    const std::string conc = concavity_csv(scans);
    CHECK(conc.substr(0, 22) == "t,min_ratio,min_bound\n");
    CHECK(std::count(conc.begin(), conc.end(), '\n') == 2);

    auto table = nocufe_sequence(2, 3);
    const std::string noc = nocufe_csv(table);
    CHECK(noc.substr(0, 47) == "n,value,formula,ratio,eps_star,strongly_exposed");
    CHECK(std::count(noc.begin(), noc.end(), '\n') == 3);

    norms.pop_back();
    CHECK_THROWS_AS(cantor_trend_csv({}, norms), Error);
}

TEST_CASE("num_str renders doubles round trip and rationals as p/q") {
    CHECK(num_str(0.5) == "0.5");
    CHECK(num_str(Rational(7, 32)) == "7/32");
    CHECK(num_str(Rational(3)) == "3");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(num_str(x)) == x);
}
