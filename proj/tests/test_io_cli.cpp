#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "hbl/cli.hpp"
#include "hbl/error.hpp"
#include "hbl/io.hpp"
#include "support.hpp"

using namespace hbl;
using testing::data_path;

namespace {

const char* tiny_datum = R"({
  "dim": 2,
  "maps": [{"name": "a", "rows": [["2/4", 0]]}, {"name": "b", "rows": [["0", "1"]]}],
  "exponents": ["1", "1"]
})";

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("hbl_test_" + name)).string();
}

CommandConfig config(const std::string& command, const std::string& stem) {
    CommandConfig c;
    c.command = command;
    c.data = data_path(stem + ".datum.json");
    c.format = OutputFormat::json;
    return c;
}

nlohmann::json report(const RunResult& r) { return nlohmann::json::parse(r.output); }

}  // namespace

TEST_CASE("fixture files round trip byte for byte") {
    for (const auto& stem : testing::verified_fixtures()) {
        const std::string dtext = read_file(data_path(stem + ".datum.json"));
        const auto d = parse_datum(dtext);
        CHECK(serialize_datum(d) == dtext);
        const std::string ptext = read_file(data_path(stem + ".presentation.json"));
        const auto p = parse_presentation(ptext, d.dim(), d.size());
        CHECK(serialize_presentation(p) == ptext);
        CHECK(serialize_presentation(parse_presentation(serialize_presentation(p.canonical()))) ==
              serialize_presentation(p.canonical()));
    }
    for (const auto& name : {"r6_lines", "r6_seed"}) {
        const std::string text = read_file(data_path(std::string(name) + ".candidates.json"));
        CHECK(serialize_candidates(parse_candidates(text, 6)) == text);
    }
}

TEST_CASE("rationals are written reduced") {
    const auto d = parse_datum(tiny_datum);
    CHECK(d.map(0)(0, 0) == Rational(1, 2));
    const std::string out = serialize_datum(d);
    CHECK(out.find("\"1/2\"") != std::string::npos);
    CHECK(out.find("2/4") == std::string::npos);
}

TEST_CASE("parse errors name the problem and the line") {
    const std::string unknown = R"({
  "vertices": [
    {"id": "0", "basis": []},
    {"id": "H", "basis": [["1"]]}
  ],
  "edges": [
    {"from": "0", "to": "X", "theta": ["1"]}
  ]
})";
    try {
        parse_presentation(unknown, 1, 1);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'X'") != std::string::npos);
        CHECK(e.line() == 7);
    }

    const std::string bad_rational = R"({
  "dim": 1,
  "maps": [{"name": "a", "rows": [["1/0"]]}],
  "exponents": ["1"]
})";
    CHECK_THROWS_AS(parse_datum(bad_rational), ParseError);

    const std::string ragged = R"({
  "dim": 2,
  "maps": [{"name": "a", "rows": [["1", "0"], ["1"]]}],
  "exponents": ["1"]
})";
    CHECK_THROWS_AS(parse_datum(ragged), ParseError);

    const std::string wide = R"({
  "vertices": [{"id": "0", "basis": []}, {"id": "H", "basis": [["1"]]}],
  "edges": [{"from": "0", "to": "H", "theta": ["1", "0"]}]
})";
    try {
        parse_presentation(wide, 1, 1);
        FAIL("expected a width error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("width mismatch") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_datum("{\"dim\": 1,"), ParseError);
    const std::string dup = R"({
  "vertices": [{"id": "0", "basis": []}, {"id": "0", "basis": [["1"]]}],
  "edges": []
})";
    CHECK_THROWS_AS(parse_presentation(dup, 1, 1), ParseError);
}

TEST_CASE("verify command") {
    auto c = config("verify", "r6");
    c.presentation = data_path("r6.presentation.json");
    const auto r = run(c);
    CHECK(r.status == 0);
    const auto j = report(r);
    CHECK(j["verdict"] == "valid");

    c.format = OutputFormat::dot;
    const auto dot = run(c);
    CHECK(dot.status == 0);
    CHECK(dot.output.rfind("digraph", 0) == 0);

    // A presentation for different data: dimension mismatch is a negative verdict, not an error.
    auto wrong = config("verify", "lw_d2");
    wrong.presentation = data_path("lw_d3.presentation.json");
    CHECK(run(wrong).status != 0);
}

TEST_CASE("check-data command") {
    const auto bad = run(config("check-data", "lw3_violating"));
    CHECK(bad.status == 1);
    const auto j = report(bad);
    CHECK(j["verdict"] == "infeasible");
    CHECK(j["violation"]["slack"] == "-1/4");

    const auto scaling = run(config("check-data", "lw3_scaling"));
    CHECK(scaling.status == 1);

    const auto ok = run(config("check-data", "lw_d2"));
    CHECK(ok.status == 0);
    CHECK(report(ok)["lattice"]["size"] == 8);
}

TEST_CASE("polytope command") {
    auto c = config("polytope", "r6");
    c.candidates = data_path("r6_lines.candidates.json");
    const auto r = run(c);
    CHECK(r.status == 0);
    const auto j = report(r);
    REQUIRE(j["vertices"].size() == 1);
    CHECK(j["vertices"][0] == nlohmann::json::array({"1/2", "1/2", "1/2", "1/2"}));
}

TEST_CASE("build command writes a presentation that verifies") {
    const std::string out = temp_path("lw_build.presentation.json");
    auto c = config("build", "lw_d2");
    c.out = out;
    const auto r = run(c);
    REQUIRE(r.status == 0);
    auto v = config("verify", "lw_d2");
    v.presentation = out;
    CHECK(run(v).status == 0);
    std::remove(out.c_str());

    const auto bad = run(config("build", "lw3_violating"));
    CHECK(bad.status == 1);
}

TEST_CASE("remaining commands") {
    auto b = config("bound", "r6");
    b.presentation = data_path("r6.presentation.json");
    CHECK(run(b).status == 0);

    auto f = config("decompose-flow", "r6");
    f.presentation = data_path("r6.presentation.json");
    const auto fr = run(f);
    CHECK(fr.status == 0);
    CHECK(report(fr)["terms"].size() == 2);

    auto p = config("project", "r6");
    p.presentation = data_path("r6.presentation.json");
    p.map = 3;
    const auto pr = run(p);
    CHECK(pr.status == 0);
    CHECK(report(pr)["mass_preserved"] == true);

    auto g = config("gaussian", "lw_d2");
    g.presentation = data_path("lw_d2.presentation.json");
    g.samples = 20;
    g.iterations = 200;
    CHECK(run(g).status == 0);
    auto gv = config("gaussian", "lw3_violating");
    gv.iterations = 200;
    CHECK(run(gv).status == 1);

    auto q = config("quadrature", "lw_d2");
    q.grids = std::vector<std::string>(3, data_path("unit_square.grid"));
    const auto qr = run(q);
    CHECK(qr.status == 0);
    CHECK(report(qr)["holds"] == true);

    auto e = config("export-dot", "lw_d2");
    e.presentation = data_path("lw_d2.presentation.json");
    CHECK(run(e).output.rfind("digraph", 0) == 0);
}

TEST_CASE("usage and input errors exit with status 2") {
    auto missing = config("verify", "r6");
    CHECK(run(missing).status == 2);  // no presentation given

    auto nofile = config("check-data", "does_not_exist");
    CHECK(run(nofile).status == 2);

    CommandConfig unknown;
    unknown.command = "frobnicate";
    CHECK(run(unknown).status == 2);

    auto no_map = config("project", "r6");
    no_map.presentation = data_path("r6.presentation.json");
    CHECK(run(no_map).status == 2);
}

TEST_CASE("reports are deterministic") {
    for (const auto& cmd : {"check-data", "build", "gaussian"}) {
        auto c = config(cmd, "r6");
        c.candidates = data_path("r6_seed.candidates.json");
        c.iterations = 100;
        c.samples = 10;
        if (std::string(cmd) == "gaussian") c.presentation = data_path("r6.presentation.json");
        const auto a = run(c), b = run(c);
        CHECK(a.status == b.status);
        CHECK(a.output == b.output);
    }
}
