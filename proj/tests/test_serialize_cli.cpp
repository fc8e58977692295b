#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "convalg/serialize.hpp"
#include "convalg/verify.hpp"

using namespace convalg;

namespace {

const std::string kCli = CONVALG_CLI;
const std::string kFixtures = CONVALG_FIXTURES;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(const std::string& args) {
  static int counter = 0;
  const std::string base = "/tmp/convalg_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const std::string cmd = kCli + " " + args + " > " + base + ".out 2> " + base + ".err";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(base + ".out");
  r.err = slurp(base + ".err");
  std::remove((base + ".out").c_str());
  std::remove((base + ".err").c_str());
  return r;
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("operator files round-trip") {
  for (const char* name : {"identity_n2_d2.json", "op_n2_d2.json", "schur_ab.json", "table_n1_d1.json"}) {
    const auto op = parse_operator(slurp(fixture(name)));
    const auto text = dump_operator(op);
    CHECK(parse_operator(text) == op);
    CHECK(dump_operator(parse_operator(text)) == text);
  }
}

TEST_CASE("polynomial and table encodings") {
  const auto op = parse_operator(slurp(fixture("table_n1_d1.json")));
  const auto* f = op.find(IntMatrix::from_rows({{1}}));
  REQUIRE(f != nullptr);
  CHECK(f->evaluate_indices({{0}}) == 2);
  CHECK(f->evaluate_indices({{1}}) == 0);
  CHECK(f->evaluate_indices({{2}}) == Rational(-1, 3));
  const auto j = to_json(op);
  // zero records are omitted
  CHECK(j["terms"][0]["function"]["table"].size() == 2);
  CHECK(to_json(Rational(-3, 4)) == "-3/4");
  CHECK(to_json(Complex(1.5, -2.0)) == Json::array({1.5, -2.0}));
  CHECK(to_json(IntMatrix::from_rows({{1, 2}, {0, 3}})) == Json::parse("[[1,2],[0,3]]"));
  CHECK(to_json(Composition({2, 0, 1})) == Json::parse("[2,0,1]"));
  const auto m = to_json(rep_matrix(TorsionPoint(0, 1, 3), 1));
  CHECK(m["modulus"] == 3);
  CHECK(m["columns"].size() == 3);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_operator(slurp(fixture("malformed.json"))), ParseError);
  CHECK_THROWS_AS(parse_operator(slurp(fixture("bad_schema.json"))), ParseError);
  CHECK_THROWS_AS(parse_operator(R"({"ground": {"kind": "finite_set", "points": ["1", "1"]}, "terms": []})"), ParseError);
  CHECK_THROWS_AS(parse_operator(R"({"ground": {"kind": "exact_line"}, "terms": [{"matrix": [[1]], "function": {"polynomial": [[[[1]], "1/0"]]}}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_operator(R"({"ground": {"kind": "torus"}, "terms": []})"), ParseError);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("schur") {
  const auto r = run("schur --n 2 --d 2");
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["basis_size"] == 10);
  CHECK(j["associative"] == true);
  const auto t = Json::parse(run("schur --n 1 --d 3").out);
  CHECK(t["basis_size"] == 1);
  CHECK(t["structure_constants"].size() == 1);
  CHECK(run("schur --n 2 --d 3").code == 0);
  CHECK(run("schur --n 4 --d 2").code == 3);
}

TEST_CASE("compose") {
  const auto id = run("compose " + fixture("identity_n2_d2.json") + " " + fixture("op_n2_d2.json"));
  REQUIRE(id.code == 0);
  CHECK(id.out == dump_operator(parse_operator(slurp(fixture("op_n2_d2.json")))));

  const auto ab = run("compose " + fixture("schur_a.json") + " " + fixture("schur_b.json"));
  REQUIRE(ab.code == 0);
  CHECK(parse_operator(ab.out) == parse_operator(slurp(fixture("schur_ab.json"))));

  const auto bad = run("compose " + fixture("malformed.json") + " " + fixture("op_n2_d2.json"));
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(bad.out.empty());
  CHECK(run("compose " + fixture("table_n1_d1.json") + " " + fixture("table_other_ground.json")).code == 3);
  CHECK(run("compose " + fixture("op_n2_d2.json") + " " + fixture("table_n1_d1.json")).code == 3);
  CHECK(run("compose /nonexistent.json " + fixture("op_n2_d2.json")).code == 2);
}

TEST_CASE("verify") {
  const auto cybe = run("verify cybe --n 2 --c 1 --tau 0,1 --seed 7");
  CHECK(cybe.code == 0);
  const auto j = Json::parse(cybe.out);
  CHECK(j["pass"] == true);
  CHECK(j["max_residual"].get<double>() < 1e-8);
  CHECK(j["parameters"]["seed"] == 7);
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("anchor"));
    CHECK(c.contains("residual"));
  }
  CHECK(run("verify tau --n 2 --d 2").code == 0);
  CHECK(run("verify bruhat --d 4").code == 0);
  CHECK(run("verify no-such-suite").code == 4);
  CHECK(run("verify cybe --tau nonsense").code == 4);
  CHECK(run("verify cybe --tol -1").code == 4);
  CHECK(run("").code == 4);
  CHECK(run("verify cybe --n 12").code == 3);
}

TEST_CASE("identical configuration gives identical reports apart from the timestamp") {
  for (const char* args : {"verify cybe --n 3 --c 2 --seed 11", "verify oracle --seed 3", "verify en"}) {
    auto a = Json::parse(run(args).out), b = Json::parse(run(args).out);
    a.erase("timestamp");
    b.erase("timestamp");
    CHECK(a.dump() == b.dump());
  }
}

TEST_CASE("--in and --out") {
  const std::string cfg = "/tmp/convalg_cli_cfg_" + std::to_string(::getpid()) + ".json";
  const std::string out = "/tmp/convalg_cli_out_" + std::to_string(::getpid()) + ".json";
  std::ofstream(cfg) << R"({"n": 3, "c": 2, "tau": [0.3, 1.1], "seed": 5})";
  const auto r = run("verify cybe --in " + cfg + " --out " + out);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const auto j = Json::parse(slurp(out));
  CHECK(j["parameters"]["n"] == 3);
  CHECK(j["parameters"]["c"] == 2);
  CHECK(j["parameters"]["seed"] == 5);
  std::ofstream(cfg) << "{not json";
  CHECK(run("verify cybe --in " + cfg).code == 2);
  std::remove(cfg.c_str());
  std::remove(out.c_str());
}

}  // TEST_SUITE
