#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "quotrep/cli_app.hpp"
#include "quotrep/expr_parser.hpp"
#include "quotrep/serialize.hpp"

using namespace quotrep;

namespace {

int run(std::initializer_list<const char*> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::vector<const char*> argv{"quotrep"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("parse_expr spec cases") {
  ModuliParams p{2, 1, 0};
  ExprAst ast = parse_expr("f[1](1) a[0](1) |0>", p);
  REQUIRE(ast.word.tokens.size() == 2);
  CHECK(ast.word.tokens[0].kind == OpKind::F);
  CHECK(ast.word.tokens[0].index == 1);
  CHECK(ast.word.tokens[1].kind == OpKind::A);
  CHECK(ast.vacuum_target);

  CHECK_THROWS_AS(parse_expr("a[2](al1) |0>", p), ParseError);

  ExprAst m = parse_expr("m[1](w) |0>", p);
  CurveAlgebra alg(1);
  REQUIRE(m.word.tokens.size() == 1);
  CHECK(m.word.tokens[0].cap == alg.letter_class("c", alg.point()));

  // rational linear combinations
  ExprAst lin = parse_expr("a[0](2/3 al1 + w - 1) |0>", p);
  CurveClass expect = alg.letter_class("c", alg.alpha(1), Rational(2, 3));
  expect = alg.add(expect, alg.letter_class("c", alg.point()));
  expect = alg.add(expect, alg.letter_class("c", alg.unit(), -1));
  CHECK(lin.word.tokens[0].cap == expect);

  ExprAst file = parse_expr("h[0](w) @state.json", p);
  CHECK_FALSE(file.vacuum_target);
  CHECK(file.state_file == "state.json");
}

TEST_CASE("parse errors carry positions") {
  ModuliParams p{1, 0, 0};
  try {
    parse_expr("f[1](al1) |0>", p);  // no odd letters at genus zero
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse_expr("g[0](1) |0>", p), ParseError);
  CHECK_THROWS_AS(parse_expr("f[0](1)", p), ParseError);
  CHECK_THROWS_AS(parse_expr("f[0](1/0) |0>", p), ParseError);
  CHECK_THROWS_AS(parse_expr("|0>", p), ParseError);
}

TEST_CASE("state serialization round trip") {
  Engine eng({2, 2, 3});
  const CurveAlgebra& alg = eng.algebra();
  std::mt19937 rng(3);
  auto basis = enumerate_basis(2, 2, 2);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    FockState s = basis_state(2, basis[pick(rng)], frac(trial + 1, 7));
    s.add_scaled(basis_state(2, basis[pick(rng)], frac(-3, 2)), 1);
    // also exercise open labels
    FockState open = eng.apply_open(OpKind::A, 1, "t", s);
    for (const FockState& state : {s, open}) {
      Json j = state_to_json(alg, state);
      FockState back = state_from_json(alg, j);
      CHECK(back == state);
    }
  }
}

TEST_CASE("cli betti matches the closed form and is deterministic") {
  std::string out1, out2;
  CHECK(run({"betti", "--rank", "2", "--genus", "0", "--dmax", "1"}, &out1) == 0);
  CHECK(run({"betti", "--rank", "2", "--genus", "0", "--dmax", "1"}, &out2) == 0);
  CHECK(out1 == out2);
  Json j = Json::parse(out1);
  CHECK(j["results"]["match"] == true);
  CHECK(j["results"]["tables"][1]["dim_enumerated"] ==
        Json::array({1, 0, 2, 0, 1}));

  std::string csv;
  CHECK(run({"betti", "--rank", "1", "--genus", "1", "--dmax", "1", "--format",
             "csv"}, &csv) == 0);
  CHECK(csv.rfind("d,degree,dim_enumerated,dim_closed_form\n", 0) == 0);
}

TEST_CASE("cli act evaluates the flagship example") {
  std::string out;
  CHECK(run({"act", "--rank", "1", "--genus", "0", "--deg-v", "3", "--expr",
             "f[1](1) a[0](1) |0>"}, &out) == 0);
  Json j = Json::parse(out);
  REQUIRE(j["results"]["state"].size() == 1);
  CHECK(j["results"]["state"][0]["coeff"] == "3");
  CHECK(j["results"]["state"][0]["slots"].empty());
}

TEST_CASE("cli act on a state file") {
  Engine eng({1, 0, 2});
  FockState one = eng.quot_unit(1);
  Json j = state_to_json(eng.algebra(), one);
  const char* path = "cli_state_test.json";
  {
    std::ofstream f(path);
    f << j.dump();
  }
  std::string out;
  CHECK(run({"act", "--rank", "1", "--genus", "0", "--deg-v", "2", "--expr",
             std::string("f[1](1) @" + std::string(path)).c_str()}, &out) == 0);
  Json res = Json::parse(out);
  REQUIRE(res["results"]["state"].size() == 1);
  CHECK(res["results"]["state"][0]["coeff"] == "2");
  std::remove(path);
}

TEST_CASE("cli check and exit codes") {
  std::string out, err;
  CHECK(run({"check", "--rank", "1", "--genus", "1", "--deg-v", "1", "--dmax", "1",
             "--relations", "EF,MM"}, &out) == 0);
  Json j = Json::parse(out);
  CHECK(j["results"]["pass"] == true);

  // the default relation list runs every family
  CHECK(run({"check", "--rank", "1", "--genus", "0", "--deg-v", "2", "--dmax", "1",
             "--threads", "2"}, &out) == 0);
  Json all = Json::parse(out);
  CHECK(all["results"]["relations"].size() == 10);
  CHECK(all["results"]["pass"] == true);

  CHECK(run({"check", "--rank", "0"}, &out, &err) == 2);
  CHECK(run({"frobnicate"}, &out, &err) == 2);
  CHECK(run({"act", "--rank", "2", "--genus", "0", "--expr", "a[5](1) |0>"}, &out,
            &err) == 2);
  CHECK(err.find("usage error") != std::string::npos);
  CHECK(run({"check", "--rank", "1", "--format", "csv"}, &out, &err) == 2);
}

TEST_CASE("cli surfaces fuel exhaustion") {
  std::string out, err;
  int rc = run({"check", "--rank", "2", "--genus", "2", "--deg-v", "3", "--dmax",
                "2", "--relations", "EE", "--fuel", "20"}, &out, &err);
  CHECK(rc == 1);
  CHECK(err.find("fuel exhausted") != std::string::npos);
}

TEST_CASE("cli matrix output") {
  std::string out;
  CHECK(run({"matrix", "--rank", "1", "--genus", "0", "--deg-v", "3", "--expr",
             "a[0](1) |0>", "--dmax", "0"}, &out) == 0);
  Json j = Json::parse(out);
  REQUIRE(j["results"]["matrices"].size() == 1);
  CHECK(j["results"]["matrices"][0]["entries"].size() == 1);
}
