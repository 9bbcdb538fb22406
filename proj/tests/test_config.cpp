#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cosserat/config.hpp"
#include "cosserat/runner.hpp"

using namespace cosserat;

TEST_CASE("expression parser") {
  Expression e = Expression::parse("1 + x1^2 * sin(x2) - 3/2", 2);
  const Vec x{2.0, 0.5};
  CHECK(e.eval(x) == doctest::Approx(1.0 + 4.0 * std::sin(0.5) - 1.5));

  CHECK(Expression::parse("-x^2", 1).eval({3.0}) == doctest::Approx(-9.0));
  CHECK(Expression::parse("2^3^2", 1).eval({0.0}) == doctest::Approx(512.0)); // right assoc
  CHECK(Expression::parse("exp(log(5))", 1).eval({0.0}) == doctest::Approx(5.0));
  CHECK(Expression::parse("pi", 1).eval({0.0}) == doctest::Approx(std::acos(-1.0)));
  CHECK(Expression::parse("y + z", 3).eval({0.0, 2.0, 3.0}) == doctest::Approx(5.0));
  CHECK(Expression::parse("1e-3 * x1", 1).eval({2.0}) == doctest::Approx(2e-3));

  CHECK_THROWS_AS(Expression::parse("x3", 2), Error);      // unknown variable
  CHECK_THROWS_AS(Expression::parse("sin 3", 1), Error);   // missing parentheses
  CHECK_THROWS_AS(Expression::parse("1 +", 1), Error);     // dangling operator
  CHECK_THROWS_AS(Expression::parse("(1", 1), Error);      // unbalanced
  CHECK_THROWS_AS(Expression::parse("foo(1)", 1), Error);  // unknown function
}

TEST_CASE("matrix expressions") {
  MatrixExpr a({"1", "x2", "0", "1"}, 2);
  Mat m = a.eval({0.0, 0.7});
  CHECK(m(0, 1) == doctest::Approx(0.7));
  CHECK(m(1, 1) == 1.0);
  CHECK_THROWS_AS(MatrixExpr({"1", "2"}, 2), Error); // wrong entry count
}

TEST_CASE("toml subset parser") {
  const std::string text = R"(
# comment
title = "demo"  # trailing comment
[chart]
dim = 2
box = [[0.0, 1.0], [0.0, 2.5]]
flag = true
)";
  auto kv = parse_toml(text);
  CHECK(kv.at("title").str() == "demo");
  CHECK(kv.at("chart.dim").num() == 2.0);
  CHECK(kv.at("chart.flag").boolean());
  CHECK(kv.at("chart.box").array()[1].array()[1].num() == 2.5);

  CHECK_THROWS_AS(parse_toml("key"), Error);
  CHECK_THROWS_AS(parse_toml("[t\nk = 1"), Error);
  CHECK_THROWS_AS(parse_toml("k = [1, 2"), Error);
  CHECK_THROWS_AS(parse_toml("k = 1\nk = 2"), Error);
}

TEST_CASE("minimal config gets defaults") {
  RunConfig cfg = parse_config_text("[chart]\ndim = 1\n[medium]\nname = \"micro_only\"\n");
  CHECK(cfg.chart.dim == 1);
  CHECK(cfg.chart.box.size() == 1);
  CHECK(cfg.chart.box[0].first == 0.0);
  CHECK(cfg.chart.box[0].second == 1.0);
  CHECK(cfg.tolerances.fd_step == 1e-5);
  CHECK(cfg.sampler.num_deformations == 64);
  CHECK(cfg.grid == 5);
}

TEST_CASE("config rejections carry the key path") {
  // box with lo >= hi
  try {
    parse_config_text("[chart]\ndim = 1\nbox = [[2.0, 1.0]]\n[medium]\nname = \"micro_only\"\n");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("chart.box") != std::string::npos);
  }
  // unknown key
  try {
    parse_config_text("[chart]\ndim = 1\nbogus = 3\n[medium]\nname = \"micro_only\"\n");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("chart.bogus") != std::string::npos);
  }
  // medium requires exactly one of name/plugin
  CHECK_THROWS_AS(parse_config_text("[chart]\ndim = 1\n"), Error);
  CHECK_THROWS_AS(
      parse_config_text("[medium]\nname = \"micro_only\"\nplugin = \"also\"\n"), Error);
  // implant without its field
  CHECK_THROWS_AS(parse_config_text("[chart]\ndim = 2\n[medium]\nname = \"implant\"\n"), Error);
  // z0 outside the box
  CHECK_THROWS_AS(parse_config_text("[chart]\ndim = 1\n[medium]\nname = \"micro_only\"\n"
                                    "[run]\nz0 = [4.0]\n"),
                  Error);
}

TEST_CASE("implant expressions round-trip through the config") {
  RunConfig cfg = parse_config_text(
      "[chart]\ndim = 2\nbox = [[1.0, 2.0], [1.0, 2.0]]\n"
      "[medium]\nname = \"implant\"\nA = [\"1\", \"x2\", \"0\", \"1\"]\n");
  ResponseFunction w = medium_from_config(cfg);
  CHECK(w.d == 4);
  // W(jet) = Q A(x)^-1: at Q = A(x) the output is the identity
  MatrixExpr a(cfg.medium.implant_entries, 2);
  const Vec x{1.3, 1.8};
  Vec out = w.eval(x, Mat::identity(2), a.eval(x), Tensor3(2));
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(out[3] == doctest::Approx(1.0));
}

TEST_CASE("plug-in registry") {
  clear_plugin_responses();
  RunConfig cfg = parse_config_text("[chart]\ndim = 1\n[medium]\nplugin = \"demo\"\n");
  CHECK_THROWS_AS(medium_from_config(cfg), Error); // not registered yet

  ResponseFunction w;
  w.n = 1;
  w.d = 1;
  w.name = "demo";
  w.eval = [](const Vec&, const Mat&, const Mat& q, const Tensor3&) { return Vec{q(0, 0)}; };
  register_plugin_response("demo", w);
  ResponseFunction got = medium_from_config(cfg);
  CHECK(got.d == 1);
  clear_plugin_responses();
}

TEST_CASE("CSV parallelism loads onto the grid") {
  BodyChart chart;
  chart.dim = 1;
  chart.box = {{0.0, 1.0}};
  const char* path = "test_parallelism.csv";
  {
    std::ofstream out(path);
    out << "x1,P11,Q11,R111\n";
    for (int k = 0; k < 3; ++k) {
      const double x = k * 0.5;
      out << x << "," << 1.0 + x << "," << 2.0 << "," << 2.0 << "\n";
    }
  }
  SampledParallelism sp = load_parallelism_csv(path, chart, {3});
  CHECK(sp.p_field()(Vec{0.5})(0, 0) == doctest::Approx(1.5));
  CHECK(sp.p_field()(Vec{0.25})(0, 0) == doctest::Approx(1.25)); // interpolated
  CHECK(sp.q_field()(Vec{0.9})(0, 0) == doctest::Approx(2.0));
  CHECK(sp.r_field()(Vec{0.1})(0, 0, 0) == doctest::Approx(2.0));
  std::remove(path);

  CHECK_THROWS_AS(load_parallelism_csv("missing_file.csv", chart, {3}), Error);
}

TEST_CASE("run_command: verdict exit codes and determinism") {
  const std::string text = "[chart]\ndim = 1\n[medium]\nname = \"micro_only\"\n"
                           "[tolerances]\nrng_seed = 9\n[sampler]\nnum_deformations = 8\n";
  RunConfig cfg = parse_config_text(text);
  const RunResult a = run_command("uniformity", cfg);
  CHECK(a.exit_code == 0);
  const RunResult b = run_command("uniformity", cfg);
  // byte-identical modulo the timings block
  auto strip = [](std::string s) {
    const auto at = s.find("\"timings\"");
    const auto end = s.find('}', at);
    s.erase(at, end - at + 1);
    return s;
  };
  CHECK(strip(a.report_json) == strip(b.report_json));

  const RunResult err = run_command("uniformity",
                                    parse_config_text("[chart]\ndim = 1\n[medium]\nplugin = \"nope\"\n"));
  CHECK(err.exit_code == 1);
  CHECK(err.report_json.find("error") != std::string::npos);

  const RunResult unknown = run_command("bogus", cfg);
  CHECK(unknown.exit_code == 1);

  // inconclusive verdicts exit 2: a candidate that misses tolerance is not
  // a proof of inhomogeneity
  RunConfig hcfg = parse_config_text(
      "[chart]\ndim = 1\n[medium]\nname = \"det_density\"\n"
      "[tolerances]\nrng_seed = 4\n[sampler]\nnum_deformations = 8\n"
      "[run]\ngrid = 3\n[candidate]\nkappa = [\"x1\"]\n");
  const RunResult inconclusive = run_command("homogeneity", hcfg);
  CHECK(inconclusive.exit_code == 2);
}

TEST_CASE("run_command: prolong over a CSV grid") {
  // constant fields P = 2, Q = 5 with R = 0 form a valid prolongation
  const char* path = "prolong_cmd.csv";
  {
    std::ofstream out(path);
    out << "x1,P11,Q11,R111\n";
    for (int k = 0; k < 5; ++k) out << 0.25 * k << ",2,5,0\n";
  }
  RunConfig cfg = parse_config_text(
      "[chart]\ndim = 1\n[medium]\nname = \"micro_only\"\n"
      "[prolong]\ncsv = \"prolong_cmd.csv\"\nnodes = [5]\n");
  const RunResult res = run_command("prolong", cfg);
  CHECK(res.exit_code == 0);
  CHECK(res.report_json.find("\"is_prolongation\": true") != std::string::npos);
  std::remove(path);
}

TEST_CASE("run_command: prolong over expression fields") {
  const std::string text =
      "[chart]\ndim = 1\nbox = [[0.0, 2.0]]\n[medium]\nname = \"micro_only\"\n"
      "[prolong]\nP = [\"1 + x1^2\"]\nQ = [\"3\"]\n";
  RunConfig cfg = parse_config_text(text);
  const RunResult res = run_command("prolong", cfg);
  CHECK(res.exit_code == 0);
  CHECK(res.report_json.find("\"is_prolongation\": true") != std::string::npos);
  CHECK(res.report_json.find("\"verdict\": \"not-integrable\"") != std::string::npos);
}
