// Exercises the shared-library surface exactly as an external C caller would.

#include <doctest.h>

#include <cstring>
#include <string>

#include "cosserat/cosserat.h"

namespace {

int scaled_q_response(void* user, const double* /*x*/, const double* /*P*/, const double* Q,
                      const double* /*R*/, double* out) {
  const double scale = *static_cast<double*>(user);
  out[0] = scale * Q[0]; // n = 1
  return 0;
}

} // namespace

TEST_CASE("version and error strings") {
  CHECK(std::strlen(cosserat_version()) > 0);
  CHECK(cosserat_config_load(nullptr, nullptr) == COSSERAT_ERR_INVALID);
  CHECK(std::strlen(cosserat_last_error()) > 0);
}

TEST_CASE("config parse, overrides, and run") {
  const char* text = "[chart]\ndim = 1\n[medium]\nname = \"micro_only\"\n";
  cosserat_config* cfg = nullptr;
  REQUIRE(cosserat_config_parse(text, &cfg) == COSSERAT_OK);
  REQUIRE(cfg != nullptr);
  CHECK(cosserat_config_set_seed(cfg, 123) == COSSERAT_OK);
  CHECK(cosserat_config_set_grid(cfg, 3) == COSSERAT_OK);
  CHECK(cosserat_config_set_grid(cfg, 1) == COSSERAT_ERR_INVALID);

  cosserat_report* rep = nullptr;
  REQUIRE(cosserat_run(cfg, "axioms", &rep) == COSSERAT_OK);
  CHECK(cosserat_report_exit_code(rep) == 0);
  const std::string json = cosserat_report_json(rep);
  CHECK(json.find("\"verdict\": \"pass\"") != std::string::npos);
  CHECK(json.find("\"seed\": 123") != std::string::npos);
  CHECK(std::string(cosserat_report_csv(rep)).empty());
  cosserat_report_free(rep);

  cosserat_report* bad = nullptr;
  REQUIRE(cosserat_run(cfg, "no_such_command", &bad) == COSSERAT_OK);
  CHECK(cosserat_report_exit_code(bad) == 1);
  cosserat_report_free(bad);

  cosserat_config_free(cfg);

  cosserat_config* broken = nullptr;
  CHECK(cosserat_config_parse("key without value", &broken) == COSSERAT_ERR_PARSE);
  CHECK(broken == nullptr);
}

TEST_CASE("plug-in response drives an analysis") {
  static double scale = 2.0;
  REQUIRE(cosserat_register_response("scaled_q", 1, 1, scaled_q_response, &scale) == COSSERAT_OK);
  const char* text = "[chart]\ndim = 1\n[medium]\nplugin = \"scaled_q\"\n"
                     "[sampler]\nnum_deformations = 8\n";
  cosserat_config* cfg = nullptr;
  REQUIRE(cosserat_config_parse(text, &cfg) == COSSERAT_OK);
  cosserat_report* rep = nullptr;
  REQUIRE(cosserat_run(cfg, "uniformity", &rep) == COSSERAT_OK);
  // W = 2 Q is still micropolar-only: uniform
  CHECK(cosserat_report_exit_code(rep) == 0);
  CHECK(std::string(cosserat_report_json(rep)).find("\"verdict\": \"uniform\"") !=
        std::string::npos);
  cosserat_report_free(rep);
  cosserat_config_free(cfg);

  CHECK(cosserat_register_response(nullptr, 1, 1, scaled_q_response, &scale) ==
        COSSERAT_ERR_INVALID);
}

TEST_CASE("jet utilities over the JSON encoding") {
  const double x0[1] = {0.0};
  char* id_json = nullptr;
  REQUIRE(cosserat_jet_identity(x0, 1, &id_json) == COSSERAT_OK);
  CHECK(cosserat_jet_is_holonomic(id_json, 1e-12) == 1);

  // the n = 1 worked example: (2,3,5) . (7,11,13)-style composition
  const char* g1 = R"({"n":1,"x":[0.0],"y":[0.0],"P":[[2.0]],"Q":[[3.0]],"R":[[[5.0]]]})";
  const char* g2 = R"({"n":1,"x":[0.0],"y":[0.0],"P":[[7.0]],"Q":[[11.0]],"R":[[[13.0]]]})";
  char* prod = nullptr;
  REQUIRE(cosserat_jet_compose(g2, g1, &prod) == COSSERAT_OK);
  const std::string prod_s = prod;
  CHECK(prod_s.find("\"P\":[[14.0]]") != std::string::npos);
  CHECK(prod_s.find("\"Q\":[[33.0]]") != std::string::npos);
  CHECK(prod_s.find("113.0") != std::string::npos);
  CHECK(cosserat_jet_is_holonomic(prod, 1e-9) == 0);

  char* inv = nullptr;
  REQUIRE(cosserat_jet_invert(g1, &inv) == COSSERAT_OK);
  char* round = nullptr;
  REQUIRE(cosserat_jet_compose(inv, g1, &round) == COSSERAT_OK);
  const std::string round_s = round;
  CHECK(round_s.find("\"P\":[[1.0]]") != std::string::npos);
  CHECK(round_s.find("\"Q\":[[1.0]]") != std::string::npos);

  char* bad = nullptr;
  CHECK(cosserat_jet_compose("{oops", g1, &bad) == COSSERAT_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(cosserat_jet_is_holonomic("{oops", 1e-9) == -1);

  cosserat_string_free(id_json);
  cosserat_string_free(prod);
  cosserat_string_free(inv);
  cosserat_string_free(round);
}
