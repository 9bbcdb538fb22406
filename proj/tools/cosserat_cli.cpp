// Batch front-end over the C API: parse a config, run one analysis command,
// write the JSON report (and CSV grid for obstruction maps).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cosserat/cosserat.h"

namespace {

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return bool(out);
}

std::string derive_csv_path(const std::string& out_path) {
  if (out_path.empty()) return "obstruction.csv";
  const auto dot = out_path.find_last_of('.');
  if (dot == std::string::npos) return out_path + ".csv";
  return out_path.substr(0, dot) + ".csv";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cosserat - uniformity and homogeneity analysis of Cosserat media"};
  app.set_version_flag("--version", std::string(cosserat_version()));

  std::string command, config_path, out_path, csv_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int grid = 0;

  app.add_option("command", command,
                 "one of: axioms, prolong, uniformity, homogeneity, symmetry, obstruction")
      ->required();
  app.add_option("--config", config_path, "TOML config file")->required();
  app.add_option("--out", out_path, "write the JSON report here (default: stdout)");
  app.add_option("--csv", csv_path, "obstruction grid CSV path (default: derived from --out)");
  app.add_option("--seed", seed, "override the master RNG seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--grid", grid, "override the grid resolution per axis");

  CLI11_PARSE(app, argc, argv);

  cosserat_config* cfg = nullptr;
  if (cosserat_config_load(config_path.c_str(), &cfg) != COSSERAT_OK) {
    std::fprintf(stderr, "error: %s\n", cosserat_last_error());
    return 1;
  }
  if (seed_set && cosserat_config_set_seed(cfg, seed) != COSSERAT_OK) {
    std::fprintf(stderr, "error: %s\n", cosserat_last_error());
    cosserat_config_free(cfg);
    return 1;
  }
  if (grid > 0 && cosserat_config_set_grid(cfg, grid) != COSSERAT_OK) {
    std::fprintf(stderr, "error: %s\n", cosserat_last_error());
    cosserat_config_free(cfg);
    return 1;
  }

  cosserat_report* rep = nullptr;
  if (cosserat_run(cfg, command.c_str(), &rep) != COSSERAT_OK) {
    std::fprintf(stderr, "error: %s\n", cosserat_last_error());
    cosserat_config_free(cfg);
    return 1;
  }

  int rc = cosserat_report_exit_code(rep);
  const char* json = cosserat_report_json(rep);
  if (out_path.empty()) {
    std::fputs(json, stdout);
  } else if (!write_file(out_path, json)) {
    std::fprintf(stderr, "error: cannot write report to %s\n", out_path.c_str());
    rc = 1;
  }

  const char* csv = cosserat_report_csv(rep);
  if (csv && *csv) {
    const std::string path = csv_path.empty() ? derive_csv_path(out_path) : csv_path;
    if (!write_file(path, csv)) {
      std::fprintf(stderr, "error: cannot write CSV grid to %s\n", path.c_str());
      rc = 1;
    }
  }

  cosserat_report_free(rep);
  cosserat_config_free(cfg);
  return rc;
}
