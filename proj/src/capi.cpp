#include "cosserat/cosserat.h"

#include <cstring>
#include <new>
#include <string>

#include "cosserat/config.hpp"
#include "cosserat/jets.hpp"
#include "cosserat/runner.hpp"

using namespace cosserat;

struct cosserat_config {
  RunConfig cfg;
};

struct cosserat_report {
  int exit_code = 1;
  std::string json;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

cosserat_status status_from(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse: return COSSERAT_ERR_PARSE;
    case ErrorKind::Semantic:
    case ErrorKind::Domain:
    case ErrorKind::Composability:
    case ErrorKind::Insufficient: return COSSERAT_ERR_INVALID;
    case ErrorKind::Singular:
    case ErrorKind::Evaluation:
    case ErrorKind::FlowEscape: return COSSERAT_ERR_NUMERIC;
  }
  return COSSERAT_ERR_INTERNAL;
}

cosserat_status set_error(const char* msg, cosserat_status st) {
  g_last_error = msg ? msg : "";
  return st;
}

template <typename Fn>
cosserat_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return set_error(e.what(), status_from(e));
  } catch (const std::bad_alloc&) {
    return set_error("out of memory", COSSERAT_ERR_INTERNAL);
  } catch (const std::exception& e) {
    return set_error(e.what(), COSSERAT_ERR_INTERNAL);
  } catch (...) {
    return set_error("unknown failure", COSSERAT_ERR_INTERNAL);
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

} // namespace

extern "C" {

const char* cosserat_version(void) { return "0.1.0"; }

const char* cosserat_last_error(void) { return g_last_error.c_str(); }

cosserat_status cosserat_config_load(const char* path, cosserat_config** out) {
  if (!path || !out) return set_error("null argument", COSSERAT_ERR_INVALID);
  *out = nullptr;
  return guarded([&]() {
    auto* handle = new cosserat_config{parse_config_file(path)};
    *out = handle;
    return COSSERAT_OK;
  });
}

cosserat_status cosserat_config_parse(const char* text, cosserat_config** out) {
  if (!text || !out) return set_error("null argument", COSSERAT_ERR_INVALID);
  *out = nullptr;
  return guarded([&]() {
    auto* handle = new cosserat_config{parse_config_text(text)};
    *out = handle;
    return COSSERAT_OK;
  });
}

cosserat_status cosserat_config_set_seed(cosserat_config* cfg, uint64_t seed) {
  if (!cfg) return set_error("null config", COSSERAT_ERR_INVALID);
  cfg->cfg.tolerances.rng_seed = seed;
  cfg->cfg.sampler.seed = seed;
  return COSSERAT_OK;
}

cosserat_status cosserat_config_set_grid(cosserat_config* cfg, int grid) {
  if (!cfg) return set_error("null config", COSSERAT_ERR_INVALID);
  if (grid < 2 || grid > 64) return set_error("grid must be in [2, 64]", COSSERAT_ERR_INVALID);
  cfg->cfg.grid = grid;
  return COSSERAT_OK;
}

void cosserat_config_free(cosserat_config* cfg) { delete cfg; }

cosserat_status cosserat_register_response(const char* name, int dim, int out_dim,
                                           cosserat_response_fn fn, void* user) {
  if (!name || !fn) return set_error("null argument", COSSERAT_ERR_INVALID);
  if (dim < 1 || dim > 8 || out_dim < 1)
    return set_error("bad response dimensions", COSSERAT_ERR_INVALID);
  return guarded([&]() {
    ResponseFunction w;
    w.n = dim;
    w.d = out_dim;
    w.name = name;
    w.eval = [fn, user, out_dim](const Vec& x, const Mat& p, const Mat& q, const Tensor3& r) {
      Vec out(out_dim, 0.0);
      const int rc = fn(user, x.data(), p.data(), q.data(), r.data(), out.data());
      if (rc != 0) fail(ErrorKind::Evaluation, "plug-in response reported failure");
      return out;
    };
    register_plugin_response(name, std::move(w));
    return COSSERAT_OK;
  });
}

cosserat_status cosserat_run(const cosserat_config* cfg, const char* command,
                             cosserat_report** out) {
  if (!cfg || !command || !out) return set_error("null argument", COSSERAT_ERR_INVALID);
  *out = nullptr;
  return guarded([&]() {
    const RunResult res = run_command(command, cfg->cfg);
    auto* rep = new cosserat_report{res.exit_code, res.report_json, res.csv};
    *out = rep;
    return COSSERAT_OK;
  });
}

int cosserat_report_exit_code(const cosserat_report* rep) { return rep ? rep->exit_code : 1; }

const char* cosserat_report_json(const cosserat_report* rep) {
  return rep ? rep->json.c_str() : "";
}

const char* cosserat_report_csv(const cosserat_report* rep) { return rep ? rep->csv.c_str() : ""; }

void cosserat_report_free(cosserat_report* rep) { delete rep; }

cosserat_status cosserat_jet_compose(const char* g2_json, const char* g1_json, char** out_json) {
  if (!g2_json || !g1_json || !out_json) return set_error("null argument", COSSERAT_ERR_INVALID);
  *out_json = nullptr;
  return guarded([&]() {
    const Jet2 g2 = jet2_from_json(g2_json);
    const Jet2 g1 = jet2_from_json(g1_json);
    *out_json = dup_string(jet2_to_json(compose2(g2, g1)));
    return COSSERAT_OK;
  });
}

cosserat_status cosserat_jet_invert(const char* g_json, char** out_json) {
  if (!g_json || !out_json) return set_error("null argument", COSSERAT_ERR_INVALID);
  *out_json = nullptr;
  return guarded([&]() {
    *out_json = dup_string(jet2_to_json(invert2(jet2_from_json(g_json))));
    return COSSERAT_OK;
  });
}

cosserat_status cosserat_jet_identity(const double* x, int n, char** out_json) {
  if (!x || !out_json) return set_error("null argument", COSSERAT_ERR_INVALID);
  if (n < 1 || n > 8) return set_error("dimension must be in [1, 8]", COSSERAT_ERR_INVALID);
  *out_json = nullptr;
  return guarded([&]() {
    *out_json = dup_string(jet2_to_json(identity2(Vec(x, x + n))));
    return COSSERAT_OK;
  });
}

int cosserat_jet_is_holonomic(const char* g_json, double tol) {
  if (!g_json) {
    set_error("null argument", COSSERAT_ERR_INVALID);
    return -1;
  }
  try {
    return is_holonomic(jet2_from_json(g_json), tol) ? 1 : 0;
  } catch (const Error& e) {
    set_error(e.what(), status_from(e));
    return -1;
  } catch (const std::exception& e) {
    set_error(e.what(), COSSERAT_ERR_INTERNAL);
    return -1;
  }
}

void cosserat_string_free(char* s) { ::operator delete(s); }

} // extern "C"
