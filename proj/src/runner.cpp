#include "cosserat/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "cosserat/algebroid.hpp"
#include "cosserat/gstructure.hpp"
#include "cosserat/prolongation.hpp"

namespace cosserat {

namespace {

using nlohmann::json;

int thread_budget() {
  if (const char* env = std::getenv("COSSERAT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(std::min(hw, 8u)) : 1;
}

// index-slotted parallel loop: results land in preassigned slots, so the
// outcome does not depend on the thread count
void parallel_for(int count, const std::function<void(int)>& body) {
  const int threads = std::min(thread_budget(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  for (auto& th : pool) th.join();
}

json point_json(const Vec& x) { return json(x); }

json config_echo(const RunConfig& cfg) {
  json j;
  j["chart"]["dim"] = cfg.chart.dim;
  std::vector<std::vector<double>> box;
  for (const auto& [lo, hi] : cfg.chart.box) box.push_back({lo, hi});
  j["chart"]["box"] = box;
  j["medium"]["name"] = cfg.medium.name;
  j["medium"]["plugin"] = cfg.medium.is_plugin;
  if (!cfg.medium.implant_entries.empty()) j["medium"]["A"] = cfg.medium.implant_entries;
  j["tolerances"]["fd_step"] = cfg.tolerances.fd_step;
  j["tolerances"]["abs_tol"] = cfg.tolerances.abs_tol;
  j["tolerances"]["rel_tol"] = cfg.tolerances.rel_tol;
  j["tolerances"]["max_iter"] = cfg.tolerances.max_iter;
  j["tolerances"]["rng_seed"] = cfg.tolerances.rng_seed;
  j["sampler"]["num_deformations"] = cfg.sampler.num_deformations;
  j["sampler"]["jet_scale"] = cfg.sampler.jet_scale;
  j["sampler"]["seed"] = cfg.sampler.seed;
  j["sampler"]["exhaustive_stencil"] = cfg.sampler.exhaustive_stencil;
  j["run"]["grid"] = cfg.grid;
  if (cfg.z0) j["run"]["z0"] = *cfg.z0;
  if (!cfg.points.empty()) {
    json pts = json::array();
    for (const Vec& p : cfg.points) pts.push_back(p);
    j["run"]["points"] = pts;
  }
  if (!cfg.candidate_kappa.empty()) j["candidate"]["kappa"] = cfg.candidate_kappa;
  if (!cfg.candidate_frame.empty()) j["candidate"]["frame"] = cfg.candidate_frame;
  if (!cfg.prolong_p.empty()) j["prolong"]["P"] = cfg.prolong_p;
  if (!cfg.prolong_q.empty()) j["prolong"]["Q"] = cfg.prolong_q;
  return j;
}

Vec default_z0(const RunConfig& cfg) { return cfg.z0 ? *cfg.z0 : cfg.chart.center(); }

std::vector<Vec> default_points(const RunConfig& cfg) {
  if (!cfg.points.empty()) return cfg.points;
  // box diagonal: lo corner, centre, hi corner
  return {cfg.chart.corner_lo(), cfg.chart.center(), cfg.chart.corner_hi()};
}

double jet_gap(const Jet2& a, const Jet2& b) {
  double m = max_abs(a.P - b.P);
  m = std::max(m, max_abs(a.Q - b.Q));
  m = std::max(m, max_abs(a.R - b.R));
  for (std::size_t i = 0; i < a.source.size(); ++i) {
    m = std::max(m, std::fabs(a.source[i] - b.source[i]));
    m = std::max(m, std::fabs(a.target[i] - b.target[i]));
  }
  return m;
}

json run_axioms(const RunConfig& cfg, json& report) {
  BodyChart chart = cfg.chart;
  Rng rng = Rng::stream(cfg.tolerances.rng_seed, 0x6178696fu);
  const int trials = 200;
  double assoc = 0.0, unit = 0.0, inverse_law = 0.0, projection = 0.0;
  for (int t = 0; t < trials; ++t) {
    Jet2 a = random_jet2(rng, chart);
    Jet2 b = random_jet2(rng, chart);
    Jet2 c = random_jet2(rng, chart);
    b.target = a.source;
    c.target = b.source;
    assoc = std::max(assoc, jet_gap(compose2(compose2(a, b), c), compose2(a, compose2(b, c))));
    unit = std::max(unit, jet_gap(compose2(a, identity2(a.source)), a));
    unit = std::max(unit, jet_gap(compose2(identity2(a.target), a), a));
    inverse_law = std::max(inverse_law, jet_gap(compose2(invert2(a), a), identity2(a.source)));
    const Jet1 pf = compose1(project_frame(a), project_frame(b));
    projection = std::max(projection, max_abs(project_frame(compose2(a, b)).jac - pf.jac));
  }
  const double worst = std::max(std::max(assoc, unit), std::max(inverse_law, projection));
  report["residuals"]["associativity"] = assoc;
  report["residuals"]["unit_laws"] = unit;
  report["residuals"]["inverse_laws"] = inverse_law;
  report["residuals"]["projection_morphism"] = projection;
  report["residuals"]["max"] = worst;
  report["samples"]["triples"] = trials;
  report["verdict"] = worst <= 1e-9 ? "pass" : "fail";
  return report;
}

json run_prolong(const RunConfig& cfg, json& report) {
  const int n = cfg.chart.dim;
  Parallelism2 par;
  if (!cfg.prolong_csv.empty()) {
    std::vector<int> nodes = cfg.prolong_nodes;
    if (nodes.empty()) nodes.assign(n, cfg.grid);
    const SampledParallelism sp = load_parallelism_csv(cfg.prolong_csv, cfg.chart, nodes);
    par.chart = cfg.chart;
    par.P = sp.p_field();
    par.Q = sp.q_field();
    par.R = sp.r_field();
  } else {
    if (cfg.prolong_p.empty() || cfg.prolong_q.empty())
      fail(ErrorKind::Semantic, "prolong command needs prolong.P and prolong.Q (or prolong.csv)");
    const MatrixExpr pe(cfg.prolong_p, n);
    const MatrixExpr qe(cfg.prolong_q, n);
    par = prolong_parallelism(
        cfg.chart, [pe](const Vec& x) { return pe.eval(x); },
        [qe](const Vec& x) { return qe.eval(x); }, cfg.tolerances.fd_step);
  }

  SamplingPlan plan;
  plan.points_per_axis = cfg.grid;
  plan.seed = cfg.tolerances.rng_seed;
  const auto pts = lattice_points(cfg.chart, cfg.grid);
  std::vector<double> residuals(pts.size());
  parallel_for(int(pts.size()), [&](int i) {
    residuals[i] = prolongation_residual(par, pts[i], cfg.tolerances.fd_step);
  });
  double worst = 0.0;
  json field = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    worst = std::max(worst, residuals[i]);
    field.push_back({{"x", point_json(pts[i])}, {"residual", residuals[i]}});
  }
  const auto verdict =
      integrability_test_parallelism2(par, cfg.tolerances.abs_tol, plan, cfg.tolerances.fd_step);
  report["residuals"]["prolongation_max"] = worst;
  report["residuals"]["field"] = field;
  report["residuals"]["pq_gap"] = verdict.pq_gap;
  report["residuals"]["closedness"] = verdict.closedness_residual;
  report["samples"]["grid_points"] = pts.size();
  report["flags"]["is_prolongation"] = verdict.is_prolongation;
  report["flags"]["p_equals_q"] = verdict.p_equals_q;
  report["flags"]["q_section_integrable"] = verdict.q_section_integrable;
  report["verdict"] = verdict.integrable ? "integrable" : "not-integrable";
  return report;
}

json run_uniformity(const RunConfig& cfg, json& report) {
  const ResponseFunction w = medium_from_config(cfg);
  const auto points = default_points(cfg);
  const auto rep = uniformity_check(w, points, cfg.tolerances, cfg.sampler);
  json pairs = json::array();
  for (const auto& p : rep.pairs) {
    json pj;
    pj["x"] = point_json(p.x);
    pj["y"] = point_json(p.y);
    pj["residual"] = p.residual;
    pj["converged"] = p.converged;
    pj["certificate_of_failure"] = p.certificate_of_failure;
    pj["jet"] = json::parse(jet2_to_json(p.jet));
    pairs.push_back(std::move(pj));
  }
  report["residuals"]["max"] = rep.max_residual;
  report["residuals"]["pairs"] = pairs;
  report["samples"]["points"] = points.size();
  report["verdict"] = rep.verdict;
  return report;
}

json run_homogeneity(const RunConfig& cfg, json& report) {
  const ResponseFunction w = medium_from_config(cfg);
  std::optional<HomogeneityCandidate> cand;
  if (!cfg.candidate_kappa.empty()) {
    const VectorExpr kappa(cfg.candidate_kappa, cfg.chart.dim);
    MatrixField frame;
    if (!cfg.candidate_frame.empty()) {
      const MatrixExpr fe(cfg.candidate_frame, cfg.chart.dim);
      frame = [fe](const Vec& x) { return fe.eval(x); };
    } else {
      const int n = cfg.chart.dim;
      frame = [n](const Vec&) { return Mat::identity(n); };
    }
    cand = HomogeneityCandidate{[kappa](const Vec& x) { return kappa.eval(x); }, frame};
  }
  const auto rep = homogeneity_check(w, cfg.chart, cand, cfg.tolerances, cfg.sampler, cfg.grid);
  report["mode"] = rep.mode;
  report["samples"]["grid_points"] = rep.residual_field.size();
  report["residuals"]["max"] = rep.max_residual;
  json field = json::array();
  for (const auto& [x, r] : rep.residual_field)
    field.push_back({{"x", point_json(x)}, {"residual", r}});
  report["residuals"]["field"] = field;
  if (rep.closedness_residual) report["residuals"]["closedness"] = *rep.closedness_residual;
  if (rep.morphism_residual) report["residuals"]["morphism"] = *rep.morphism_residual;
  if (!rep.recovered_kappa.empty()) {
    json rk = json::array();
    for (const auto& [x, k] : rep.recovered_kappa)
      rk.push_back({{"x", point_json(x)}, {"kappa", point_json(k)}});
    report["recovered_kappa"] = rk;
  }
  if (rep.crystal) report["crystal"] = json::parse(jet2_to_json(*rep.crystal));
  if (!rep.note.empty()) report["note"] = rep.note;
  report["verdict"] = rep.verdict;
  return report;
}

json run_symmetry(const RunConfig& cfg, json& report) {
  const ResponseFunction w = medium_from_config(cfg);
  std::vector<Vec> pts = cfg.symmetry_points;
  if (pts.empty()) pts.push_back(default_z0(cfg));
  json out = json::array();
  double worst = 0.0;
  for (const Vec& x : pts) {
    const auto sym = symmetry_sample(w, x, cfg.sampler, cfg.tolerances.abs_tol);
    worst = std::max(worst, sym.max_accepted_residual);
    json sj;
    sj["x"] = point_json(x);
    sj["tested"] = sym.tested;
    sj["accepted"] = sym.accepted.size();
    sj["acceptance_rate"] = sym.acceptance_rate;
    sj["max_accepted_residual"] = sym.max_accepted_residual;
    json jets = json::array();
    const std::size_t keep = std::min<std::size_t>(sym.accepted.size(), 8);
    for (std::size_t i = 0; i < keep; ++i) jets.push_back(json::parse(jet2_to_json(sym.accepted[i])));
    sj["jets"] = jets;
    out.push_back(std::move(sj));
  }
  report["samples"]["points"] = out;
  report["residuals"]["max_accepted"] = worst;
  report["verdict"] = "sampled";
  return report;
}

std::string format_csv_row(const std::vector<double>& cells) {
  std::string row;
  char buf[40];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", cells[i]);
    row += buf;
    if (i + 1 < cells.size()) row += ",";
  }
  row += "\n";
  return row;
}

json run_obstruction(const RunConfig& cfg, json& report, std::string& csv) {
  const ResponseFunction w = medium_from_config(cfg);
  const int n = cfg.chart.dim;
  const Vec z0 = default_z0(cfg);
  const auto pts = lattice_points(cfg.chart, cfg.grid);

  // solve the uniformity jets x -> z0 over the lattice
  std::vector<PairSolve> solves;
  solves.reserve(pts.size());
  std::optional<Jet2> warm;
  for (const Vec& x : pts) {
    PairSolve ps = solve_material_jet(w, x, z0, cfg.tolerances, cfg.sampler, warm);
    if (ps.converged) warm = ps.jet;
    solves.push_back(std::move(ps));
  }
  bool all_ok = true;
  for (const auto& s : solves) all_ok = all_ok && s.converged;
  if (!all_ok)
    fail(ErrorKind::Domain, "obstruction map needs solvable uniformity at every grid point");

  std::vector<int> dims(n, cfg.grid);
  GridField fgrid(cfg.chart, dims, n * n);
  {
    std::size_t at = 0;
    std::vector<int> idx(n, 0);
    for (;;) {
      Vec flat(std::size_t(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) flat[i * n + j] = solves[at].jet.Q(i, j);
      fgrid.node_value(idx) = std::move(flat);
      ++at;
      int a = n - 1;
      while (a >= 0 && ++idx[a] == dims[a]) idx[a--] = 0;
      if (a < 0) break;
    }
  }
  auto unflat = [n](const Vec& v) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
    return m;
  };
  MatrixField f_field = [fgrid, unflat](const Vec& x) { return unflat(fgrid.eval(x)); };

  double cell = 1e300;
  for (int a = 0; a < n; ++a)
    cell = std::min(cell, (cfg.chart.box[a].second - cfg.chart.box[a].first) / (cfg.grid - 1));
  const double h = 0.25 * cell;

  // axis derivative of the interpolated field, one-sided at box walls
  const BodyChart chart_copy = cfg.chart;
  auto df_axis = [f_field, chart_copy](const Vec& x, int axis, double step) {
    const double lo = chart_copy.box[axis].first, hi = chart_copy.box[axis].second;
    if (x[axis] + step <= hi && x[axis] - step >= lo) {
      Vec xp = x, xm = x;
      xp[axis] += step;
      xm[axis] -= step;
      return (1.0 / (2 * step)) * (f_field(xp) - f_field(xm));
    }
    const double dir = (x[axis] + step > hi) ? -1.0 : 1.0;
    Vec x1 = x, x2 = x;
    x1[axis] += dir * step;
    x2[axis] += 2 * dir * step;
    return (dir / (2 * step)) * ((-3.0) * f_field(x) + 4.0 * f_field(x1) - f_field(x2));
  };

  // material connection Gamma = F^-1 dF of the solved micro-structure field
  ChristoffelField gamma{cfg.chart, [f_field, df_axis, h, n](const Vec& x) {
                           const Mat fi = inverse(f_field(x));
                           Tensor3 g(n);
                           for (int j = 0; j < n; ++j) {
                             const Mat gj = fi * df_axis(x, j, h);
                             for (int k = 0; k < n; ++k)
                               for (int i = 0; i < n; ++i) g(k, i, j) = gj(k, i);
                           }
                           return g;
                         }};

  // closedness residual of F and curvature of Gamma, per grid point
  std::vector<double> closed(pts.size()), curv(pts.size());
  parallel_for(int(pts.size()), [&](int i) {
    const Vec& x = pts[i];
    double c = 0.0;
    std::vector<Mat> df(n);
    for (int k = 0; k < n; ++k) df[k] = df_axis(x, k, h);
    for (int j = 0; j < n; ++j)
      for (int ii = 0; ii < n; ++ii)
        for (int k = ii + 1; k < n; ++k)
          c = std::max(c, std::fabs(df[k](j, ii) - df[ii](j, k)));
    closed[i] = c;
    curv[i] = curvature(gamma, x, h).max_abs();
  });

  csv.clear();
  for (int a = 0; a < n; ++a) csv += "x" + std::to_string(a + 1) + ",";
  csv += "closedness_residual,curvature_max_norm\n";
  double worst_closed = 0.0, worst_curv = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> cells = pts[i];
    cells.push_back(closed[i]);
    cells.push_back(curv[i]);
    csv += format_csv_row(cells);
    worst_closed = std::max(worst_closed, closed[i]);
    worst_curv = std::max(worst_curv, curv[i]);
  }
  report["residuals"]["closedness_max"] = worst_closed;
  report["residuals"]["curvature_max"] = worst_curv;
  report["samples"]["grid_points"] = pts.size();
  report["verdict"] = worst_closed <= 1e-3 ? "unobstructed" : "obstructed";
  return report;
}

} // namespace

RunResult run_command(const std::string& command, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  json report;
  report["command"] = command;
  report["config_echo"] = config_echo(cfg);
  report["seed"] = cfg.tolerances.rng_seed;
  RunResult out;
  try {
    if (command == "axioms") run_axioms(cfg, report);
    else if (command == "prolong") run_prolong(cfg, report);
    else if (command == "uniformity") run_uniformity(cfg, report);
    else if (command == "homogeneity") run_homogeneity(cfg, report);
    else if (command == "symmetry") run_symmetry(cfg, report);
    else if (command == "obstruction") run_obstruction(cfg, report, out.csv);
    else fail(ErrorKind::Semantic, "unknown command '" + command + "'");
  } catch (const Error& e) {
    report["error"]["message"] = e.what();
    report["error"]["kind"] = int(e.kind());
    report["verdict"] = "error";
    const auto t1 = std::chrono::steady_clock::now();
    report["timings"]["total_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    out.exit_code = 1;
    out.report_json = report.dump(2) + "\n";
    return out;
  }
  const auto t1 = std::chrono::steady_clock::now();
  report["timings"]["total_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  const std::string verdict = report["verdict"].get<std::string>();
  out.exit_code = verdict == "inconclusive" ? 2 : 0;
  out.report_json = report.dump(2) + "\n";
  return out;
}

} // namespace cosserat
