#include "cosserat/material.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace cosserat {

Vec evaluate_response(const ResponseFunction& w, const Jet2& g) {
  Vec out = w.eval(g.source, g.P, g.Q, g.R);
  if (int(out.size()) != w.d)
    fail(ErrorKind::Evaluation, "response '" + w.name + "' returned wrong dimension");
  if (!all_finite(out))
    fail(ErrorKind::Evaluation, "response '" + w.name + "' returned non-finite values");
  return out;
}

void SamplerConfig::validate() const {
  if (num_deformations < 8) fail(ErrorKind::Semantic, "sampler.num_deformations must be >= 8");
  if (!(jet_scale > 0.0)) fail(ErrorKind::Semantic, "sampler.jet_scale must be > 0");
}

namespace {

std::uint64_t hash_point(const Vec& x) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (double v : x) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

int jet_param_count(int n) { return 2 * n * n + n * n * n; }

// jet coordinates <-> flat parameter vector (deltas from the identity jet)
Jet2 jet_from_params(const Vec& x, const Vec& y, const Vec& p) {
  const int n = int(x.size());
  Jet2 g;
  g.source = x;
  g.target = y;
  g.P = Mat::identity(n);
  g.Q = Mat::identity(n);
  g.R = Tensor3(n);
  int at = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.P(i, j) += p[at++];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.Q(i, j) += p[at++];
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) g.R(j, i, k) = p[at++];
  return g;
}

Vec params_from_jet(const Jet2& g) {
  const int n = g.dim();
  Vec p(jet_param_count(n));
  int at = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p[at++] = g.P(i, j) - (i == j ? 1.0 : 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p[at++] = g.Q(i, j) - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) p[at++] = g.R(j, i, k);
  return p;
}

} // namespace

std::vector<Jet2> deformation_samples(int n, const Vec& y, const SamplerConfig& cfg) {
  cfg.validate();
  std::vector<Jet2> out;
  const double s = cfg.jet_scale;
  if (cfg.exhaustive_stencil) {
    out.push_back(identity2(y));
    const double amp = std::min(s, 0.45); // keeps diagonal probes invertible
    const int np = jet_param_count(n);
    Vec p(np, 0.0);
    for (int c = 0; c < np; ++c) {
      p[c] = amp;
      out.push_back(jet_from_params(y, y, p));
      p[c] = -amp;
      out.push_back(jet_from_params(y, y, p));
      p[c] = 0.0;
    }
  }
  Rng rng = Rng::stream(cfg.seed, hash_point(y) ^ 0x64656621ull);
  for (int k = 0; k < cfg.num_deformations; ++k) {
    Jet2 h;
    h.source = y;
    h.target = y;
    h.R = Tensor3(n);
    auto draw = [&]() {
      Mat m = Mat::identity(n);
      for (;;) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) + rng.uniform(-s, s);
        if (std::fabs(det(m)) > 0.1) return m;
      }
    };
    h.P = draw();
    h.Q = draw();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int k2 = 0; k2 < n; ++k2) h.R(j, i, k2) = rng.uniform(-s, s);
    out.push_back(std::move(h));
  }
  return out;
}

namespace {

// invariance residual components for one candidate jet over a fixed
// probe set; stacked over probes and output components
Vec membership_residual(const ResponseFunction& w, const Jet2& g, const std::vector<Jet2>& probes) {
  Vec out;
  out.reserve(probes.size() * w.d);
  for (const Jet2& h : probes) {
    const Jet2 moved = compose2(h, g, 1e-6);
    const Vec a = evaluate_response(w, moved);
    const Vec b = evaluate_response(w, h);
    for (int c = 0; c < w.d; ++c) out.push_back(a[c] - b[c]);
  }
  return out;
}

} // namespace

MembershipResult is_material_isomorphism(const ResponseFunction& w, const Jet2& g,
                                         const SamplerConfig& cfg, double abs_tol) {
  check_valid(g, 1e-12);
  const auto probes = deformation_samples(w.n, g.target, cfg);
  const Vec r = membership_residual(w, g, probes);
  MembershipResult res;
  res.residual = max_abs(r);
  res.pass = res.residual <= abs_tol;
  return res;
}

SymmetrySampleResult symmetry_sample(const ResponseFunction& w, const Vec& x,
                                     const SamplerConfig& cfg, double abs_tol) {
  SymmetrySampleResult out;
  const int n = w.n;
  out.accepted.push_back(identity2(x));
  Rng rng = Rng::stream(cfg.seed, hash_point(x) ^ 0x73796d21ull);
  int accepted = 0, tested = 0;
  auto consider = [&](Jet2 cand) {
    if (std::fabs(det(cand.P)) < 0.1 || std::fabs(det(cand.Q)) < 0.1) return;
    ++tested;
    const MembershipResult res = is_material_isomorphism(w, cand, cfg, abs_tol);
    if (res.pass) {
      ++accepted;
      out.max_accepted_residual = std::max(out.max_accepted_residual, res.residual);
      out.accepted.push_back(std::move(cand));
    }
  };
  const double s = cfg.jet_scale;
  for (int k = 0; k < cfg.num_deformations; ++k) {
    // candidate families: full random, micro-only (Q = I), unimodular Q
    const int family = k % 3;
    Jet2 cand = identity2(x);
    auto fill = [&](Mat& m) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) + rng.uniform(-s, s);
    };
    fill(cand.P);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int k2 = 0; k2 < n; ++k2) cand.R(j, i, k2) = rng.uniform(-s, s);
    if (family == 0) {
      fill(cand.Q);
    } else if (family == 2) {
      fill(cand.Q);
      const double dq = det(cand.Q);
      if (std::fabs(dq) > 1e-8) {
        const double scale = std::pow(std::fabs(dq), -1.0 / n);
        cand.Q = scale * cand.Q; // unimodular up to sign
      }
    } // family 1 keeps Q = I
    consider(std::move(cand));
  }
  out.tested = tested;
  out.acceptance_rate = tested ? double(accepted) / tested : 0.0;
  return out;
}

PairSolve solve_material_jet(const ResponseFunction& w, const Vec& x, const Vec& y,
                             const ToleranceConfig& tol, const SamplerConfig& cfg,
                             const std::optional<Jet2>& warm_start) {
  const int n = w.n;
  const auto probes = deformation_samples(n, y, cfg);
  auto residual = [&](const Vec& p) {
    return membership_residual(w, jet_from_params(x, y, p), probes);
  };
  Vec guess(jet_param_count(n), 0.0);
  if (warm_start) guess = params_from_jet(*warm_start);

  ToleranceConfig lm = tol;
  lm.fd_step = 1e-6; // residuals are polynomial in the jet coordinates
  const LeastSquaresResult ls = solve_least_squares(residual, guess, lm);

  PairSolve out;
  out.x = x;
  out.y = y;
  out.jet = jet_from_params(x, y, ls.solution);
  out.residual = ls.residual_norm;
  out.converged = ls.converged;
  if (!ls.converged) {
    // jet-independent mismatch certificate: a component far from zero whose
    // gradient in every jet coordinate vanishes
    const Vec r = residual(ls.solution);
    const Mat jac = fd_jacobian(residual, ls.solution, 1e-5);
    const double floor = std::max(1e3 * tol.abs_tol, 1e-10);
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (std::fabs(r[c]) < floor) continue;
      double grad = 0.0;
      for (int q = 0; q < jac.cols(); ++q) grad = std::max(grad, std::fabs(jac(int(c), q)));
      if (grad <= 1e-6 * std::fabs(r[c])) {
        out.certificate_of_failure = true;
        break;
      }
    }
  }
  return out;
}

UniformityReport uniformity_check(const ResponseFunction& w, const std::vector<Vec>& points,
                                  const ToleranceConfig& tol, const SamplerConfig& cfg) {
  if (points.size() < 2) fail(ErrorKind::Domain, "uniformity_check needs at least 2 points");
  UniformityReport rep;
  const int m = int(points.size());
  // anchor solves from points[0], then warm-start the general pairs
  std::vector<std::optional<Jet2>> from_anchor(m);
  from_anchor[0] = identity2(points[0]);
  for (int k = 1; k < m; ++k) {
    std::optional<Jet2> warm;
    if (from_anchor[k - 1]) {
      Jet2 prev = *from_anchor[k - 1];
      prev.source = points[0];
      prev.target = points[k];
      warm = prev;
    }
    PairSolve ps = solve_material_jet(w, points[0], points[k], tol, cfg, warm);
    if (ps.converged) from_anchor[k] = ps.jet;
  }
  bool all_ok = true, any_certificate = false;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      std::optional<Jet2> warm;
      if (from_anchor[i] && from_anchor[j])
        warm = compose2(*from_anchor[j], invert2(*from_anchor[i]));
      PairSolve ps = solve_material_jet(w, points[i], points[j], tol, cfg, warm);
      rep.max_residual = std::max(rep.max_residual, ps.residual);
      all_ok = all_ok && ps.converged;
      any_certificate = any_certificate || ps.certificate_of_failure;
      rep.pairs.push_back(std::move(ps));
    }
  rep.verdict = all_ok ? "uniform" : (any_certificate ? "non-uniform" : "inconclusive");
  return rep;
}

namespace {

// candidate section jet <x -> y> induced by a deformation (kappa, C):
// K_y^-1 . T_v . K_x with T_v the translation jet between the images
Jet2 candidate_section_jet(const Jet2& kx, const Jet2& ky) {
  const Jet2 tv = translation2(kx.target, ky.target);
  return compose2(invert2(ky), compose2(tv, kx, 1e-6), 1e-6);
}

struct NodeData {
  Vec x;
  Jet2 kjet; // jet of the bundle deformation at x: <x -> kappa(x)>
};

HomogeneityReport verify_candidate_jets(const ResponseFunction& w,
                                        const std::vector<NodeData>& nodes, int z0_index,
                                        const ToleranceConfig& tol, const SamplerConfig& cfg,
                                        HomogeneityReport rep) {
  rep.max_residual = 0.0;
  const NodeData& base = nodes[z0_index];
  for (const NodeData& node : nodes) {
    const Jet2 sec = candidate_section_jet(base.kjet, node.kjet);
    const double r = is_material_isomorphism(w, sec, cfg, tol.abs_tol).residual;
    rep.residual_field.emplace_back(node.x, r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  // seeded off-anchor pairs
  Rng rng = Rng::stream(cfg.seed, 0x686f6d70u);
  const int extra = std::min<int>(24, int(nodes.size()) * 2);
  for (int t = 0; t < extra; ++t) {
    const NodeData& a = nodes[rng.uniform_int(0, int(nodes.size()) - 1)];
    const NodeData& b = nodes[rng.uniform_int(0, int(nodes.size()) - 1)];
    const Jet2 sec = candidate_section_jet(a.kjet, b.kjet);
    rep.max_residual =
        std::max(rep.max_residual, is_material_isomorphism(w, sec, cfg, tol.abs_tol).residual);
  }
  rep.verdict = rep.max_residual <= tol.abs_tol ? "homogeneous" : "inconclusive";
  if (rep.verdict == "homogeneous") {
    // the crystal induced by the verified deformation at the anchor point:
    // homogeneity holds with respect to it
    const int n = int(base.x.size());
    const Jet2 to_image = translation2(Vec(n, 0.0), base.kjet.target);
    rep.crystal = compose2(invert2(base.kjet), to_image, 1e-9); // 0 -> z0
  }
  return rep;
}

} // namespace

HomogeneityReport homogeneity_check(const ResponseFunction& w, const BodyChart& chart,
                                    const std::optional<HomogeneityCandidate>& candidate,
                                    const ToleranceConfig& tol, const SamplerConfig& cfg,
                                    int grid_per_axis) {
  chart.validate();
  const int n = chart.dim;
  const auto pts = lattice_points(chart, grid_per_axis);
  HomogeneityReport rep;

  if (candidate) {
    rep.mode = "verify-candidate";
    std::vector<NodeData> nodes;
    nodes.reserve(pts.size());
    const MatrixField frame = candidate->frame;
    const BaseMap kappa = candidate->kappa;
    for (const Vec& x : pts)
      nodes.push_back({x, jet2_from_bundle_map(kappa, frame, x, tol.fd_step)});
    // anchor at the lattice point closest to the chart centre
    int z0_index = 0;
    double best = 1e300;
    const Vec c = chart.center();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) d2 += (pts[i][a] - c[a]) * (pts[i][a] - c[a]);
      if (d2 < best) {
        best = d2;
        z0_index = int(i);
      }
    }
    return verify_candidate_jets(w, nodes, z0_index, tol, cfg, std::move(rep));
  }

  rep.mode = "construct-and-verify";
  // solve jets x -> z0 on the lattice; their Q parts are the would-be
  // Jacobian field of the constructed chart
  const Vec z0 = chart.center();
  std::vector<PairSolve> solves;
  solves.reserve(pts.size());
  std::optional<Jet2> warm;
  bool all_converged = true, any_certificate = false;
  for (const Vec& x : pts) {
    std::optional<Jet2> start;
    if (warm) {
      Jet2 shifted = *warm;
      shifted.source = x;
      shifted.target = z0;
      start = shifted;
    }
    PairSolve ps = solve_material_jet(w, x, z0, tol, cfg, start);
    if (ps.converged) warm = ps.jet;
    all_converged = all_converged && ps.converged;
    any_certificate = any_certificate || ps.certificate_of_failure;
    solves.push_back(std::move(ps));
  }
  if (!all_converged) {
    rep.verdict = any_certificate ? "locally-inhomogeneous" : "inconclusive";
    rep.note = any_certificate
                   ? "no material isomorphism exists for some sampled pair (jet-independent mismatch)"
                   : "uniformity solves did not converge";
    return rep;
  }

  // F(x) = Q part of the solved jet x -> z0; closedness of F is the
  // integrability obstruction for a chart with Dkappa = F
  std::vector<int> dims(n, grid_per_axis);
  GridField fgrid(chart, dims, n * n);
  {
    // lattice_points and GridField enumerate nodes in the same order
    std::size_t at = 0;
    std::vector<int> idx(n, 0);
    for (;;) {
      Vec flat(n * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) flat[i * n + j] = solves[at].jet.Q(i, j);
      fgrid.node_value(idx) = std::move(flat);
      ++at;
      int a = n - 1;
      while (a >= 0 && ++idx[a] == dims[a]) idx[a--] = 0;
      if (a < 0) break;
    }
  }
  MatrixPairField solved_section = [fgrid, n](const Vec& x, const Vec& y) {
    auto unflat = [n](const Vec& v) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
      return m;
    };
    return unflat(fgrid.eval(y)) * inverse(unflat(fgrid.eval(x)));
  };
  SamplingPlan plan;
  plan.points_per_axis = grid_per_axis;
  plan.seed = cfg.seed;
  // fd step comparable to a lattice cell so the interpolated field
  // differentiates as node differences
  double cell = 1e300;
  for (int a = 0; a < n; ++a)
    cell = std::min(cell, (chart.box[a].second - chart.box[a].first) / (grid_per_axis - 1));
  const auto integ =
      integrability_test_section(chart, solved_section, z0, 1e-3, plan, 0.25 * cell);
  rep.closedness_residual = integ.closedness_residual;

  // W-visible morphism residual of the solved family on seeded pairs
  Rng rng = Rng::stream(cfg.seed, 0x6d726573u);
  double morph = 0.0;
  for (int t = 0; t < 20; ++t) {
    const PairSolve& a = solves[rng.uniform_int(0, int(solves.size()) - 1)];
    const PairSolve& b = solves[rng.uniform_int(0, int(solves.size()) - 1)];
    const Jet2 composite = compose2(invert2(b.jet), a.jet); // a.x -> b.x
    morph = std::max(morph, is_material_isomorphism(w, composite, cfg, tol.abs_tol).residual);
  }
  rep.morphism_residual = morph;

  const double obstruction_floor = 1e-3;
  if (integ.closedness_residual > obstruction_floor) {
    rep.verdict = "locally-inhomogeneous";
    rep.note = "solved micro-structure field has asymmetric mixed partials; no deformation "
               "can flatten it";
    return rep;
  }
  if (morph > std::max(obstruction_floor, 10.0 * tol.abs_tol)) {
    rep.verdict = "locally-inhomogeneous";
    rep.note = "solved jets fail the groupoid morphism property under W";
    return rep;
  }

  // assemble the candidate: Dkappa = F, C = (P part)^-1, R by node
  // differences of C; kappa values by trapezoid path integration (they only
  // enter the report, not the membership residuals)
  std::vector<NodeData> nodes;
  nodes.reserve(pts.size());
  {
    GridField cgrid(chart, dims, n * n);
    std::size_t at = 0;
    std::vector<int> idx(n, 0);
    for (;;) {
      const Mat cval = inverse(solves[at].jet.P);
      Vec flat(n * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) flat[i * n + j] = cval(i, j);
      cgrid.node_value(idx) = std::move(flat);
      ++at;
      int a = n - 1;
      while (a >= 0 && ++idx[a] == dims[a]) idx[a--] = 0;
      if (a < 0) break;
    }
    auto unflat = [n](const Vec& v) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
      return m;
    };
    // kappa by integrating F along axis-ordered lattice paths
    GridField kgrid(chart, dims, n);
    std::vector<int> idx2(n, 0);
    for (;;) {
      const Vec x = kgrid.node_point(idx2);
      Vec acc(n, 0.0);
      Vec from = z0;
      for (int leg = 0; leg < n; ++leg) {
        Vec to = from;
        to[leg] = x[leg];
        const int steps = 8;
        for (int s = 0; s < steps; ++s) {
          Vec a = from, b = from;
          a[leg] = from[leg] + (to[leg] - from[leg]) * double(s) / steps;
          b[leg] = from[leg] + (to[leg] - from[leg]) * double(s + 1) / steps;
          const Mat fa = unflat(fgrid.eval(a));
          const Mat fb = unflat(fgrid.eval(b));
          for (int r = 0; r < n; ++r)
            acc[r] += 0.5 * (fa(r, leg) + fb(r, leg)) * (b[leg] - a[leg]);
        }
        from = to;
      }
      kgrid.node_value(idx2) = acc;
      int a = n - 1;
      while (a >= 0 && ++idx2[a] == dims[a]) idx2[a--] = 0;
      if (a < 0) break;
    }

    std::size_t node_at = 0;
    std::vector<int> idx3(n, 0);
    for (;;) {
      const Vec& x = pts[node_at];
      NodeData nd;
      nd.x = x;
      nd.kjet.source = x;
      nd.kjet.target = kgrid.node_value(idx3);
      nd.kjet.Q = solves[node_at].jet.Q;            // Dkappa = F, node-exact
      nd.kjet.P = unflat(cgrid.node_value(idx3));   // C
      // dC/dx^k from the interpolated grid (node differences)
      nd.kjet.R = Tensor3(n);
      for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        const double h = 0.25 * cell;
        xp[k] += h;
        xm[k] -= h;
        const Mat cp = unflat(cgrid.eval(xp));
        const Mat cm = unflat(cgrid.eval(xm));
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) nd.kjet.R(j, i, k) = (cp(j, i) - cm(j, i)) / (2.0 * h);
      }
      rep.recovered_kappa.emplace_back(x, nd.kjet.target);
      nodes.push_back(std::move(nd));
      ++node_at;
      int a = n - 1;
      while (a >= 0 && ++idx3[a] == dims[a]) idx3[a--] = 0;
      if (a < 0) break;
    }
  }
  int z0_index = 0;
  double best = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) d2 += (pts[i][a] - z0[a]) * (pts[i][a] - z0[a]);
    if (d2 < best) {
      best = d2;
      z0_index = int(i);
    }
  }
  rep = verify_candidate_jets(w, nodes, z0_index, tol, cfg, std::move(rep));
  if (rep.verdict == "inconclusive")
    rep.note = "constructed candidate did not verify within tolerance";
  return rep;
}

AlgebroidMembershipResult algebroid_membership(const ResponseFunction& w, const BodyChart& chart,
                                               const Section2& theta, int num_jets,
                                               const SamplerConfig& cfg, double tol, double dt) {
  AlgebroidMembershipResult out;
  BodyChart c = chart;
  Rng rng = Rng::stream(cfg.seed, 0x616c6721u);
  for (int k = 0; k < num_jets; ++k) {
    Jet2 g = random_jet2(rng, c, cfg.jet_scale);
    const Vec x = g.source;
    const Jet2 ep = exponential2(chart, theta, dt, x, 8);
    const Jet2 em = exponential2(chart, theta, -dt, x, 8);
    const Vec wp = evaluate_response(w, compose2(g, ep, 1e-6));
    const Vec wm = evaluate_response(w, compose2(g, em, 1e-6));
    for (int cidx = 0; cidx < w.d; ++cidx)
      out.max_derivative = std::max(out.max_derivative, std::fabs((wp[cidx] - wm[cidx]) / (2 * dt)));
  }
  out.pass = out.max_derivative <= tol;
  return out;
}

ResponseFunction builtin_media(const std::string& name, int n,
                               const std::optional<MatrixField>& implant_a) {
  ResponseFunction w;
  w.n = n;
  w.name = name;
  if (name == "micro_only") {
    w.d = n * n;
    w.eval = [n](const Vec&, const Mat&, const Mat& q, const Tensor3&) {
      Vec out(std::size_t(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = q(i, j);
      return out;
    };
  } else if (name == "det_density") {
    w.d = 1;
    w.eval = [n](const Vec& x, const Mat&, const Mat& q, const Tensor3&) {
      double phi = 1.0;
      for (double v : x) phi += v * v;
      return Vec{phi * det(q)};
    };
  } else if (name == "implant") {
    if (!implant_a) fail(ErrorKind::Semantic, "implant medium needs its reference field A");
    const MatrixField a = *implant_a;
    w.d = n * n;
    w.eval = [n, a](const Vec& x, const Mat&, const Mat& q, const Tensor3&) {
      const Mat m = q * inverse(a(x));
      Vec out(std::size_t(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = m(i, j);
      return out;
    };
  } else if (name == "source_tagged") {
    w.d = n * n + n;
    w.eval = [n](const Vec& x, const Mat&, const Mat& q, const Tensor3&) {
      Vec out(std::size_t(n) * n + n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = q(i, j);
      for (int i = 0; i < n; ++i) out[n * n + i] = x[i];
      return out;
    };
  } else if (name == "full_rigid") {
    w.d = n + 2 * n * n + n * n * n;
    w.eval = [n](const Vec& x, const Mat& p, const Mat& q, const Tensor3& r) {
      Vec out;
      out.reserve(std::size_t(n) + 2 * n * n + n * n * n);
      for (int i = 0; i < n; ++i) out.push_back(x[i]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.push_back(p(i, j));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.push_back(q(i, j));
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) out.push_back(r(j, i, k));
      return out;
    };
  } else {
    fail(ErrorKind::Semantic, "unknown builtin medium '" + name + "'");
  }
  return w;
}

} // namespace cosserat
