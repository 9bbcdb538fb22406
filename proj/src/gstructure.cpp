#include "cosserat/gstructure.hpp"

#include <cmath>

namespace cosserat {

GroupoidOracle material_oracle(const ResponseFunction& w, const SamplerConfig& cfg,
                               double abs_tol) {
  return [w, cfg, abs_tol](const Jet2& g) { return is_material_isomorphism(w, g, cfg, abs_tol); };
}

GStructure2 structure_from_groupoid(const BodyChart& chart, const GroupoidOracle& oracle,
                                    const Crystal& crystal, const JetSolver& solver) {
  crystal.validate();
  GStructure2 out;
  out.chart = chart;
  const Crystal cr = crystal;
  out.membership = [oracle, cr](const Jet2& frame) {
    const Jet2 through = compose2(frame, invert2(cr.frame), 1e-9); // z0 -> x
    return oracle(through).pass;
  };
  out.sampler = [solver, cr](const Vec& x) -> std::optional<Jet2> {
    const auto jet = solver(cr.z0, x);
    if (!jet) return std::nullopt;
    return compose2(*jet, cr.frame, 1e-9); // 0 -> x
  };
  return out;
}

std::vector<GroupElement2> associated_group_sample(const ResponseFunction& w,
                                                   const Crystal& crystal,
                                                   const SamplerConfig& cfg, double abs_tol) {
  crystal.validate();
  const auto sym = symmetry_sample(w, crystal.z0, cfg, abs_tol);
  std::vector<GroupElement2> out;
  out.reserve(sym.accepted.size());
  const Jet2 z0inv = invert2(crystal.frame);
  for (const Jet2& s : sym.accepted)
    out.push_back(compose2(compose2(z0inv, s, 1e-9), crystal.frame, 1e-9));
  return out;
}

GStructure2 conjugate_structure(const GStructure2& omega, const GroupElement2& g) {
  check_valid(g);
  GStructure2 out;
  out.chart = omega.chart;
  const Jet2 ginv = invert2(g);
  const auto member = omega.membership;
  out.membership = [member, ginv](const Jet2& frame) {
    return member(compose2(frame, ginv, 1e-9));
  };
  const auto sampler = omega.sampler;
  const Jet2 gcopy = g;
  out.sampler = [sampler, gcopy](const Vec& x) -> std::optional<Jet2> {
    const auto frame = sampler(x);
    if (!frame) return std::nullopt;
    return compose2(*frame, gcopy, 1e-9);
  };
  out.group_samples.reserve(omega.group_samples.size());
  for (const GroupElement2& el : omega.group_samples)
    out.group_samples.push_back(compose2(compose2(ginv, el, 1e-9), gcopy, 1e-9));
  return out;
}

GStructure2 standard_flat(const BodyChart& chart, const std::vector<GroupElement2>& group_samples,
                          double tol) {
  GStructure2 out;
  out.chart = chart;
  out.group_samples = group_samples;
  const int n = chart.dim;
  std::vector<GroupElement2> samples = group_samples;
  if (samples.empty()) samples.push_back(identity2(Vec(n, 0.0)));
  out.membership = [samples, n, tol](const Jet2& frame) {
    // factor out the canonical frame and match against the sampled group
    const Jet2 flat_inv = invert2(translation2(Vec(n, 0.0), frame.target));
    const Jet2 residue = compose2(flat_inv, frame, 1e-9); // 0 -> 0
    for (const GroupElement2& g : samples) {
      double gap = max_abs(residue.P - g.P);
      gap = std::max(gap, max_abs(residue.Q - g.Q));
      gap = std::max(gap, max_abs(residue.R - g.R));
      if (gap <= tol) return true;
    }
    return false;
  };
  out.sampler = [n](const Vec& x) -> std::optional<Jet2> {
    return translation2(Vec(n, 0.0), x);
  };
  return out;
}

} // namespace cosserat
