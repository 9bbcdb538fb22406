#pragma once

// Reference crystals, the associated group of a reduced subgroupoid, the
// structure of uniform references built from a membership oracle, and
// crystal-change conjugation.

#include <functional>
#include <optional>

#include "cosserat/material.hpp"
#include "cosserat/prolongation.hpp"

namespace cosserat {

// membership oracle on groupoid jets (typically the material groupoid)
using GroupoidOracle = std::function<MembershipResult(const Jet2&)>;
// produces a member jet from z0 to x when one can be found
using JetSolver = std::function<std::optional<Jet2>(const Vec& z0, const Vec& x)>;

// Structures are predicates plus samplers, not enumerated sets: the
// associated group may have positive dimension.
struct GStructure2 {
  BodyChart chart;
  std::function<bool(const Jet2& frame)> membership; // frames <0 -> x>
  std::function<std::optional<Jet2>(const Vec& x)> sampler;
  std::vector<GroupElement2> group_samples;
};

GroupoidOracle material_oracle(const ResponseFunction& w, const SamplerConfig& cfg,
                               double abs_tol);

// Frames of the structure of uniform references: Z is a member at x iff
// Z . crystal^-1 lies in the groupoid.
GStructure2 structure_from_groupoid(const BodyChart& chart, const GroupoidOracle& oracle,
                                    const Crystal& crystal, const JetSolver& solver);

// Sampled symmetry jets at the crystal's anchor, conjugated to the model
// origin: gbar = Z0^-1 . s . Z0.
std::vector<GroupElement2> associated_group_sample(const ResponseFunction& w,
                                                   const Crystal& crystal,
                                                   const SamplerConfig& cfg, double abs_tol);

GStructure2 conjugate_structure(const GStructure2& omega, const GroupElement2& g);

// Standard flat structure over the chart: members are s(x) . g for the
// canonical frames s(x) = <0 -> x; I, I, 0> and sampled group elements.
GStructure2 standard_flat(const BodyChart& chart, const std::vector<GroupElement2>& group_samples,
                          double tol = 1e-9);

} // namespace cosserat
