#pragma once

// Mechanical responses, the material groupoid membership oracle, symmetry
// sampling, uniformity and homogeneity decision procedures, and the material
// algebroid membership test.

#include <optional>
#include <string>

#include "cosserat/algebroid.hpp"
#include "cosserat/expression.hpp"
#include "cosserat/fields.hpp"
#include "cosserat/jets.hpp"
#include "cosserat/prolongation.hpp"

namespace cosserat {

// W: (source point, jet coordinates) -> R^d. Translation invariance is
// structural: the target point never enters the evaluation. eval must be
// total on (possibly near-singular) trial jets fed in by the solvers.
struct ResponseFunction {
  int n = 0;
  int d = 0;
  std::string name;
  std::function<Vec(const Vec& x, const Mat& P, const Mat& Q, const Tensor3& R)> eval;
};

Vec evaluate_response(const ResponseFunction& w, const Jet2& g);

struct SamplerConfig {
  int num_deformations = 64;
  double jet_scale = 0.5;
  std::uint64_t seed = 0;
  // deterministic identity +/- unit-coordinate perturbations, catching
  // failures linear in the deformation
  bool exhaustive_stencil = true;

  void validate() const;
};

// Deformation probes at y: seeded random jets plus the deterministic stencil.
std::vector<Jet2> deformation_samples(int n, const Vec& y, const SamplerConfig& cfg);

struct MembershipResult {
  bool pass = false;
  double residual = 0.0;
};

// Sampled version of the invariance condition: residual is the max over
// deformation probes h at target(g) of |W(h . g) - W(h)|.
MembershipResult is_material_isomorphism(const ResponseFunction& w, const Jet2& g,
                                         const SamplerConfig& cfg, double abs_tol);

struct SymmetrySampleResult {
  std::vector<Jet2> accepted; // always contains the identity jet
  int tested = 0;
  double acceptance_rate = 0.0;
  double max_accepted_residual = 0.0;
};

SymmetrySampleResult symmetry_sample(const ResponseFunction& w, const Vec& x,
                                     const SamplerConfig& cfg, double abs_tol);

struct PairSolve {
  Vec x, y;
  Jet2 jet;
  double residual = 0.0;
  bool converged = false;
  // provable failure: some residual component is far from zero yet
  // insensitive to every jet coordinate
  bool certificate_of_failure = false;
};

// Least-squares search for a material isomorphism x -> y, warm-started from
// the supplied jet when given.
PairSolve solve_material_jet(const ResponseFunction& w, const Vec& x, const Vec& y,
                             const ToleranceConfig& tol, const SamplerConfig& cfg,
                             const std::optional<Jet2>& warm_start = std::nullopt);

struct UniformityReport {
  std::vector<PairSolve> pairs;
  std::string verdict; // "uniform" | "non-uniform" | "inconclusive"
  double max_residual = 0.0;
};

UniformityReport uniformity_check(const ResponseFunction& w, const std::vector<Vec>& points,
                                  const ToleranceConfig& tol, const SamplerConfig& cfg);

struct HomogeneityCandidate {
  BaseMap kappa;      // global deformation of the chart
  MatrixField frame;  // micro part C(x); identity when omitted in configs
};

struct HomogeneityReport {
  std::string mode; // "verify-candidate" | "construct-and-verify"
  std::string verdict; // "homogeneous" | "locally-inhomogeneous" | "inconclusive"
  std::vector<std::pair<Vec, double>> residual_field;
  double max_residual = 0.0;
  // obstruction data, present when the construct path ran
  std::optional<double> closedness_residual;
  std::optional<double> morphism_residual;
  std::vector<std::pair<Vec, Vec>> recovered_kappa; // grid point -> kappa value
  // the reference crystal induced by the verified deformation; homogeneity
  // holds with respect to it
  std::optional<Jet2> crystal;
  std::string note;
};

// Verdict rule: homogeneous only when a candidate section passes membership
// everywhere sampled; locally-inhomogeneous only on a computed obstruction
// (closedness / morphism failure / jet-independent mismatch), never from
// solver failure alone.
HomogeneityReport homogeneity_check(const ResponseFunction& w, const BodyChart& chart,
                                    const std::optional<HomogeneityCandidate>& candidate,
                                    const ToleranceConfig& tol, const SamplerConfig& cfg,
                                    int grid_per_axis = 5);

struct AlgebroidMembershipResult {
  bool pass = false;
  double max_derivative = 0.0;
};

// Finite version of the flow-invariance condition: differentiates
// t -> W(g . Exp_t Theta(source(g))) at 0 by central differences over the
// integrated second-order exponential.
AlgebroidMembershipResult algebroid_membership(const ResponseFunction& w, const BodyChart& chart,
                                               const Section2& theta, int num_jets,
                                               const SamplerConfig& cfg, double tol,
                                               double dt = 1e-4);

// Built-in media registry: micro_only, det_density, implant (needs the A
// field), source_tagged, full_rigid.
ResponseFunction builtin_media(const std::string& name, int n,
                               const std::optional<MatrixField>& implant_a = std::nullopt);

} // namespace cosserat
