#pragma once

// Prolongation of parallelisms and groupoid sections, integrability
// predicates, and the correspondence between parallelisms and groupoid
// sections (gbar and its inverse).

#include <optional>

#include "cosserat/fields.hpp"
#include "cosserat/jets.hpp"

namespace cosserat {

// Section of the second-order frame bundle over the chart: x -> (P, Q, R),
// realised as the frame <0 -> x; P(x), Q(x), R(x)>.
struct Parallelism2 {
  BodyChart chart;
  MatrixField P;
  MatrixField Q;
  Tensor3Field R;

  Jet2 frame_at(const Vec& x) const; // Jet2 <0 -> x>
};

// Section of (source, target): (x, y) -> Jet2 <x -> y>.
struct GroupoidSection2 {
  BodyChart chart;
  MatrixPairField P;
  MatrixPairField Q;
  Tensor3PairField R;

  Jet2 jet_at(const Vec& x, const Vec& y) const;
};

// Sampling plan shared by the residual checks: a deterministic lattice plus
// seeded random pair/triple draws.
struct SamplingPlan {
  int points_per_axis = 5;
  int random_triples = 20;
  std::uint64_t seed = 0;
};

// Second-order prolongation of two frame fields: R(i,j,k) = sum_l Q(l,k) dP(i,j)/dx^l.
Parallelism2 prolong_parallelism(const BodyChart& chart, const MatrixField& P,
                                 const MatrixField& Q, double fd_step = 1e-5);

// Deviation of a Parallelism2 from the prolongation identity at x.
double prolongation_residual(const Parallelism2& s, const Vec& x, double fd_step = 1e-5);

// Second-order prolongation of two Jet1-valued sections:
// R(j,i,k) = dP(j,i)/dx^k (target fixed) + sum_l Q(l,k) dP(j,i)/dy^l (source fixed).
GroupoidSection2 prolong_section(const BodyChart& chart, const MatrixPairField& P,
                                 const MatrixPairField& Q, double fd_step = 1e-5);

double section_prolongation_residual(const GroupoidSection2& s, const Vec& x, const Vec& y,
                                     double fd_step = 1e-5);

struct SectionIntegrabilityVerdict {
  bool is_morphism = false;
  bool integrable = false;
  double morphism_residual = 0.0;
  double closedness_residual = 0.0;
};

// Integrability of a Jet1-valued section Q on the box chart: Q must be a
// groupoid morphism and B(x) = Q(z0, x) must be a Jacobian field, i.e. have
// symmetric mixed partials. Both conditions are necessary and sufficient on
// a contractible box.
SectionIntegrabilityVerdict integrability_test_section(const BodyChart& chart,
                                                       const MatrixPairField& Q, const Vec& z0,
                                                       double tol, const SamplingPlan& plan,
                                                       double fd_step = 1e-5);

struct ParallelismIntegrabilityVerdict {
  bool is_prolongation = false;
  bool p_equals_q = false;
  bool q_section_integrable = false;
  bool integrable = false; // all three
  double prolongation_residual = 0.0;
  double pq_gap = 0.0;
  double closedness_residual = 0.0;
};

ParallelismIntegrabilityVerdict integrability_test_parallelism2(const Parallelism2& s, double tol,
                                                                const SamplingPlan& plan,
                                                                double fd_step = 1e-5);

// gbar: section induced by a parallelism, (x, y) -> Pbar(y) . Pbar(x)^-1.
GroupoidSection2 gbar(const Parallelism2& pbar);

// Reference crystal: a second-order frame anchored at z0.
struct Crystal {
  Vec z0;
  Jet2 frame; // Jet2 <0 -> z0>

  void validate() const;
  static Crystal identity_at(const Vec& z0);
};

// Inverts gbar given a crystal: Pbar(x) = section(z0, x) . crystal. Fails
// with ErrorKind::Domain when the section is not a morphism within tol.
Parallelism2 invert_gbar(const GroupoidSection2& section, const Crystal& crystal, double tol,
                         const SamplingPlan& plan);

// Canonical flat structures.
Parallelism2 standard_flat_parallelism(const BodyChart& chart);
GroupoidSection2 canonical_identity_section(const BodyChart& chart);

} // namespace cosserat
