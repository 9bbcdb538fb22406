#pragma once

// Sections of the 1-jet algebroid and of the second-order non-holonomic
// algebroid, the derivation correspondence, exponential flows, brackets,
// Christoffel symbols, curvature and second-order covariant derivatives.

#include <optional>

#include "cosserat/fields.hpp"
#include "cosserat/jets.hpp"
#include "cosserat/prolongation.hpp"

namespace cosserat {

// Value of a 1-jet algebroid section at a point: coordinates (v, v^j_i).
struct Section1Value {
  Vec v;   // anchor part
  Mat mat; // derivation matrix, D(d_i) = sum_j mat(j,i) d_j
};

using Section1 = std::function<Section1Value(const Vec&)>;

// Value of a second-order algebroid section: (v, v^i_j, v^i_,j, v^i_j,k).
struct Section2Value {
  Vec v;
  Mat vP;
  Mat vQ;
  Tensor3 vR;
};

using Section2 = std::function<Section2Value(const Vec&)>;

using VectorField = std::function<Vec(const Vec&)>;

VectorField anchor(const Section1& s);
VectorField anchor(const Section2& s);

// Derivation on TM determined by a section: matrix field + base field.
struct Derivation {
  BodyChart chart;
  MatrixField mat;
  VectorField base;

  // D applied to a vector field, including the transport term base(X^j).
  Vec apply(const VectorField& x_field, const Vec& at, double fd_step = 1e-5) const;
};

Derivation section_to_derivation(const BodyChart& chart, const Section1& s);

// Commutator bracket: base = [X1, X2], matrix part
// X1(M2) - X2(M1) + [M1, M2], derivatives by central differences.
Section1 bracket(const BodyChart& chart, const Section1& a, const Section1& b,
                 double fd_step = 1e-5);

// Exit of the time-t flow of the left-invariant field of s through epsilon:
// Jet1 <psi_t(x) -> x; Phi(t)> with dPhi/dt = Phi . mat(psi_t(x)).
Jet1 exponential(const BodyChart& chart, const Section1& s, double t, const Vec& x,
                 int steps = 64);

// Second-order analogue: Jet2 <psi_t(x) -> x> integrating the
// left-multiplication ODEs of all jet coordinates.
Jet2 exponential2(const BodyChart& chart, const Section2& s, double t, const Vec& x,
                  int steps = 64);

// Linear (over functions) map from vector fields into Section1 values;
// evaluated pointwise on a direction vector.
using LinearSection1 = std::function<Section1Value(const Vec& x, const Vec& w)>;

struct ChristoffelField {
  BodyChart chart;
  // gamma(x)(k,i,j): coefficient of nabla_{d_j} d_i on d_k
  std::function<Tensor3(const Vec&)> gamma;
};

// Reads the Christoffel symbols out of a linear section; rejects inputs that
// fail the pointwise linearity test on sampled directions.
ChristoffelField christoffels(const BodyChart& chart, const LinearSection1& lam,
                              const SamplingPlan& plan, double tol = 1e-8);

struct Tensor4 {
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), a_(std::size_t(n) * n * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int l, int k, int i, int j) {
    return a_[((std::size_t(l) * n_ + k) * n_ + i) * n_ + j];
  }
  double operator()(int l, int k, int i, int j) const {
    return a_[((std::size_t(l) * n_ + k) * n_ + i) * n_ + j];
  }
  double max_abs() const;

private:
  int n_ = 0;
  std::vector<double> a_;
};

// Curvature coefficients of R(d_i, d_j) d_k on d_l for the convention
// R(X,Y) = nabla_[X,Y] - nabla_X nabla_Y + nabla_Y nabla_X.
// First derivatives of gamma by central differences with fd_step.
Tensor4 curvature(const ChristoffelField& gamma, const Vec& x, double fd_step = 1e-4);

// Linear Section2-valued map, optionally carrying the generating groupoid
// section pair fields it was prolonged from.
struct Section2Linear {
  BodyChart chart;
  std::function<Section2Value(const Vec& x, const Vec& w)> eval;
  // generators, present when built by algebroid_prolong
  std::optional<MatrixPairField> gen_P;
  std::optional<MatrixPairField> gen_Q;
};

// Second-order prolongation of the algebroid sections induced by groupoid
// section pair fields P, Q, evaluated at the diagonal. Second derivatives by
// nested central differences with step fd2.
Section2Linear algebroid_prolong(const BodyChart& chart, const MatrixPairField& P,
                                 const MatrixPairField& Q, double fd2 = 1e-4);

// Deviation from the integrable-prolongation template: the vQ rate must
// vanish and vR must equal the two-second-derivative form. Needs the
// generating sections; fails with ErrorKind::Insufficient otherwise.
double algebroid_integrability_residual(const Section2Linear& lam, const SamplingPlan& plan,
                                        double fd2 = 1e-4);

// Second-order non-holonomic covariant derivative read off a linear section.
struct CovDer2 {
  BodyChart chart;
  Section2Linear lam;

  // coefficient of d_k in nabla_{d_j} d_i, read at (k,i)
  Mat nabla1_coeff(const Vec& x, int j) const;
  // coefficient of d/dx^k_l in nabla_{d_j} d_i, read at (k,l,i)
  Tensor3 vertical_coeff(const Vec& x, int j) const;
  // coefficient of d/dx^l_j in nabla_{d_k} d/dx^i_j, read at (l,i)
  Mat frame_rule_coeff(const Vec& x, int k) const;
};

CovDer2 second_order_covder(const Section2Linear& lam);

struct CovDerFlags {
  bool function_linear = false;
  bool base_projects = false;
  bool leibniz = false;
  bool right_invariant = false; // structural: rule coefficients carry no fibre dependence
  double max_violation = 0.0;
};

CovDerFlags check_covder_properties(const CovDer2& cd, const SamplingPlan& plan, double tol);

// nabla^1 projection: Christoffels from the vQ rate of the section.
ChristoffelField project_nabla1(const Section2Linear& lam);

} // namespace cosserat
