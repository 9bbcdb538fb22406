#pragma once

// 1-jets of local diffeomorphisms and second-order non-holonomic jets in
// quotient coordinates (x, y, P, Q, R): P the frame part, Q the base
// Jacobian, R(j,i,k) the frame-part derivative. A Jet2 is realised by a
// frame-bundle automorphism X -> C(x) X over a base map psi, with
// P = C(x), Q = Dpsi(x) and R = dC/dx.

#include <functional>
#include <string>

#include "cosserat/numerics.hpp"

namespace cosserat {

// Single-chart coordinate domain: an axis-aligned box.
struct BodyChart {
  int dim = 3;
  std::vector<std::pair<double, double>> box; // lo < hi per axis

  void validate() const;
  bool contains(const Vec& x, double slack = 0.0) const;
  Vec center() const;
  Vec corner_lo() const;
  Vec corner_hi() const;
};

struct Jet1 {
  Vec source;
  Vec target;
  Mat jac; // invertible

  int dim() const { return int(source.size()); }
};

struct Jet2 {
  Vec source;
  Vec target;
  Mat P;     // frame part
  Mat Q;     // base Jacobian part
  Tensor3 R; // R(j,i,k) = d P(j,i) / d x^k

  int dim() const { return int(source.size()); }
};

// Elements of the associated group live at the model origin:
// source = target = 0.
using GroupElement2 = Jet2;

Jet2 identity2(const Vec& x, const BodyChart& chart);
Jet2 identity2(const Vec& x); // no chart check

// Translation-type jet <x -> y; I, I, 0>.
Jet2 translation2(const Vec& x, const Vec& y);

// g2 . g1 with source(g2) = target(g1) within tol.
Jet2 compose2(const Jet2& g2, const Jet2& g1, double tol = 1e-9);
Jet2 invert2(const Jet2& g);

Jet1 compose1(const Jet1& g2, const Jet1& g1, double tol = 1e-9);
Jet1 invert1(const Jet1& g);

void check_valid(const Jet1& g, double tol = 1e-9);
void check_valid(const Jet2& g, double tol = 1e-9);

using BaseMap = std::function<Vec(const Vec&)>;
using FrameField = std::function<Mat(const Vec&)>;

// Jet of the bundle automorphism X -> C(x) X over psi at x. Q and R are
// produced by central differences with step h.
Jet2 jet2_from_bundle_map(const BaseMap& psi, const FrameField& frame, const Vec& x,
                          double h = 1e-5);

Jet1 project_frame(const Jet2& g); // (x, y, P)
Jet1 project_base(const Jet2& g);  // (x, y, Q)

// Holonomic iff P = Q entrywise and R(j,i,k) = R(j,k,i), within tol.
bool is_holonomic(const Jet2& g, double tol);
// max(|P - Q|, |R(j,i,k) - R(j,k,i)|): distance to the holonomic locus.
double holonomic_defect(const Jet2& g);

// Flat JSON object {n, x, y, P, Q, R} used by the CLI and report files.
std::string jet2_to_json(const Jet2& g);
Jet2 jet2_from_json(const std::string& text);

// Seeded random valid Jet2 with endpoints inside the chart; used by the
// groupoid-law self-tests.
Jet2 random_jet2(Rng& rng, const BodyChart& chart, double scale = 0.6);

} // namespace cosserat
