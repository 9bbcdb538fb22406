#include "cosserat/prolongation.hpp"

#include <cmath>

namespace cosserat {

Jet2 Parallelism2::frame_at(const Vec& x) const {
  Jet2 g;
  g.source = Vec(chart.dim, 0.0);
  g.target = x;
  g.P = P(x);
  g.Q = Q(x);
  g.R = R(x);
  check_valid(g);
  return g;
}

Jet2 GroupoidSection2::jet_at(const Vec& x, const Vec& y) const {
  Jet2 g;
  g.source = x;
  g.target = y;
  g.P = P(x, y);
  g.Q = Q(x, y);
  g.R = R(x, y);
  check_valid(g);
  return g;
}

namespace {

void check_invertible_at(const Mat& m, const Vec& x, const char* which) {
  if (std::fabs(det(m)) <= 1e-12) {
    std::string msg = std::string("singular ") + which + " field value at (";
    char buf[32];
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6g", x[i]);
      msg += buf;
      if (i + 1 < x.size()) msg += ", ";
    }
    fail(ErrorKind::Singular, msg + ")");
  }
}

// dP(j,i)/dx^k as a rank-3 array, boundary aware.
Tensor3 frame_field_gradient(const MatrixField& p, const Vec& x, double h,
                             const BodyChart& chart) {
  const int n = chart.dim;
  auto flat = [&](const Vec& q) {
    const Mat m = p(q);
    Vec v(std::size_t(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) v[std::size_t(j) * n + i] = m(j, i);
    return v;
  };
  const Mat grad = fd_jacobian_in_box(flat, x, h, chart);
  Tensor3 t(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) t(j, i, k) = grad(j * n + i, k);
  return t;
}

} // namespace

Parallelism2 prolong_parallelism(const BodyChart& chart, const MatrixField& P,
                                 const MatrixField& Q, double fd_step) {
  chart.validate();
  Parallelism2 out;
  out.chart = chart;
  out.P = P;
  out.Q = Q;
  out.R = [chart, P, Q, fd_step](const Vec& x) {
    const int n = chart.dim;
    const Mat pv = P(x);
    const Mat qv = Q(x);
    check_invertible_at(pv, x, "P");
    check_invertible_at(qv, x, "Q");
    const Tensor3 dp = frame_field_gradient(P, x, fd_step, chart);
    Tensor3 r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += qv(l, k) * dp(i, j, l);
          r(i, j, k) = s;
        }
    return r;
  };
  return out;
}

double prolongation_residual(const Parallelism2& s, const Vec& x, double fd_step) {
  const int n = s.chart.dim;
  const Mat qv = s.Q(x);
  const Tensor3 rv = s.R(x);
  const Tensor3 dp = frame_field_gradient(s.P, x, fd_step, s.chart);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double expect = 0.0;
        for (int l = 0; l < n; ++l) expect += qv(l, k) * dp(i, j, l);
        worst = std::max(worst, std::fabs(rv(i, j, k) - expect));
      }
  return worst;
}

namespace {

// Source-slot and target-slot frame gradients of a pair field.
Tensor3 pair_gradient_source(const MatrixPairField& p, const Vec& x, const Vec& y, double h,
                             const BodyChart& chart) {
  auto fixed_y = [&](const Vec& q) { return p(q, y); };
  return frame_field_gradient(fixed_y, x, h, chart);
}

Tensor3 pair_gradient_target(const MatrixPairField& p, const Vec& x, const Vec& y, double h,
                             const BodyChart& chart) {
  auto fixed_x = [&](const Vec& q) { return p(x, q); };
  return frame_field_gradient(fixed_x, y, h, chart);
}

Tensor3 section_prolongation_rhs(const MatrixPairField& P, const MatrixPairField& Q, const Vec& x,
                                 const Vec& y, double h, const BodyChart& chart) {
  const int n = chart.dim;
  const Mat qv = Q(x, y);
  const Tensor3 dp_x = pair_gradient_source(P, x, y, h, chart);
  const Tensor3 dp_y = pair_gradient_target(P, x, y, h, chart);
  Tensor3 r(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double s = dp_x(j, i, k);
        for (int l = 0; l < n; ++l) s += qv(l, k) * dp_y(j, i, l);
        r(j, i, k) = s;
      }
  return r;
}

} // namespace

GroupoidSection2 prolong_section(const BodyChart& chart, const MatrixPairField& P,
                                 const MatrixPairField& Q, double fd_step) {
  chart.validate();
  GroupoidSection2 out;
  out.chart = chart;
  out.P = P;
  out.Q = Q;
  out.R = [chart, P, Q, fd_step](const Vec& x, const Vec& y) {
    check_invertible_at(P(x, y), x, "P");
    check_invertible_at(Q(x, y), x, "Q");
    return section_prolongation_rhs(P, Q, x, y, fd_step, chart);
  };
  return out;
}

double section_prolongation_residual(const GroupoidSection2& s, const Vec& x, const Vec& y,
                                     double fd_step) {
  const Tensor3 rv = s.R(x, y);
  const Tensor3 expect = section_prolongation_rhs(s.P, s.Q, x, y, fd_step, s.chart);
  return max_abs(rv - expect);
}

SectionIntegrabilityVerdict integrability_test_section(const BodyChart& chart,
                                                       const MatrixPairField& Q, const Vec& z0,
                                                       double tol, const SamplingPlan& plan,
                                                       double fd_step) {
  SectionIntegrabilityVerdict v;
  const auto pts = lattice_points(chart, plan.points_per_axis);

  Rng rng = Rng::stream(plan.seed, 0x6d6f7270u); // morphism triples
  double morph = 0.0;
  const int npts = int(pts.size());
  for (int t = 0; t < plan.random_triples; ++t) {
    const Vec& x = pts[rng.uniform_int(0, npts - 1)];
    const Vec& y = pts[rng.uniform_int(0, npts - 1)];
    const Vec& z = pts[rng.uniform_int(0, npts - 1)];
    morph = std::max(morph, max_abs(Q(y, z) * Q(x, y) - Q(x, z)));
  }
  v.morphism_residual = morph;
  v.is_morphism = morph <= tol;

  // B(x) = Q(z0, x) must have symmetric mixed partials (a Jacobian field).
  auto b_field = [&](const Vec& x) { return Q(z0, x); };
  const int n = chart.dim;
  double closed = 0.0;
  for (const Vec& x : pts) {
    const Tensor3 db = frame_field_gradient(b_field, x, fd_step, chart);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
          closed = std::max(closed, std::fabs(db(j, i, k) - db(j, k, i)));
  }
  v.closedness_residual = closed;
  v.integrable = v.is_morphism && closed <= tol;
  return v;
}

ParallelismIntegrabilityVerdict integrability_test_parallelism2(const Parallelism2& s, double tol,
                                                                const SamplingPlan& plan,
                                                                double fd_step) {
  ParallelismIntegrabilityVerdict v;
  const auto pts = lattice_points(s.chart, plan.points_per_axis);
  for (const Vec& x : pts) {
    v.prolongation_residual = std::max(v.prolongation_residual,
                                       prolongation_residual(s, x, fd_step));
    v.pq_gap = std::max(v.pq_gap, max_abs(s.P(x) - s.Q(x)));
  }
  v.is_prolongation = v.prolongation_residual <= tol;
  v.p_equals_q = v.pq_gap <= tol;

  const MatrixField q = s.Q;
  MatrixPairField gq = [q](const Vec& x, const Vec& y) { return q(y) * inverse(q(x)); };
  const auto sec = integrability_test_section(s.chart, gq, s.chart.center(), tol, plan, fd_step);
  v.q_section_integrable = sec.integrable;
  v.closedness_residual = sec.closedness_residual;
  v.integrable = v.is_prolongation && v.p_equals_q && v.q_section_integrable;
  return v;
}

GroupoidSection2 gbar(const Parallelism2& pbar) {
  GroupoidSection2 out;
  out.chart = pbar.chart;
  const Parallelism2 p = pbar;
  auto jet = [p](const Vec& x, const Vec& y) {
    return compose2(p.frame_at(y), invert2(p.frame_at(x)));
  };
  out.P = [jet](const Vec& x, const Vec& y) { return jet(x, y).P; };
  out.Q = [jet](const Vec& x, const Vec& y) { return jet(x, y).Q; };
  out.R = [jet](const Vec& x, const Vec& y) { return jet(x, y).R; };
  return out;
}

void Crystal::validate() const {
  check_valid(frame);
  if (max_abs(frame.source) > 1e-12)
    fail(ErrorKind::Domain, "crystal frame must have source 0");
  double gap = 0.0;
  for (std::size_t i = 0; i < z0.size(); ++i) gap = std::max(gap, std::fabs(frame.target[i] - z0[i]));
  if (gap > 1e-9) fail(ErrorKind::Domain, "crystal frame must target its anchor point");
}

Crystal Crystal::identity_at(const Vec& z0) {
  Crystal c;
  c.z0 = z0;
  c.frame = identity2(Vec(z0.size(), 0.0));
  c.frame.target = z0;
  return c;
}

Parallelism2 invert_gbar(const GroupoidSection2& section, const Crystal& crystal, double tol,
                         const SamplingPlan& plan) {
  crystal.validate();
  // gbar is invertible precisely on morphism sections
  const auto pts = lattice_points(section.chart, plan.points_per_axis);
  Rng rng = Rng::stream(plan.seed, 0x696e7631u);
  double morph = 0.0;
  for (int t = 0; t < plan.random_triples; ++t) {
    const Vec& x = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    const Vec& y = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    const Vec& z = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    const Jet2 lhs = compose2(section.jet_at(y, z), section.jet_at(x, y));
    const Jet2 rhs = section.jet_at(x, z);
    morph = std::max(morph, max_abs(lhs.P - rhs.P));
    morph = std::max(morph, max_abs(lhs.Q - rhs.Q));
    morph = std::max(morph, max_abs(lhs.R - rhs.R));
  }
  if (morph > tol)
    fail(ErrorKind::Domain, "section is not invertible by gbar: morphism residual above tolerance");

  const GroupoidSection2 sec = section;
  const Crystal cr = crystal;
  Parallelism2 out;
  out.chart = section.chart;
  auto frame = [sec, cr](const Vec& x) { return compose2(sec.jet_at(cr.z0, x), cr.frame); };
  out.P = [frame](const Vec& x) { return frame(x).P; };
  out.Q = [frame](const Vec& x) { return frame(x).Q; };
  out.R = [frame](const Vec& x) { return frame(x).R; };
  return out;
}

Parallelism2 standard_flat_parallelism(const BodyChart& chart) {
  const int n = chart.dim;
  Parallelism2 out;
  out.chart = chart;
  out.P = [n](const Vec&) { return Mat::identity(n); };
  out.Q = [n](const Vec&) { return Mat::identity(n); };
  out.R = [n](const Vec&) { return Tensor3(n); };
  return out;
}

GroupoidSection2 canonical_identity_section(const BodyChart& chart) {
  const int n = chart.dim;
  GroupoidSection2 out;
  out.chart = chart;
  out.P = [n](const Vec&, const Vec&) { return Mat::identity(n); };
  out.Q = [n](const Vec&, const Vec&) { return Mat::identity(n); };
  out.R = [n](const Vec&, const Vec&) { return Tensor3(n); };
  return out;
}

} // namespace cosserat
