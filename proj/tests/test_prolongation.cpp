#include <doctest.h>

#include <cmath>

#include "cosserat/prolongation.hpp"

using namespace cosserat;

namespace {

BodyChart box1(double lo = -0.5, double hi = 0.5) {
  BodyChart c;
  c.dim = 1;
  c.box = {{lo, hi}};
  return c;
}

BodyChart box2(double lo = 1.0, double hi = 2.0) {
  BodyChart c;
  c.dim = 2;
  c.box = {{lo, hi}, {lo, hi}};
  return c;
}

MatrixField const_field(const Mat& m) {
  return [m](const Vec&) { return m; };
}

double jet_gap(const Jet2& a, const Jet2& b) {
  double m = max_abs(a.P - b.P);
  m = std::max(m, max_abs(a.Q - b.Q));
  m = std::max(m, max_abs(a.R - b.R));
  return m;
}

} // namespace

TEST_CASE("prolong_parallelism n=1 worked example") {
  BodyChart chart = box1(0.0, 2.0);
  MatrixField p = [](const Vec& x) {
    Mat m(1, 1);
    m(0, 0) = 1.0 + x[0] * x[0];
    return m;
  };
  MatrixField q = const_field([] { Mat m(1, 1); m(0, 0) = 3.0; return m; }());
  Parallelism2 s = prolong_parallelism(chart, p, q);
  const Vec x{1.0};
  CHECK(s.P(x)(0, 0) == doctest::Approx(2.0));
  CHECK(s.Q(x)(0, 0) == doctest::Approx(3.0));
  CHECK(s.R(x)(0, 0, 0) == doctest::Approx(6.0).epsilon(1e-7)); // Q dP/dx = 3 * 2x
  CHECK(prolongation_residual(s, x) < 1e-6);
}

TEST_CASE("identity fields prolong to the flat section") {
  BodyChart chart = box2();
  Parallelism2 s = prolong_parallelism(chart, const_field(Mat::identity(2)),
                                       const_field(Mat::identity(2)));
  const Vec x{1.5, 1.25};
  CHECK(max_abs(s.P(x) - Mat::identity(2)) == 0.0);
  CHECK(max_abs(s.R(x)) < 1e-10);
}

TEST_CASE("constant P gives R = 0 for any Q") {
  BodyChart chart = box2();
  Mat c(2, 2);
  c(0, 0) = 2.0; c(0, 1) = 0.5; c(1, 0) = -0.5; c(1, 1) = 1.5;
  MatrixField q = [](const Vec& x) {
    Mat m = Mat::identity(2);
    m(0, 1) = x[0];
    return m;
  };
  Parallelism2 s = prolong_parallelism(chart, const_field(c), q);
  CHECK(max_abs(s.R(Vec{1.3, 1.7})) < 1e-9);
}

TEST_CASE("prolongation_residual detects the planted gap") {
  BodyChart chart = box1(0.0, 2.0);
  Parallelism2 s;
  s.chart = chart;
  s.P = [](const Vec& x) { Mat m(1, 1); m(0, 0) = 1.0 + x[0] * x[0]; return m; };
  s.Q = const_field([] { Mat m(1, 1); m(0, 0) = 3.0; return m; }());
  s.R = [](const Vec&) { return Tensor3(1); };
  CHECK(prolongation_residual(s, Vec{1.0}) == doctest::Approx(6.0).epsilon(1e-6));

  Parallelism2 flat;
  flat.chart = chart;
  flat.P = const_field([] { Mat m(1, 1); m(0, 0) = 2.0; return m; }());
  flat.Q = const_field([] { Mat m(1, 1); m(0, 0) = 5.0; return m; }());
  flat.R = [](const Vec&) { return Tensor3(1); };
  CHECK(prolongation_residual(flat, Vec{0.5}) < 1e-9);
}

TEST_CASE("prolong_section n=1 worked example: P = xy, Q = 1") {
  BodyChart chart = box1(1.0, 2.0);
  MatrixPairField p = [](const Vec& x, const Vec& y) {
    Mat m(1, 1);
    m(0, 0) = x[0] * y[0];
    return m;
  };
  MatrixPairField q = [](const Vec&, const Vec&) { return Mat::identity(1); };
  GroupoidSection2 s = prolong_section(chart, p, q);
  const Vec x{1.0}, y{2.0};
  Jet2 j = s.jet_at(x, y);
  CHECK(j.P(0, 0) == doctest::Approx(2.0));
  CHECK(j.Q(0, 0) == doctest::Approx(1.0));
  CHECK(j.R(0, 0, 0) == doctest::Approx(3.0).epsilon(1e-7)); // y + x at (1,2)
  CHECK(section_prolongation_residual(s, x, y) < 1e-6);
}

TEST_CASE("canonical identity section is its own prolongation") {
  BodyChart chart = box2();
  GroupoidSection2 s = canonical_identity_section(chart);
  CHECK(section_prolongation_residual(s, Vec{1.2, 1.4}, Vec{1.8, 1.1}) < 1e-9);
  Jet2 j = s.jet_at(Vec{1.2, 1.4}, Vec{1.8, 1.1});
  CHECK(max_abs(j.P - Mat::identity(2)) == 0.0);
  CHECK(max_abs(j.R) == 0.0);
}

TEST_CASE("section with planted R = 0 shows the prolongation gap") {
  BodyChart chart = box1(1.0, 2.0);
  GroupoidSection2 s;
  s.chart = chart;
  s.P = [](const Vec& x, const Vec& y) { Mat m(1, 1); m(0, 0) = x[0] * y[0]; return m; };
  s.Q = [](const Vec&, const Vec&) { return Mat::identity(1); };
  s.R = [](const Vec&, const Vec&) { return Tensor3(1); };
  CHECK(section_prolongation_residual(s, Vec{1.0}, Vec{2.0}) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("integrability_test_section accepts chart-built sections") {
  // psi(x) = x + x^2/2 on (-0.5, 0.5), so J(x) = 1 + x and B(x) = 1 + x at z0 = 0
  BodyChart chart = box1();
  MatrixPairField q = [](const Vec& x, const Vec& y) {
    Mat m(1, 1);
    m(0, 0) = (1.0 + y[0]) / (1.0 + x[0]);
    return m;
  };
  SamplingPlan plan;
  auto v = integrability_test_section(chart, q, Vec{0.0}, 1e-6, plan);
  CHECK(v.is_morphism);
  CHECK(v.integrable);
  CHECK(v.morphism_residual < 1e-9);
  CHECK(v.closedness_residual < 1e-6);
}

TEST_CASE("identity section is integrable") {
  BodyChart chart = box2();
  GroupoidSection2 s = canonical_identity_section(chart);
  SamplingPlan plan;
  auto v = integrability_test_section(chart, s.Q, chart.center(), 1e-8, plan);
  CHECK(v.integrable);
}

TEST_CASE("non-closed B is rejected with residual near 1") {
  // Q(x,y) = A(y) A(x)^-1 with A = [[1, x1],[0,1]]: morphism exact,
  // mixed partials of B differ by |dA12/dx1 - dA11/dx2| = 1
  BodyChart chart = box2(0.0, 1.0);
  auto a = [](const Vec& x) {
    Mat m = Mat::identity(2);
    m(0, 1) = x[0];
    return m;
  };
  MatrixPairField q = [a](const Vec& x, const Vec& y) { return a(y) * inverse(a(x)); };
  SamplingPlan plan;
  auto v = integrability_test_section(chart, q, chart.center(), 1e-6, plan);
  CHECK(v.is_morphism);
  CHECK(v.morphism_residual < 1e-10);
  CHECK_FALSE(v.integrable);
  CHECK(v.closedness_residual == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("parallelism integrability quadrants (flat / prolongation flags)") {
  SamplingPlan plan;
  const double tol = 1e-6;

  // integrable: standard flat
  BodyChart chart = box1(0.0, 2.0);
  auto flat = standard_flat_parallelism(chart);
  auto v1 = integrability_test_parallelism2(flat, tol, plan);
  CHECK(v1.integrable);
  CHECK(v1.is_prolongation);
  CHECK(v1.p_equals_q);

  // prolongation with P != Q: integrable prolongation but not integrable
  MatrixField p = [](const Vec& x) { Mat m(1, 1); m(0, 0) = 1.0 + x[0] * x[0]; return m; };
  MatrixField q3 = [](const Vec&) { Mat m(1, 1); m(0, 0) = 3.0; return m; };
  auto s2 = prolong_parallelism(chart, p, q3);
  auto v2 = integrability_test_parallelism2(s2, tol, plan);
  CHECK(v2.is_prolongation);
  CHECK_FALSE(v2.p_equals_q);
  CHECK_FALSE(v2.integrable);
  CHECK(v2.q_section_integrable); // constant Q field is integrable

  // R = 0 with nonconstant P and Q = I: not a prolongation
  Parallelism2 s3;
  s3.chart = chart;
  s3.P = p;
  s3.Q = [](const Vec&) { return Mat::identity(1); };
  s3.R = [](const Vec&) { return Tensor3(1); };
  auto v3 = integrability_test_parallelism2(s3, tol, plan);
  CHECK_FALSE(v3.is_prolongation);
  CHECK_FALSE(v3.integrable);

  // P = Q but not a prolongation (planted R)
  Parallelism2 s4;
  s4.chart = chart;
  s4.P = p;
  s4.Q = p;
  s4.R = [](const Vec&) { Tensor3 t(1); t(0, 0, 0) = 9.0; return t; };
  auto v4 = integrability_test_parallelism2(s4, tol, plan);
  CHECK(v4.p_equals_q);
  CHECK_FALSE(v4.is_prolongation);
  CHECK_FALSE(v4.integrable);
}

TEST_CASE("gbar of the flat parallelism is the canonical section") {
  BodyChart chart = box2();
  auto sec = gbar(standard_flat_parallelism(chart));
  Jet2 j = sec.jet_at(Vec{1.2, 1.3}, Vec{1.9, 1.1});
  CHECK(max_abs(j.P - Mat::identity(2)) < 1e-12);
  CHECK(max_abs(j.Q - Mat::identity(2)) < 1e-12);
  CHECK(max_abs(j.R) < 1e-12);
}

TEST_CASE("gbar sections satisfy the morphism property exactly") {
  BodyChart chart = box2();
  MatrixField p = [](const Vec& x) {
    Mat m = Mat::identity(2);
    m(0, 0) = 1.0 + 0.2 * x[1];
    m(1, 0) = 0.1 * x[0];
    return m;
  };
  MatrixField q = [](const Vec& x) {
    Mat m = Mat::identity(2);
    m(0, 1) = 0.3 * x[0] * x[1];
    return m;
  };
  auto pb = prolong_parallelism(chart, p, q);
  auto sec = gbar(pb);
  Rng rng(3);
  const auto pts = lattice_points(chart, 3);
  for (int t = 0; t < 10; ++t) {
    const Vec& x = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    const Vec& y = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    const Vec& z = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    Jet2 lhs = compose2(sec.jet_at(y, z), sec.jet_at(x, y));
    Jet2 rhs = sec.jet_at(x, z);
    CHECK(jet_gap(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("gbar commutes with prolongation: gbar(P1(Q)) = (GP)1(GQ)") {
  BodyChart chart = box1(1.0, 2.0);
  MatrixField p = [](const Vec& x) { Mat m(1, 1); m(0, 0) = 1.0 + 0.5 * x[0]; return m; };
  MatrixField q = [](const Vec& x) { Mat m(1, 1); m(0, 0) = 2.0 + 0.25 * x[0] * x[0]; return m; };
  auto lhs = gbar(prolong_parallelism(chart, p, q));

  MatrixPairField gp = [p](const Vec& x, const Vec& y) { return p(y) * inverse(p(x)); };
  MatrixPairField gq = [q](const Vec& x, const Vec& y) { return q(y) * inverse(q(x)); };
  auto rhs = prolong_section(chart, gp, gq);

  for (const Vec& x : lattice_points(chart, 4))
    for (const Vec& y : lattice_points(chart, 4))
      CHECK(jet_gap(lhs.jet_at(x, y), rhs.jet_at(x, y)) < 1e-5);
}

TEST_CASE("invert_gbar round trips and crystal dependence") {
  BodyChart chart = box1(1.0, 2.0);
  MatrixField p = [](const Vec& x) { Mat m(1, 1); m(0, 0) = 1.0 + 0.5 * x[0]; return m; };
  MatrixField q = [](const Vec& x) { Mat m(1, 1); m(0, 0) = 2.0 + 0.1 * x[0]; return m; };
  auto pb = prolong_parallelism(chart, p, q);
  auto sec = gbar(pb);

  SamplingPlan plan;
  const Vec z0 = chart.center();
  Crystal cr = Crystal::identity_at(z0);
  auto back = invert_gbar(sec, cr, 1e-7, plan);
  auto round = gbar(back);
  for (const Vec& x : lattice_points(chart, 5))
    for (const Vec& y : lattice_points(chart, 5))
      CHECK(jet_gap(round.jet_at(x, y), sec.jet_at(x, y)) < 1e-9);

  // canonical section + identity crystal -> standard flat parallelism
  auto flat = invert_gbar(canonical_identity_section(chart), cr, 1e-9, plan);
  CHECK(max_abs(flat.P(Vec{1.3}) - Mat::identity(1)) < 1e-12);
  CHECK(max_abs(flat.R(Vec{1.3})) < 1e-12);

  // crystals differing by a right group action shift the result by it
  Crystal cr2 = cr;
  cr2.frame.P(0, 0) = 2.0;
  cr2.frame.Q(0, 0) = 1.5;
  cr2.frame.R(0, 0, 0) = 0.25;
  auto alt = invert_gbar(sec, cr2, 1e-7, plan);
  GroupElement2 gbar_elem = compose2(invert2(cr.frame), cr2.frame); // 0 -> 0
  for (const Vec& x : lattice_points(chart, 3)) {
    Jet2 expected = compose2(back.frame_at(x), gbar_elem);
    CHECK(jet_gap(alt.frame_at(x), expected) < 1e-9);
  }

  // a non-morphism section is rejected
  GroupoidSection2 bad = canonical_identity_section(chart);
  bad.P = [](const Vec& x, const Vec& y) {
    Mat m(1, 1);
    m(0, 0) = 1.0 + x[0] * y[0]; // breaks the cocycle identity
    return m;
  };
  CHECK_THROWS_AS(invert_gbar(bad, cr, 1e-9, plan), Error);
}

TEST_CASE("gbar naturality: projections commute with the first-order G map") {
  BodyChart chart;
  chart.dim = 2;
  chart.box = {{1.0, 2.0}, {1.0, 2.0}};
  MatrixField p = [](const Vec& x) {
    Mat m = Mat::identity(2);
    m(0, 1) = 0.3 * x[0];
    m(1, 1) = 1.0 + 0.2 * x[1];
    return m;
  };
  MatrixField q = [](const Vec& x) {
    Mat m = Mat::identity(2);
    m(1, 0) = 0.4 * x[1];
    return m;
  };
  auto sec = gbar(prolong_parallelism(chart, p, q));
  for (const Vec& x : lattice_points(chart, 3))
    for (const Vec& y : lattice_points(chart, 3)) {
      const Jet2 j = sec.jet_at(x, y);
      // frame projection equals the first-order G map of the P field
      CHECK(max_abs(project_frame(j).jac - p(y) * inverse(p(x))) < 1e-10);
      // base projection equals the first-order G map of the Q field
      CHECK(max_abs(project_base(j).jac - q(y) * inverse(q(x))) < 1e-10);
    }
}
