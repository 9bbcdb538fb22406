#include <doctest.h>

#include <cmath>

#include "cosserat/gstructure.hpp"

using namespace cosserat;

namespace {

BodyChart box(int n, double lo, double hi) {
  BodyChart c;
  c.dim = n;
  c.box.assign(n, {lo, hi});
  return c;
}

double jet_gap(const Jet2& a, const Jet2& b) {
  double m = max_abs(a.P - b.P);
  m = std::max(m, max_abs(a.Q - b.Q));
  m = std::max(m, max_abs(a.R - b.R));
  return m;
}

JetSolver solver_for(const ResponseFunction& w, const ToleranceConfig& tol,
                     const SamplerConfig& cfg) {
  return [w, tol, cfg](const Vec& z0, const Vec& x) -> std::optional<Jet2> {
    PairSolve ps = solve_material_jet(w, z0, x, tol, cfg);
    if (!ps.converged) return std::nullopt;
    return ps.jet;
  };
}

} // namespace

TEST_CASE("structure_from_groupoid: trivial response admits every frame") {
  auto chart = box(2, 0.0, 1.0);
  ResponseFunction trivial;
  trivial.n = 2;
  trivial.d = 1;
  trivial.name = "constant";
  trivial.eval = [](const Vec&, const Mat&, const Mat&, const Tensor3&) { return Vec{1.0}; };
  SamplerConfig cfg;
  cfg.seed = 3;
  cfg.num_deformations = 8;
  Crystal cr = Crystal::identity_at(Vec{0.5, 0.5});
  auto st = structure_from_groupoid(chart, material_oracle(trivial, cfg, 1e-9), cr,
                                    [](const Vec&, const Vec& x) -> std::optional<Jet2> {
                                      return identity2(x);
                                    });
  Rng rng(5);
  BodyChart c2 = chart;
  for (int k = 0; k < 5; ++k) {
    Jet2 any = random_jet2(rng, c2, 0.5);
    any.source = Vec{0.0, 0.0};
    CHECK(st.membership(any));
  }
}

TEST_CASE("micro_only structure: members carry the crystal's Q part") {
  auto chart = box(2, 0.0, 1.0);
  ResponseFunction w = builtin_media("micro_only", 2);
  SamplerConfig cfg;
  cfg.seed = 7;
  cfg.num_deformations = 12;
  Crystal cr = Crystal::identity_at(Vec{0.5, 0.5});
  auto st = structure_from_groupoid(chart, material_oracle(w, cfg, 1e-9), cr, nullptr);

  // crystal itself is a member (units are in the groupoid)
  CHECK(st.membership(cr.frame));

  Jet2 frame = identity2(Vec{0.0, 0.0});
  frame.target = {0.3, 0.7};
  frame.P(0, 1) = 0.4; // P and R free
  frame.R(1, 0, 1) = -0.2;
  CHECK(st.membership(frame));

  frame.Q(0, 0) = 1.3; // Q must match Q0 = I
  CHECK_FALSE(st.membership(frame));
}

TEST_CASE("non-identity crystal shifts the admissible frame pattern") {
  auto chart = box(2, 0.0, 1.0);
  ResponseFunction w = builtin_media("micro_only", 2);
  SamplerConfig cfg;
  cfg.seed = 41;
  cfg.num_deformations = 12;
  Crystal cr;
  cr.z0 = {0.5, 0.5};
  cr.frame = identity2(Vec{0.0, 0.0});
  cr.frame.target = cr.z0;
  cr.frame.Q(0, 0) = 2.0;
  cr.frame.Q(1, 1) = 0.5; // Q0 != I
  auto st = structure_from_groupoid(chart, material_oracle(w, cfg, 1e-9), cr, nullptr);

  // members carry exactly the crystal's Q part
  Jet2 frame = identity2(Vec{0.0, 0.0});
  frame.target = {0.3, 0.7};
  frame.Q = cr.frame.Q;
  CHECK(st.membership(frame));
  frame.Q = Mat::identity(2);
  CHECK_FALSE(st.membership(frame));
}

TEST_CASE("sampler composes solved jets with the crystal") {
  auto chart = box(1, 0.0, 1.0);
  ResponseFunction w = builtin_media("det_density", 1);
  ToleranceConfig tol;
  tol.abs_tol = 1e-10;
  SamplerConfig cfg;
  cfg.seed = 11;
  cfg.num_deformations = 12;
  Crystal cr = Crystal::identity_at(Vec{0.0});
  auto st = structure_from_groupoid(chart, material_oracle(w, cfg, 1e-8), cr,
                                    solver_for(w, tol, cfg));
  auto frame = st.sampler(Vec{1.0});
  REQUIRE(frame.has_value());
  CHECK(st.membership(*frame));
  CHECK(det(frame->Q) == doctest::Approx(2.0).epsilon(1e-6)); // phi(1)/phi(0)
}

TEST_CASE("associated group samples") {
  auto chart = box(1, 0.0, 1.0);
  SamplerConfig cfg;
  cfg.seed = 13;
  cfg.num_deformations = 30;

  // full_rigid: trivial symmetry group
  ResponseFunction rigid = builtin_media("full_rigid", 1);
  Crystal cr = Crystal::identity_at(Vec{0.4});
  auto els = associated_group_sample(rigid, cr, cfg, 1e-9);
  REQUIRE(els.size() == 1);
  CHECK(jet_gap(els[0], identity2(Vec{0.0})) < 1e-12);

  // micro_only: Q = I with P, R free; conjugation by the identity crystal
  // leaves that pattern
  ResponseFunction micro = builtin_media("micro_only", 1);
  auto els2 = associated_group_sample(micro, cr, cfg, 1e-9);
  CHECK(els2.size() > 1);
  for (const auto& g : els2) {
    CHECK(max_abs(g.source) == 0.0);
    CHECK(max_abs(g.target) == 0.0);
    CHECK(max_abs(g.Q - Mat::identity(1)) < 1e-9);
  }

  // group axioms on samples: compositions and inverses stay in the
  // acceptance region
  for (std::size_t i = 0; i < els2.size(); ++i)
    for (std::size_t j = 0; j < els2.size(); ++j) {
      const Jet2 prod = compose2(els2[i], els2[j]);
      CHECK(max_abs(prod.Q - Mat::identity(1)) < 1e-8);
    }
  for (const auto& g : els2) CHECK(max_abs(invert2(g).Q - Mat::identity(1)) < 1e-8);
}

TEST_CASE("conjugate_structure") {
  auto chart = box(1, 0.0, 1.0);
  ResponseFunction w = builtin_media("micro_only", 1);
  SamplerConfig cfg;
  cfg.seed = 17;
  cfg.num_deformations = 12;
  Crystal cr = Crystal::identity_at(Vec{0.5});
  auto st = structure_from_groupoid(chart, material_oracle(w, cfg, 1e-9), cr, nullptr);

  // identity conjugation preserves membership
  auto same = conjugate_structure(st, identity2(Vec{0.0}));
  Jet2 frame = identity2(Vec{0.0});
  frame.target = {0.3};
  frame.P(0, 0) = 2.0;
  CHECK(same.membership(frame) == st.membership(frame));

  // conjugation by Q = 2I rescales the admissible Q part
  GroupElement2 g = identity2(Vec{0.0});
  g.Q(0, 0) = 2.0;
  auto conj = conjugate_structure(st, g);
  Jet2 scaled = frame;
  scaled.Q(0, 0) = 2.0;
  CHECK(conj.membership(scaled));
  CHECK_FALSE(conj.membership(frame));

  // double conjugation round-trips membership on samples
  auto back = conjugate_structure(conj, invert2(g));
  Rng rng(19);
  BodyChart c2 = chart;
  for (int k = 0; k < 10; ++k) {
    Jet2 any = random_jet2(rng, c2, 0.5);
    any.source = Vec{0.0};
    CHECK(back.membership(any) == st.membership(any));
  }

  // conjugated group samples
  auto els = associated_group_sample(w, cr, cfg, 1e-9);
  st.group_samples = els;
  auto conj2 = conjugate_structure(st, g);
  CHECK(conj2.group_samples.size() == els.size());
  for (std::size_t i = 0; i < els.size(); ++i) {
    const Jet2 expect = compose2(compose2(invert2(g), els[i]), g);
    CHECK(jet_gap(conj2.group_samples[i], expect) < 1e-12);
  }
}

TEST_CASE("standard_flat structure") {
  auto chart = box(2, -1.0, 1.0);
  // trivial group: members are exactly the canonical frames
  auto st = standard_flat(chart, {});
  const Vec x{0.4, -0.3};
  Jet2 s = translation2(Vec{0.0, 0.0}, x);
  CHECK(st.membership(s));
  Jet2 off = s;
  off.P(0, 1) = 0.2;
  CHECK_FALSE(st.membership(off));

  // with a sampled group element the orbit widens
  GroupElement2 g = identity2(Vec{0.0, 0.0});
  g.P(0, 1) = 0.2;
  auto st2 = standard_flat(chart, {identity2(Vec{0.0, 0.0}), g});
  CHECK(st2.membership(off));
  CHECK(st2.membership(s));

  // gbar of the trivial standard flat is the canonical identity section
  auto sec = gbar(standard_flat_parallelism(chart));
  Jet2 j = sec.jet_at(Vec{0.1, 0.2}, Vec{-0.5, 0.4});
  CHECK(max_abs(j.P - Mat::identity(2)) < 1e-12);
  CHECK(max_abs(j.Q - Mat::identity(2)) < 1e-12);
  CHECK(max_abs(j.R) < 1e-12);
}

TEST_CASE("round trip: sections of the uniform-reference structure reproduce the groupoid") {
  auto chart = box(1, 0.0, 1.0);
  ResponseFunction w = builtin_media("det_density", 1);
  ToleranceConfig tol;
  tol.abs_tol = 1e-10;
  SamplerConfig cfg;
  cfg.seed = 23;
  cfg.num_deformations = 12;
  auto oracle = material_oracle(w, cfg, 1e-7);
  Crystal cr = Crystal::identity_at(Vec{0.5});
  auto st = structure_from_groupoid(chart, oracle, cr, solver_for(w, tol, cfg));

  const auto pts = lattice_points(chart, 5);
  for (const Vec& x : pts)
    for (const Vec& y : pts) {
      auto zx = st.sampler(x);
      auto zy = st.sampler(y);
      REQUIRE(zx.has_value());
      REQUIRE(zy.has_value());
      const Jet2 through = compose2(*zy, invert2(*zx), 1e-9); // x -> y
      CHECK(oracle(through).pass);
    }
}

TEST_CASE("crystal transport along a passing jet yields the same structure") {
  auto chart = box(1, 0.0, 1.0);
  ResponseFunction w = builtin_media("micro_only", 1);
  SamplerConfig cfg;
  cfg.seed = 29;
  cfg.num_deformations = 12;
  auto oracle = material_oracle(w, cfg, 1e-9);

  Crystal cr = Crystal::identity_at(Vec{0.25});
  // transport: compose the crystal with a member jet z0 -> z1
  Jet2 link = translation2(Vec{0.25}, Vec{0.75}); // member of micro_only
  link.P(0, 0) = 1.5;                             // P free
  Crystal cr2;
  cr2.z0 = {0.75};
  cr2.frame = compose2(link, cr.frame, 1e-9);

  auto st1 = structure_from_groupoid(chart, oracle, cr, nullptr);
  auto st2 = structure_from_groupoid(chart, oracle, cr2, nullptr);
  Rng rng(31);
  BodyChart c2 = chart;
  for (int k = 0; k < 12; ++k) {
    Jet2 any = random_jet2(rng, c2, 0.5);
    any.source = Vec{0.0};
    CHECK(st1.membership(any) == st2.membership(any));
  }
}

TEST_CASE("structures are closed under the right action of sampled group elements") {
  auto chart = box(1, 0.0, 1.0);
  ResponseFunction w = builtin_media("micro_only", 1);
  SamplerConfig cfg;
  cfg.seed = 37;
  cfg.num_deformations = 16;
  Crystal cr = Crystal::identity_at(Vec{0.5});
  auto st = structure_from_groupoid(chart, material_oracle(w, cfg, 1e-9), cr, nullptr);
  st.group_samples = associated_group_sample(w, cr, cfg, 1e-9);
  REQUIRE(st.group_samples.size() > 1);

  Jet2 member = identity2(Vec{0.0});
  member.target = {0.3};
  member.P(0, 0) = 1.7;
  REQUIRE(st.membership(member));
  for (const GroupElement2& g : st.group_samples)
    CHECK(st.membership(compose2(member, g, 1e-9)));
}
