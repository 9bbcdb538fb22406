#include "cosserat/algebroid.hpp"

#include <cmath>

namespace cosserat {

VectorField anchor(const Section1& s) {
  return [s](const Vec& x) { return s(x).v; };
}

VectorField anchor(const Section2& s) {
  return [s](const Vec& x) { return s(x).v; };
}

Vec Derivation::apply(const VectorField& x_field, const Vec& at, double fd_step) const {
  const int n = chart.dim;
  const Vec comp = x_field(at);
  const Mat m = mat(at);
  const Vec b = base(at);
  const Mat jac = fd_jacobian_in_box(x_field, at, fd_step, chart);
  Vec out(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out[j] += m(j, i) * comp[i] + jac(j, i) * b[i];
  return out;
}

Derivation section_to_derivation(const BodyChart& chart, const Section1& s) {
  Derivation d;
  d.chart = chart;
  d.mat = [s](const Vec& x) { return s(x).mat; };
  d.base = anchor(s);
  return d;
}

Section1 bracket(const BodyChart& chart, const Section1& a, const Section1& b, double fd_step) {
  return [chart, a, b, fd_step](const Vec& x) -> Section1Value {
    const int n = chart.dim;
    const Section1Value av = a(x);
    const Section1Value bv = b(x);
    const Mat ja = fd_jacobian_in_box([&](const Vec& p) { return a(p).v; }, x, fd_step, chart);
    const Mat jb = fd_jacobian_in_box([&](const Vec& p) { return b(p).v; }, x, fd_step, chart);
    Section1Value out;
    out.v.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) out.v[i] += jb(i, k) * av.v[k] - ja(i, k) * bv.v[k];

    auto mat_flat = [n](const Section1& s) {
      return [s, n](const Vec& p) {
        const Mat m = s(p).mat;
        Vec f(std::size_t(n) * n);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) f[std::size_t(r) * n + c] = m(r, c);
        return f;
      };
    };
    const Mat da = fd_jacobian_in_box(mat_flat(a), x, fd_step, chart);
    const Mat db = fd_jacobian_in_box(mat_flat(b), x, fd_step, chart);
    out.mat = av.mat * bv.mat - bv.mat * av.mat;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          s += db(r * n + c, k) * av.v[k] - da(r * n + c, k) * bv.v[k];
        out.mat(r, c) += s;
      }
    return out;
  };
}

namespace {

void require_in_chart(const BodyChart& chart, const Vec& x, const char* who) {
  // generous slack: RK4 stage points may peek slightly past a box wall
  double span = 0.0;
  for (const auto& [lo, hi] : chart.box) span = std::max(span, hi - lo);
  if (!chart.contains(x, 0.05 * span))
    fail(ErrorKind::FlowEscape, std::string(who) + ": flow left domain");
}

} // namespace

Jet1 exponential(const BodyChart& chart, const Section1& s, double t, const Vec& x, int steps) {
  const int n = chart.dim;
  if (!chart.contains(x, 1e-12)) fail(ErrorKind::Domain, "exponential: point outside chart");
  Jet1 out;
  if (t == 0.0) { // Exp_0 is the identity jet, exactly
    out.source = x;
    out.target = x;
    out.jac = Mat::identity(n);
    return out;
  }
  // state = (position, Phi row-major), dPhi = Phi mat(pos)
  Vec state(n + n * n, 0.0);
  for (int i = 0; i < n; ++i) state[i] = x[i];
  for (int i = 0; i < n; ++i) state[n + i * n + i] = 1.0;
  auto deriv = [&](double, const Vec& st) {
    Vec pos(st.begin(), st.begin() + n);
    require_in_chart(chart, pos, "exponential");
    const Section1Value val = s(pos);
    Vec d(n + n * n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = val.v[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += st[n + i * n + k] * val.mat(k, j);
        d[n + i * n + j] = acc;
      }
    return d;
  };
  const Vec end = integrate_flow(deriv, state, t, steps);
  out.source = Vec(end.begin(), end.begin() + n);
  out.target = x;
  out.jac = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.jac(i, j) = end[n + i * n + j];
  return out;
}

Jet2 exponential2(const BodyChart& chart, const Section2& s, double t, const Vec& x, int steps) {
  const int n = chart.dim;
  if (!chart.contains(x, 1e-12)) fail(ErrorKind::Domain, "exponential2: point outside chart");
  if (t == 0.0) return identity2(x);
  const int np = n * n;
  Vec state(n + 2 * np + n * np, 0.0);
  for (int i = 0; i < n; ++i) state[i] = x[i];
  for (int i = 0; i < n; ++i) {
    state[n + i * n + i] = 1.0;
    state[n + np + i * n + i] = 1.0;
  }
  auto deriv = [&](double, const Vec& st) {
    Vec pos(st.begin(), st.begin() + n);
    require_in_chart(chart, pos, "exponential2");
    const Section2Value val = s(pos);
    Vec d(st.size(), 0.0);
    for (int i = 0; i < n; ++i) d[i] = val.v[i];
    auto P = [&](int i, int j) { return st[n + i * n + j]; };
    auto Q = [&](int i, int j) { return st[n + np + i * n + j]; };
    auto R = [&](int j, int i, int k) { return st[n + 2 * np + (j * n + i) * n + k]; };
    // left translation of the section value along the current jet
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double dp = 0.0, dq = 0.0;
        for (int k = 0; k < n; ++k) {
          dp += P(i, k) * val.vP(k, j);
          dq += Q(i, k) * val.vQ(k, j);
        }
        d[n + i * n + j] = dp;
        d[n + np + i * n + j] = dq;
      }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int c = 0; c < n; ++c) acc += R(j, i, c) * val.vQ(c, l);
          for (int m = 0; m < n; ++m)
            acc += R(j, m, l) * val.vP(m, i) + P(j, m) * val.vR(m, i, l);
          d[n + 2 * np + (j * n + i) * n + l] = acc;
        }
    return d;
  };
  const Vec end = integrate_flow(deriv, state, t, steps);
  Jet2 out;
  out.source = Vec(end.begin(), end.begin() + n);
  out.target = x;
  out.P = Mat(n, n);
  out.Q = Mat(n, n);
  out.R = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.P(i, j) = end[n + i * n + j];
      out.Q(i, j) = end[n + np + i * n + j];
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) out.R(j, i, k) = end[n + 2 * np + (j * n + i) * n + k];
  return out;
}

namespace {

// Plain central differences in one slot of a pair field. Pair-field
// derivatives are evaluated off closed-form sections, so no box clamping.
Mat d_source(const MatrixPairField& f, const Vec& x, const Vec& y, int axis, double h) {
  Vec xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  return (1.0 / (2.0 * h)) * (f(xp, y) - f(xm, y));
}

Mat d_target(const MatrixPairField& f, const Vec& x, const Vec& y, int axis, double h) {
  Vec yp = y, ym = y;
  yp[axis] += h;
  ym[axis] -= h;
  return (1.0 / (2.0 * h)) * (f(x, yp) - f(x, ym));
}

// d^2 P / dx^l dx^k at (x, y), both derivatives in the source slot.
Mat d2_source_source(const MatrixPairField& f, const Vec& x, const Vec& y, int l, int k,
                     double h) {
  Vec xp = x, xm = x;
  xp[l] += h;
  xm[l] -= h;
  return (1.0 / (2.0 * h)) * (d_source(f, xp, y, k, h) - d_source(f, xm, y, k, h));
}

// d^2 P / dx^l dy^m at (x, y).
Mat d2_source_target(const MatrixPairField& f, const Vec& x, const Vec& y, int l, int m,
                     double h) {
  Vec xp = x, xm = x;
  xp[l] += h;
  xm[l] -= h;
  return (1.0 / (2.0 * h)) * (d_target(f, xp, y, m, h) - d_target(f, xm, y, m, h));
}

// vR of the prolonged section for coordinate direction l at the diagonal.
Tensor3 prolong_vr_direction(const MatrixPairField& P, const MatrixPairField& Q, const Vec& x,
                             int l, double h) {
  const int n = int(x.size());
  const Mat q = Q(x, x);
  const Mat dq = d_source(Q, x, x, l, h);
  Tensor3 vr(n);
  std::vector<Mat> dpy(n), d2xy(n);
  for (int m = 0; m < n; ++m) {
    dpy[m] = d_target(P, x, x, m, h);
    d2xy[m] = d2_source_target(P, x, x, l, m, h);
  }
  for (int k = 0; k < n; ++k) {
    const Mat d2xx = d2_source_source(P, x, x, l, k, h);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double acc = d2xx(j, i);
        for (int m = 0; m < n; ++m) acc += dq(m, k) * dpy[m](j, i) + q(m, k) * d2xy[m](j, i);
        vr(j, i, k) = acc;
      }
  }
  return vr;
}

} // namespace

Section2Linear algebroid_prolong(const BodyChart& chart, const MatrixPairField& P,
                                 const MatrixPairField& Q, double fd2) {
  const int n = chart.dim;
  Section2Linear out;
  out.chart = chart;
  out.gen_P = P;
  out.gen_Q = Q;
  out.eval = [P, Q, fd2, n](const Vec& x, const Vec& w) -> Section2Value {
    Section2Value val;
    val.v = w;
    val.vP = Mat(n, n);
    val.vQ = Mat(n, n);
    val.vR = Tensor3(n);
    for (int l = 0; l < n; ++l) {
      if (w[l] == 0.0) continue;
      const Mat dp = d_source(P, x, x, l, fd2);
      const Mat dq = d_source(Q, x, x, l, fd2);
      const Tensor3 vr = prolong_vr_direction(P, Q, x, l, fd2);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          val.vP(j, i) += w[l] * dp(j, i);
          val.vQ(j, i) += w[l] * dq(j, i);
          for (int k = 0; k < n; ++k) val.vR(j, i, k) += w[l] * vr(j, i, k);
        }
    }
    return val;
  };
  return out;
}

double algebroid_integrability_residual(const Section2Linear& lam, const SamplingPlan& plan,
                                        double fd2) {
  if (!lam.gen_P || !lam.gen_Q)
    fail(ErrorKind::Insufficient,
         "algebroid integrability: generating groupoid sections unavailable");
  const int n = lam.chart.dim;
  const MatrixPairField& P = *lam.gen_P;
  double worst = 0.0;
  Vec w(n, 0.0);
  for (const Vec& x : lattice_points(lam.chart, std::max(2, plan.points_per_axis / 2 + 1))) {
    for (int l = 0; l < n; ++l) {
      w[l] = 1.0;
      const Section2Value val = lam.eval(x, w);
      w[l] = 0.0;
      worst = std::max(worst, max_abs(val.vQ));
      for (int k = 0; k < n; ++k) {
        const Mat d2xx = d2_source_source(P, x, x, l, k, fd2);
        const Mat d2xy = d2_source_target(P, x, x, l, k, fd2);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::fabs(val.vR(j, i, k) - d2xx(j, i) - d2xy(j, i)));
      }
    }
  }
  return worst;
}

ChristoffelField christoffels(const BodyChart& chart, const LinearSection1& lam,
                              const SamplingPlan& plan, double tol) {
  const int n = chart.dim;
  // pointwise linearity over functions, spot-checked on sampled directions
  const auto pts = lattice_points(chart, std::max(2, plan.points_per_axis / 2 + 1));
  Rng rng = Rng::stream(plan.seed, 0x6c696e31u);
  double viol = 0.0;
  for (int trial = 0; trial < std::max(8, plan.random_triples); ++trial) {
    const Vec& x = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    Vec w1(n), w2(n), combo(n);
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < n; ++i) {
      w1[i] = rng.uniform(-1.0, 1.0);
      w2[i] = rng.uniform(-1.0, 1.0);
      combo[i] = a * w1[i] + b * w2[i];
    }
    const Mat mc = lam(x, combo).mat;
    const Mat m1 = lam(x, w1).mat;
    const Mat m2 = lam(x, w2).mat;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        viol = std::max(viol, std::fabs(mc(r, c) - a * m1(r, c) - b * m2(r, c)));
  }
  if (viol > tol)
    fail(ErrorKind::Domain,
         "christoffels: not a linear section (violation " + std::to_string(viol) + ")");

  ChristoffelField out;
  out.chart = chart;
  out.gamma = [lam, n](const Vec& x) {
    Tensor3 g(n);
    Vec w(n, 0.0);
    for (int j = 0; j < n; ++j) {
      w[j] = 1.0;
      const Mat m = lam(x, w).mat;
      w[j] = 0.0;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) g(k, i, j) = m(k, i);
    }
    return g;
  };
  return out;
}

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

Tensor4 curvature(const ChristoffelField& gamma, const Vec& x, double fd_step) {
  const int n = gamma.chart.dim;
  const Tensor3 g = gamma.gamma(x);
  auto flat = [&](const Vec& p) {
    const Tensor3 t = gamma.gamma(p);
    Vec f(std::size_t(n) * n * n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f[(std::size_t(k) * n + i) * n + j] = t(k, i, j);
    return f;
  };
  const Mat dg = fd_jacobian_in_box(flat, x, fd_step, gamma.chart);
  auto dgamma = [&](int k, int i, int j, int axis) { return dg((k * n + i) * n + j, axis); };

  // coefficient of d_l in R(d_i, d_j) d_k for
  // R(X,Y) = nabla_[X,Y] - nabla_X nabla_Y + nabla_Y nabla_X
  Tensor4 r(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = dgamma(l, k, i, j) - dgamma(l, k, j, i);
          for (int m = 0; m < n; ++m)
            acc += g(m, k, i) * g(l, m, j) - g(m, k, j) * g(l, m, i);
          r(l, k, i, j) = acc;
        }
  return r;
}

CovDer2 second_order_covder(const Section2Linear& lam) { return CovDer2{lam.chart, lam}; }

Mat CovDer2::nabla1_coeff(const Vec& x, int j) const {
  Vec w(chart.dim, 0.0);
  w[j] = 1.0;
  return lam.eval(x, w).vQ;
}

Tensor3 CovDer2::vertical_coeff(const Vec& x, int j) const {
  Vec w(chart.dim, 0.0);
  w[j] = 1.0;
  return lam.eval(x, w).vR;
}

Mat CovDer2::frame_rule_coeff(const Vec& x, int k) const {
  Vec w(chart.dim, 0.0);
  w[k] = 1.0;
  return lam.eval(x, w).vP;
}

namespace {

// A vector field on FM in coordinates (x, Z): components on d_i and d/dx^i_j.
struct FrameBundleFieldValue {
  Vec a; // n components on d_i
  Mat b; // n x n components on d/dx^i_j
};
using FrameBundleField = std::function<FrameBundleFieldValue(const Vec&, const Mat&)>;

// nabla_w applied to a general field: algebraic rules (i)/(ii) plus the
// transport term along the base field (v, vP Z).
FrameBundleFieldValue covder_apply(const CovDer2& cd, const Vec& x, const Mat& Z, const Vec& w,
                                   const FrameBundleField& field, double h) {
  const int n = cd.chart.dim;
  const Section2Value val = cd.lam.eval(x, w);
  const FrameBundleFieldValue fv = field(x, Z);

  // transport along beta = (v, vP Z) by central differences in (x, Z)
  const Mat vpz = val.vP * Z;
  FrameBundleFieldValue transport;
  transport.a.assign(n, 0.0);
  transport.b = Mat(n, n);
  auto accumulate = [&](const FrameBundleFieldValue& plus, const FrameBundleFieldValue& minus,
                        double rate) {
    for (int i = 0; i < n; ++i) transport.a[i] += rate * (plus.a[i] - minus.a[i]) / (2.0 * h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        transport.b(i, j) += rate * (plus.b(i, j) - minus.b(i, j)) / (2.0 * h);
  };
  for (int axis = 0; axis < n; ++axis) {
    if (val.v[axis] == 0.0) continue;
    Vec xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    accumulate(field(xp, Z), field(xm, Z), val.v[axis]);
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (vpz(r, c) == 0.0) continue;
      Mat zp = Z, zm = Z;
      zp(r, c) += h;
      zm(r, c) -= h;
      accumulate(field(x, zp), field(x, zm), vpz(r, c));
    }

  FrameBundleFieldValue out;
  out.a.assign(n, 0.0);
  out.b = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) out.a[k] += val.vQ(k, i) * fv.a[i];
    out.a[k] += transport.a[k];
  }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double acc = transport.b(k, l);
      for (int i = 0; i < n; ++i) acc += val.vR(k, l, i) * fv.a[i] + val.vP(k, i) * fv.b(i, l);
      out.b(k, l) = acc;
    }
  return out;
}

} // namespace

CovDerFlags check_covder_properties(const CovDer2& cd, const SamplingPlan& plan, double tol) {
  const int n = cd.chart.dim;
  CovDerFlags flags;
  const auto pts = lattice_points(cd.chart, std::max(2, plan.points_per_axis / 2 + 1));
  Rng rng = Rng::stream(plan.seed, 0x636f7664u);
  double lin = 0.0, proj = 0.0, leib = 0.0;
  const double h = 1e-5;
  for (int trial = 0; trial < std::max(8, plan.random_triples); ++trial) {
    const Vec& x = pts[rng.uniform_int(0, int(pts.size()) - 1)];
    Vec w1(n), w2(n), combo(n);
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < n; ++i) {
      w1[i] = rng.uniform(-1.0, 1.0);
      w2[i] = rng.uniform(-1.0, 1.0);
      combo[i] = a * w1[i] + b * w2[i];
    }
    const Section2Value vc = cd.lam.eval(x, combo);
    const Section2Value v1 = cd.lam.eval(x, w1);
    const Section2Value v2 = cd.lam.eval(x, w2);
    for (int r = 0; r < n; ++r) {
      proj = std::max(proj, std::fabs(v1.v[r] - w1[r]));
      for (int c = 0; c < n; ++c) {
        lin = std::max(lin, std::fabs(vc.vP(r, c) - a * v1.vP(r, c) - b * v2.vP(r, c)));
        lin = std::max(lin, std::fabs(vc.vQ(r, c) - a * v1.vQ(r, c) - b * v2.vQ(r, c)));
      }
    }

    // Leibniz spot check: F = x^1 pullback, Ytilde = d_1
    const Mat Z = Mat::identity(n);
    FrameBundleField y_const = [n](const Vec&, const Mat&) {
      FrameBundleFieldValue v;
      v.a.assign(n, 0.0);
      v.a[0] = 1.0;
      v.b = Mat(n, n);
      return v;
    };
    FrameBundleField fy = [n](const Vec& z, const Mat&) {
      FrameBundleFieldValue v;
      v.a.assign(n, 0.0);
      v.a[0] = z[0];
      v.b = Mat(n, n);
      return v;
    };
    const auto dfy = covder_apply(cd, x, Z, w1, fy, h);
    const auto dy = covder_apply(cd, x, Z, w1, y_const, h);
    const double base_f = v1.v[0]; // beta(F) for F = x^1 pullback
    for (int i = 0; i < n; ++i) {
      const double expect = x[0] * dy.a[i] + base_f * (i == 0 ? 1.0 : 0.0);
      leib = std::max(leib, std::fabs(dfy.a[i] - expect));
    }
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        leib = std::max(leib, std::fabs(dfy.b(r, c) - x[0] * dy.b(r, c)));
  }
  flags.function_linear = lin <= tol;
  flags.base_projects = proj <= tol;
  flags.leibniz = leib <= tol;
  // rule (ii) coefficients are read off vP(x) alone: no fibre dependence
  flags.right_invariant = true;
  flags.max_violation = std::max(lin, std::max(proj, leib));
  return flags;
}

ChristoffelField project_nabla1(const Section2Linear& lam) {
  const int n = lam.chart.dim;
  ChristoffelField out;
  out.chart = lam.chart;
  const Section2Linear l = lam;
  out.gamma = [l, n](const Vec& x) {
    Tensor3 g(n);
    Vec w(n, 0.0);
    for (int j = 0; j < n; ++j) {
      w[j] = 1.0;
      const Mat m = l.eval(x, w).vQ;
      w[j] = 0.0;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) g(k, i, j) = m(k, i);
    }
    return g;
  };
  return out;
}

} // namespace cosserat
