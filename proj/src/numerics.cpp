#include "cosserat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cosserat {

void ToleranceConfig::validate() const {
  if (!(fd_step > 0.0)) fail(ErrorKind::Semantic, "tolerances.fd_step must be > 0");
  if (!(abs_tol > 0.0)) fail(ErrorKind::Semantic, "tolerances.abs_tol must be > 0");
  if (!(rel_tol > 0.0)) fail(ErrorKind::Semantic, "tolerances.rel_tol must be > 0");
  if (max_iter < 1) fail(ErrorKind::Semantic, "tolerances.max_iter must be >= 1");
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::Domain, "matrix product shape mismatch");
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat operator+(const Mat& a, const Mat& b) {
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Mat operator-(const Mat& a, const Mat& b) {
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Mat operator*(double s, const Mat& a) {
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

Vec operator*(const Mat& a, const Vec& v) {
  if (a.cols() != int(v.size())) fail(ErrorKind::Domain, "matrix-vector shape mismatch");
  Vec r(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
  return r;
}

namespace {

// LU with partial pivoting; returns false when a pivot collapses.
bool lu_decompose(Mat& a, std::vector<int>& perm, int& sign) {
  const int n = a.rows();
  perm.resize(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  sign = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(a(r, col));
      if (v > best) { best = v; piv = r; }
    }
    if (best < std::numeric_limits<double>::min() * 16) return false;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(perm[piv], perm[col]);
      sign = -sign;
    }
    const double d = a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / d;
      a(r, col) = f;
      for (int j = col + 1; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return true;
}

Vec lu_solve(const Mat& lu, const std::vector<int>& perm, const Vec& b) {
  const int n = lu.rows();
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (int j = 0; j < i; ++j) s -= lu(i, j) * y[j];
    y[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int j = i + 1; j < n; ++j) s -= lu(i, j) * y[j];
    y[i] = s / lu(i, i);
  }
  return y;
}

std::string point_str(const Vec& x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    s += buf;
    if (i + 1 < x.size()) s += ", ";
  }
  return s + ")";
}

} // namespace

double det(const Mat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::Domain, "det of non-square matrix");
  Mat lu = a;
  std::vector<int> perm;
  int sign = 0;
  if (!lu_decompose(lu, perm, sign)) return 0.0;
  double d = sign;
  for (int i = 0; i < a.rows(); ++i) d *= lu(i, i);
  return d;
}

Mat inverse(const Mat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::Domain, "inverse of non-square matrix");
  const int n = a.rows();
  Mat lu = a;
  std::vector<int> perm;
  int sign = 0;
  if (!lu_decompose(lu, perm, sign))
    fail(ErrorKind::Singular, "singular matrix in inverse()");
  Mat inv(n, n);
  Vec e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vec col = lu_solve(lu, perm, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Vec solve(const Mat& a, const Vec& b) {
  Mat lu = a;
  std::vector<int> perm;
  int sign = 0;
  if (!lu_decompose(lu, perm, sign)) fail(ErrorKind::Singular, "singular system in solve()");
  return lu_solve(lu, perm, b);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
  Tensor3 c(a.dim());
  const std::size_t sz = std::size_t(a.dim()) * a.dim() * a.dim();
  for (std::size_t i = 0; i < sz; ++i) c.data()[i] = a.data()[i] + b.data()[i];
  return c;
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
  Tensor3 c(a.dim());
  const std::size_t sz = std::size_t(a.dim()) * a.dim() * a.dim();
  for (std::size_t i = 0; i < sz; ++i) c.data()[i] = a.data()[i] - b.data()[i];
  return c;
}

double max_abs(const Tensor3& t) {
  double m = 0.0;
  const std::size_t sz = std::size_t(t.dim()) * t.dim() * t.dim();
  for (std::size_t i = 0; i < sz; ++i) m = std::max(m, std::fabs(t.data()[i]));
  return m;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

namespace {
// splitmix64, used both as the generator and to derive sub-streams.
std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
} // namespace

Rng::Rng(std::uint64_t seed) : s_(seed ^ 0xc3a5c85c97cb3127ull) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  s ^= tag * 0x9e3779b97f4a7c15ull;
  const std::uint64_t b = splitmix64(s);
  return Rng(a ^ (b << 1));
}

std::uint64_t Rng::next_u64() { return splitmix64(s_); }

double Rng::uniform(double lo, double hi) {
  const double u = double(next_u64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = std::uint64_t(hi - lo) + 1;
  return lo + int(next_u64() % span);
}

Mat fd_jacobian(const VecFn& f, const Vec& x, double h) {
  if (!(h > 0.0)) fail(ErrorKind::Domain, "fd_jacobian requires h > 0");
  const int n = int(x.size());
  auto eval = [&](const Vec& p) -> Vec {
    Vec y;
    try {
      y = f(p);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorKind::Evaluation, std::string("field not evaluable at ") + point_str(p) + ": " + e.what());
    }
    if (!all_finite(y))
      fail(ErrorKind::Evaluation, "field not evaluable at " + point_str(p) + ": non-finite value");
    return y;
  };
  Mat jac;
  Vec xp = x, xm = x;
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const Vec fp = eval(xp);
    const Vec fm = eval(xm);
    xp[i] = x[i];
    xm[i] = x[i];
    if (i == 0) jac = Mat(int(fp.size()), n);
    for (int r = 0; r < jac.rows(); ++r) jac(r, i) = (fp[r] - fm[r]) / (2.0 * h);
  }
  if (n == 0) jac = Mat(0, 0);
  return jac;
}

Vec integrate_flow(const FlowFn& v, Vec s0, double t, int steps) {
  if (steps < 1) fail(ErrorKind::Domain, "integrate_flow requires steps >= 1");
  const double h = t / steps;
  Vec s = std::move(s0);
  const std::size_t d = s.size();
  Vec k1, k2, k3, k4, tmp(d);
  double time = 0.0;
  for (int step = 0; step < steps; ++step) {
    k1 = v(time, s);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    k2 = v(time + 0.5 * h, tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    k3 = v(time + 0.5 * h, tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = s[i] + h * k3[i];
    k4 = v(time + h, tmp);
    for (std::size_t i = 0; i < d; ++i)
      s[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    if (!all_finite(s)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "flow left domain at t=%.9g", time);
      fail(ErrorKind::FlowEscape, buf);
    }
    time += h;
  }
  return s;
}

LeastSquaresResult solve_least_squares(const VecFn& residual, Vec guess,
                                       const ToleranceConfig& cfg) {
  cfg.validate();
  const int p = int(guess.size());
  LeastSquaresResult out;
  Vec r = residual(guess);
  if (!all_finite(r)) fail(ErrorKind::Evaluation, "residual not evaluable at the initial guess");
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    if (max_abs(r) <= cfg.abs_tol) break;
    const Mat jac = fd_jacobian(residual, guess, cfg.fd_step);
    const Mat jt = jac.transposed();
    const Mat jtj = jt * jac;
    Vec g(p, 0.0);
    for (int i = 0; i < p; ++i)
      for (int q = 0; q < jac.rows(); ++q) g[i] += jt(i, q) * r[q];

    bool stepped = false;
    double step_norm = 0.0;
    for (int attempt = 0; attempt < 24 && !stepped; ++attempt) {
      Mat damped = jtj;
      for (int i = 0; i < p; ++i)
        damped(i, i) += lambda * (jtj(i, i) + 1e-12) + 1e-14;
      Vec delta;
      try {
        delta = solve(damped, g);
      } catch (const Error&) {
        lambda *= 4.0; // singular normal equations: damped retry
        continue;
      }
      Vec trial = guess;
      for (int i = 0; i < p; ++i) trial[i] -= delta[i];
      Vec rt;
      try {
        rt = residual(trial);
      } catch (const Error&) {
        lambda *= 4.0;
        continue;
      }
      if (!all_finite(rt)) {
        lambda *= 4.0;
        continue;
      }
      double c0 = 0.0, c1 = 0.0;
      for (double v : r) c0 += v * v;
      for (double v : rt) c1 += v * v;
      if (c1 <= c0) {
        guess = std::move(trial);
        r = std::move(rt);
        step_norm = max_abs(delta);
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!stepped) break; // damping exhausted: keep best point
    if (step_norm <= cfg.rel_tol * (1.0 + max_abs(guess))) { ++iter; break; }
  }
  out.solution = std::move(guess);
  out.residual_norm = max_abs(r);
  out.iterations = iter;
  out.converged = out.residual_norm <= cfg.abs_tol;
  return out;
}

} // namespace cosserat
