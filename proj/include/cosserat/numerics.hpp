#pragma once

// Self-contained numeric kernel: small dense matrices, rank-3 coefficient
// arrays, central-difference Jacobians, fixed-step RK4 flows and a damped
// Gauss-Newton least-squares solver. Everything is deterministic given the
// inputs and the seed carried in ToleranceConfig.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cosserat/errors.hpp"

namespace cosserat {

using Vec = std::vector<double>;

struct ToleranceConfig {
  double fd_step = 1e-5;   // chart units
  double abs_tol = 1e-9;
  double rel_tol = 1e-12;
  int max_iter = 200;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Dense row-major matrix. Sizes stay small (n <= 8 style); no sparse paths.
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  Mat transposed() const;

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Vec operator*(const Mat& a, const Vec& v);

double det(const Mat& a);
// Partial-pivot LU inverse; throws ErrorKind::Singular when |det| is negligible.
Mat inverse(const Mat& a);
// Solves a x = b for square a (LU with partial pivoting).
Vec solve(const Mat& a, const Vec& b);

double max_abs(const Mat& a);
double max_abs(const Vec& v);

// Rank-3 coefficient array T(j,i,k), j the output index. n^3 doubles, flat.
class Tensor3 {
public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), a_(std::size_t(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int j, int i, int k) { return a_[(std::size_t(j) * n_ + i) * n_ + k]; }
  double operator()(int j, int i, int k) const { return a_[(std::size_t(j) * n_ + i) * n_ + k]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

private:
  int n_ = 0;
  std::vector<double> a_;
};

Tensor3 operator+(const Tensor3& a, const Tensor3& b);
Tensor3 operator-(const Tensor3& a, const Tensor3& b);
double max_abs(const Tensor3& t);

bool all_finite(const Vec& v);

// Deterministic RNG stream. Bit-identical sequences for identical seeds;
// uniforms are built directly from the raw 64-bit output so results do not
// depend on library distribution internals.
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  // Derives an independent stream for a named sub-task of a parent seed.
  static Rng stream(std::uint64_t seed, std::uint64_t tag);

  std::uint64_t next_u64();
  double uniform(double lo, double hi); // in [lo, hi)
  int uniform_int(int lo, int hi);      // inclusive bounds

private:
  std::uint64_t s_;
};

using VecFn = std::function<Vec(const Vec&)>;

// Central-difference Jacobian of f: R^n -> R^m at x, entrywise error O(h^2).
// Propagates evaluation failures as ErrorKind::Evaluation with the offending
// stencil point in the message.
Mat fd_jacobian(const VecFn& f, const Vec& x, double h);

using FlowFn = std::function<Vec(double, const Vec&)>;

// Classical fixed-step RK4; global error O((t/steps)^4). Throws
// ErrorKind::FlowEscape with the last valid time when the state leaves the
// finite range.
Vec integrate_flow(const FlowFn& v, Vec s0, double t, int steps);

struct LeastSquaresResult {
  Vec solution;
  double residual_norm = 0.0; // max-norm of the residual at the solution
  bool converged = false;
  int iterations = 0;
};

// Levenberg-Marquardt style damped Gauss-Newton with fd Jacobians.
// Terminates on residual <= abs_tol, step <= rel_tol, or max_iter.
LeastSquaresResult solve_least_squares(const VecFn& residual, Vec guess,
                                       const ToleranceConfig& cfg);

} // namespace cosserat
