#pragma once

// Coordinate fields over the chart: closed-form callbacks or grid samples
// with multilinear interpolation. Derivative stencils respect the box
// boundary by switching to one-sided differences.

#include <functional>
#include <string>
#include <vector>

#include "cosserat/jets.hpp"
#include "cosserat/numerics.hpp"

namespace cosserat {

using ScalarField = std::function<double(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;
using Tensor3Field = std::function<Tensor3(const Vec&)>;

// Fields over ordered point pairs (x, y).
using MatrixPairField = std::function<Mat(const Vec&, const Vec&)>;
using Tensor3PairField = std::function<Tensor3(const Vec&, const Vec&)>;

// m-component field sampled on a uniform lattice over the chart box.
// Evaluation is multilinear inside a cell and extends the edge cell linearly
// outside, so tiny fd stencils at boundary nodes reduce to one-sided
// differences of the lattice values.
class GridField {
public:
  GridField() = default;
  GridField(BodyChart chart, std::vector<int> nodes_per_axis, int components);

  int components() const { return comps_; }
  const BodyChart& chart() const { return chart_; }
  const std::vector<int>& nodes_per_axis() const { return nodes_; }
  std::size_t node_count() const;

  Vec node_point(const std::vector<int>& idx) const;
  Vec& node_value(const std::vector<int>& idx);
  const Vec& node_value(const std::vector<int>& idx) const;

  Vec eval(const Vec& x) const;

  // Fills every node from a closed-form field.
  void sample(const std::function<Vec(const Vec&)>& f);

private:
  std::size_t flat_index(const std::vector<int>& idx) const;

  BodyChart chart_;
  std::vector<int> nodes_;
  int comps_ = 0;
  std::vector<Vec> values_;
};

// Grid-sampled (P, Q, R) triple loaded from CSV. Column layout: the n
// coordinates, then the n^2 entries of P row-major, then Q, then R with
// R(j,i,k) ordered j-major.
struct SampledParallelism {
  GridField P; // n^2 components
  GridField Q; // n^2 components
  GridField R; // n^3 components

  MatrixField p_field() const;
  MatrixField q_field() const;
  Tensor3Field r_field() const;
};

SampledParallelism load_parallelism_csv(const std::string& path, const BodyChart& chart,
                                        const std::vector<int>& nodes_per_axis);

// Uniform lattice over the chart, points_per_axis^dim nodes, endpoints
// included. The deterministic sampling plan for property checks.
std::vector<Vec> lattice_points(const BodyChart& chart, int points_per_axis);

// Central differences, falling back to second-order one-sided stencils when
// x +/- h would leave the box.
Mat fd_jacobian_in_box(const VecFn& f, const Vec& x, double h, const BodyChart& chart);

// Derivative of one matrix-field entry along axis k, boundary aware.
double fd_entry_derivative(const MatrixField& f, const Vec& x, int row, int col, int axis,
                           double h, const BodyChart& chart);

} // namespace cosserat
