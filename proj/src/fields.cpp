#include "cosserat/fields.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cosserat {

GridField::GridField(BodyChart chart, std::vector<int> nodes_per_axis, int components)
    : chart_(std::move(chart)), nodes_(std::move(nodes_per_axis)), comps_(components) {
  chart_.validate();
  if (int(nodes_.size()) != chart_.dim)
    fail(ErrorKind::Semantic, "grid dims must match chart dim");
  std::size_t total = 1;
  for (int n : nodes_) {
    if (n < 2) fail(ErrorKind::Semantic, "grid needs at least 2 nodes per axis");
    total *= std::size_t(n);
  }
  values_.assign(total, Vec(comps_, 0.0));
}

std::size_t GridField::node_count() const { return values_.size(); }

std::size_t GridField::flat_index(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < chart_.dim; ++a) flat = flat * nodes_[a] + idx[a];
  return flat;
}

Vec GridField::node_point(const std::vector<int>& idx) const {
  Vec x(chart_.dim);
  for (int a = 0; a < chart_.dim; ++a) {
    const double lo = chart_.box[a].first, hi = chart_.box[a].second;
    x[a] = lo + (hi - lo) * double(idx[a]) / double(nodes_[a] - 1);
  }
  return x;
}

Vec& GridField::node_value(const std::vector<int>& idx) { return values_[flat_index(idx)]; }
const Vec& GridField::node_value(const std::vector<int>& idx) const {
  return values_[flat_index(idx)];
}

Vec GridField::eval(const Vec& x) const {
  const int n = chart_.dim;
  std::vector<int> cell(n);
  std::vector<double> t(n);
  for (int a = 0; a < n; ++a) {
    const double lo = chart_.box[a].first, hi = chart_.box[a].second;
    const double step = (hi - lo) / double(nodes_[a] - 1);
    double c = std::floor((x[a] - lo) / step);
    c = std::min(std::max(c, 0.0), double(nodes_[a] - 2));
    cell[a] = int(c);
    t[a] = (x[a] - (lo + c * step)) / step; // unclamped: extends edge cells linearly
  }
  Vec out(comps_, 0.0);
  std::vector<int> idx(n);
  const int corners = 1 << n;
  for (int mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const bool hi = mask & (1 << a);
      idx[a] = cell[a] + (hi ? 1 : 0);
      w *= hi ? t[a] : (1.0 - t[a]);
    }
    if (w == 0.0) continue;
    const Vec& v = values_[flat_index(idx)];
    for (int c = 0; c < comps_; ++c) out[c] += w * v[c];
  }
  return out;
}

void GridField::sample(const std::function<Vec(const Vec&)>& f) {
  const int n = chart_.dim;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vec v = f(node_point(idx));
    if (int(v.size()) != comps_)
      fail(ErrorKind::Semantic, "grid sample callback returned wrong component count");
    values_[flat_index(idx)] = std::move(v);
    int a = n - 1;
    while (a >= 0 && ++idx[a] == nodes_[a]) idx[a--] = 0;
    if (a < 0) break;
  }
}

namespace {

Mat unflatten(const Vec& v, int offset, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[offset + i * n + j];
  return m;
}

} // namespace

MatrixField SampledParallelism::p_field() const {
  const GridField g = P;
  const int n = g.chart().dim;
  return [g, n](const Vec& x) { return unflatten(g.eval(x), 0, n); };
}

MatrixField SampledParallelism::q_field() const {
  const GridField g = Q;
  const int n = g.chart().dim;
  return [g, n](const Vec& x) { return unflatten(g.eval(x), 0, n); };
}

Tensor3Field SampledParallelism::r_field() const {
  const GridField g = R;
  const int n = g.chart().dim;
  return [g, n](const Vec& x) {
    const Vec v = g.eval(x);
    Tensor3 t(n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) t(j, i, k) = v[(j * n + i) * n + k];
    return t;
  };
}

SampledParallelism load_parallelism_csv(const std::string& path, const BodyChart& chart,
                                        const std::vector<int>& nodes_per_axis) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open CSV file: " + path);
  const int n = chart.dim;
  const int cols = n + 2 * n * n + n * n * n;

  SampledParallelism sp{GridField(chart, nodes_per_axis, n * n),
                        GridField(chart, nodes_per_axis, n * n),
                        GridField(chart, nodes_per_axis, n * n * n)};

  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, "CSV file is empty: " + path);
  // header row is required; detect and skip it
  std::size_t row_no = 1;
  std::vector<double> cells;
  cells.reserve(cols);
  auto parse_row = [&](const std::string& text) {
    cells.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        cells.push_back(std::stod(item));
      } catch (...) {
        return false;
      }
    }
    return !cells.empty();
  };
  if (parse_row(line))
    fail(ErrorKind::Parse, "CSV is missing the header row: " + path);

  std::size_t loaded = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    if (!parse_row(line)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "CSV row %zu: non-numeric cell", row_no);
      fail(ErrorKind::Parse, buf);
    }
    if (int(cells.size()) != cols) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "CSV row %zu: expected %d columns, got %zu", row_no, cols,
                    cells.size());
      fail(ErrorKind::Parse, buf);
    }
    // locate the nearest node for the given coordinates
    std::vector<int> idx(n);
    for (int a = 0; a < n; ++a) {
      const double lo = chart.box[a].first, hi = chart.box[a].second;
      const double step = (hi - lo) / double(nodes_per_axis[a] - 1);
      const double pos = (cells[a] - lo) / step;
      const int k = int(std::lround(pos));
      if (k < 0 || k >= nodes_per_axis[a] || std::fabs(pos - k) > 1e-6) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "CSV row %zu: coordinate off the declared grid", row_no);
        fail(ErrorKind::Parse, buf);
      }
      idx[a] = k;
    }
    Vec p(cells.begin() + n, cells.begin() + n + n * n);
    Vec q(cells.begin() + n + n * n, cells.begin() + n + 2 * n * n);
    Vec r(cells.begin() + n + 2 * n * n, cells.end());
    sp.P.node_value(idx) = std::move(p);
    sp.Q.node_value(idx) = std::move(q);
    sp.R.node_value(idx) = std::move(r);
    ++loaded;
  }
  if (loaded != sp.P.node_count())
    fail(ErrorKind::Parse, "CSV does not cover every grid node: " + path);
  return sp;
}

std::vector<Vec> lattice_points(const BodyChart& chart, int points_per_axis) {
  const int n = chart.dim;
  if (points_per_axis < 1) fail(ErrorKind::Semantic, "grid resolution must be >= 1");
  std::vector<Vec> pts;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vec x(n);
    for (int a = 0; a < n; ++a) {
      const double lo = chart.box[a].first, hi = chart.box[a].second;
      x[a] = points_per_axis == 1 ? 0.5 * (lo + hi)
                                  : lo + (hi - lo) * double(idx[a]) / double(points_per_axis - 1);
    }
    pts.push_back(std::move(x));
    int a = n - 1;
    while (a >= 0 && ++idx[a] == points_per_axis) idx[a--] = 0;
    if (a < 0) break;
  }
  return pts;
}

Mat fd_jacobian_in_box(const VecFn& f, const Vec& x, double h, const BodyChart& chart) {
  const int n = int(x.size());
  Mat jac;
  for (int a = 0; a < n; ++a) {
    const double lo = chart.box[a].first, hi = chart.box[a].second;
    Vec col;
    Vec p = x;
    if (x[a] + h <= hi && x[a] - h >= lo) {
      p[a] = x[a] + h;
      Vec fp = f(p);
      p[a] = x[a] - h;
      Vec fm = f(p);
      col.resize(fp.size());
      for (std::size_t r = 0; r < col.size(); ++r) col[r] = (fp[r] - fm[r]) / (2.0 * h);
    } else {
      const double dir = (x[a] + h > hi) ? -1.0 : 1.0;
      const Vec f0 = f(x);
      p[a] = x[a] + dir * h;
      Vec f1 = f(p);
      p[a] = x[a] + 2.0 * dir * h;
      Vec f2 = f(p);
      col.resize(f0.size());
      for (std::size_t r = 0; r < col.size(); ++r)
        col[r] = dir * (-3.0 * f0[r] + 4.0 * f1[r] - f2[r]) / (2.0 * h);
    }
    if (!all_finite(col)) fail(ErrorKind::Evaluation, "field not evaluable near stencil");
    if (a == 0) jac = Mat(int(col.size()), n);
    for (std::size_t r = 0; r < col.size(); ++r) jac(int(r), a) = col[r];
  }
  return jac;
}

double fd_entry_derivative(const MatrixField& f, const Vec& x, int row, int col, int axis,
                           double h, const BodyChart& chart) {
  auto g = [&](const Vec& p) { return Vec{f(p)(row, col)}; };
  return fd_jacobian_in_box(g, x, h, chart)(0, axis);
}

} // namespace cosserat
