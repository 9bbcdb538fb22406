#include "cosserat/jets.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace cosserat {

void BodyChart::validate() const {
  if (dim < 1) fail(ErrorKind::Semantic, "chart.dim must be >= 1");
  if (int(box.size()) != dim) fail(ErrorKind::Semantic, "chart.box must have dim entries");
  for (int i = 0; i < dim; ++i)
    if (!(box[i].first < box[i].second)) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "chart.box[%d]: lo must be < hi", i);
      fail(ErrorKind::Semantic, buf);
    }
}

bool BodyChart::contains(const Vec& x, double slack) const {
  if (int(x.size()) != dim) return false;
  for (int i = 0; i < dim; ++i)
    if (x[i] < box[i].first - slack || x[i] > box[i].second + slack) return false;
  return true;
}

Vec BodyChart::center() const {
  Vec c(dim);
  for (int i = 0; i < dim; ++i) c[i] = 0.5 * (box[i].first + box[i].second);
  return c;
}

Vec BodyChart::corner_lo() const {
  Vec c(dim);
  for (int i = 0; i < dim; ++i) c[i] = box[i].first;
  return c;
}

Vec BodyChart::corner_hi() const {
  Vec c(dim);
  for (int i = 0; i < dim; ++i) c[i] = box[i].second;
  return c;
}

namespace {

double point_gap(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

} // namespace

Jet2 identity2(const Vec& x, const BodyChart& chart) {
  if (!chart.contains(x, 1e-12))
    fail(ErrorKind::Domain, "identity2: point outside the chart box");
  return identity2(x);
}

Jet2 identity2(const Vec& x) {
  const int n = int(x.size());
  Jet2 g;
  g.source = x;
  g.target = x;
  g.P = Mat::identity(n);
  g.Q = Mat::identity(n);
  g.R = Tensor3(n);
  return g;
}

Jet2 translation2(const Vec& x, const Vec& y) {
  Jet2 g = identity2(x);
  g.target = y;
  return g;
}

void check_valid(const Jet1& g, double tol) {
  if (g.source.size() != g.target.size() || g.jac.rows() != g.dim() || g.jac.cols() != g.dim())
    fail(ErrorKind::Domain, "Jet1 with inconsistent dimensions");
  if (std::fabs(det(g.jac)) <= tol) fail(ErrorKind::Singular, "Jet1 with singular Jacobian");
}

void check_valid(const Jet2& g, double tol) {
  const int n = g.dim();
  if (int(g.target.size()) != n || g.P.rows() != n || g.P.cols() != n || g.Q.rows() != n ||
      g.Q.cols() != n || g.R.dim() != n)
    fail(ErrorKind::Domain, "Jet2 with inconsistent dimensions");
  if (std::fabs(det(g.P)) <= tol) fail(ErrorKind::Singular, "Jet2 with singular frame part P");
  if (std::fabs(det(g.Q)) <= tol) fail(ErrorKind::Singular, "Jet2 with singular base part Q");
}

Jet2 compose2(const Jet2& g2, const Jet2& g1, double tol) {
  const int n = g1.dim();
  if (g2.dim() != n) fail(ErrorKind::Domain, "compose2: dimension mismatch");
  if (point_gap(g2.source, g1.target) > tol)
    fail(ErrorKind::Composability, "compose2: source(g2) != target(g1)");
  Jet2 out;
  out.source = g1.source;
  out.target = g2.target;
  out.P = g2.P * g1.P;
  out.Q = g2.Q * g1.Q;
  out.R = Tensor3(n);
  // chain rule for the composite frame field C2(psi1(x)) C1(x)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) {
          for (int l = 0; l < n; ++l) s += g2.R(j, m, l) * g1.Q(l, k) * g1.P(m, i);
          s += g2.P(j, m) * g1.R(m, i, k);
        }
        out.R(j, i, k) = s;
      }
  return out;
}

Jet2 invert2(const Jet2& g) {
  const int n = g.dim();
  Mat pi, qi;
  try {
    pi = inverse(g.P);
    qi = inverse(g.Q);
  } catch (const Error&) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "invert2: near-singular jet (det P = %.3g, det Q = %.3g)",
                  det(g.P), det(g.Q));
    fail(ErrorKind::Singular, buf);
  }
  Jet2 out;
  out.source = g.target;
  out.target = g.source;
  out.P = pi;
  out.Q = qi;
  out.R = Tensor3(n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) s += pi(j, a) * g.R(a, b, c) * pi(b, m) * qi(c, l);
        out.R(j, m, l) = -s;
      }
  return out;
}

Jet1 compose1(const Jet1& g2, const Jet1& g1, double tol) {
  if (point_gap(g2.source, g1.target) > tol)
    fail(ErrorKind::Composability, "compose1: source(g2) != target(g1)");
  return Jet1{g1.source, g2.target, g2.jac * g1.jac};
}

Jet1 invert1(const Jet1& g) {
  Mat ji;
  try {
    ji = inverse(g.jac);
  } catch (const Error&) {
    fail(ErrorKind::Singular, "invert1: singular Jacobian");
  }
  return Jet1{g.target, g.source, ji};
}

Jet2 jet2_from_bundle_map(const BaseMap& psi, const FrameField& frame, const Vec& x, double h) {
  const int n = int(x.size());
  Jet2 g;
  g.source = x;
  g.target = psi(x);
  if (!all_finite(g.target)) fail(ErrorKind::Evaluation, "base map not evaluable");
  g.P = frame(x);
  auto base_fn = [&](const Vec& p) { return psi(p); };
  g.Q = fd_jacobian(base_fn, x, h);
  auto frame_fn = [&](const Vec& p) {
    const Mat c = frame(p);
    Vec flat(std::size_t(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) flat[std::size_t(j) * n + i] = c(j, i);
    return flat;
  };
  const Mat dframe = fd_jacobian(frame_fn, x, h); // rows: (j,i) flat, cols: k
  g.R = Tensor3(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) g.R(j, i, k) = dframe(j * n + i, k);
  check_valid(g);
  return g;
}

Jet1 project_frame(const Jet2& g) { return Jet1{g.source, g.target, g.P}; }

Jet1 project_base(const Jet2& g) { return Jet1{g.source, g.target, g.Q}; }

double holonomic_defect(const Jet2& g) {
  const int n = g.dim();
  double m = max_abs(g.P - g.Q);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        m = std::max(m, std::fabs(g.R(j, i, k) - g.R(j, k, i)));
  return m;
}

bool is_holonomic(const Jet2& g, double tol) { return holonomic_defect(g) <= tol; }

std::string jet2_to_json(const Jet2& g) {
  const int n = g.dim();
  nlohmann::json j;
  j["n"] = n;
  j["x"] = g.source;
  j["y"] = g.target;
  auto mat = [n](const Mat& m) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) rows[r][c] = m(r, c);
    return rows;
  };
  j["P"] = mat(g.P);
  j["Q"] = mat(g.Q);
  std::vector<std::vector<std::vector<double>>> r3(
      n, std::vector<std::vector<double>>(n, std::vector<double>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) r3[a][b][c] = g.R(a, b, c);
  j["R"] = r3;
  return j.dump();
}

Jet2 jet2_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Parse, std::string("jet JSON: ") + e.what());
  }
  try {
    const int n = j.at("n").get<int>();
    Jet2 g;
    g.source = j.at("x").get<Vec>();
    g.target = j.at("y").get<Vec>();
    if (int(g.source.size()) != n || int(g.target.size()) != n)
      fail(ErrorKind::Semantic, "jet JSON: x/y length disagrees with n");
    g.P = Mat(n, n);
    g.Q = Mat(n, n);
    g.R = Tensor3(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        g.P(r, c) = j.at("P").at(r).at(c).get<double>();
        g.Q(r, c) = j.at("Q").at(r).at(c).get<double>();
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) g.R(a, b, c) = j.at("R").at(a).at(b).at(c).get<double>();
    check_valid(g);
    return g;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorKind::Semantic, std::string("jet JSON: ") + e.what());
  }
}

Jet2 random_jet2(Rng& rng, const BodyChart& chart, double scale) {
  const int n = chart.dim;
  Jet2 g;
  g.source.resize(n);
  g.target.resize(n);
  for (int i = 0; i < n; ++i) {
    g.source[i] = rng.uniform(chart.box[i].first, chart.box[i].second);
    g.target[i] = rng.uniform(chart.box[i].first, chart.box[i].second);
  }
  auto sample_invertible = [&]() {
    Mat m = Mat::identity(n);
    for (;;) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          m(i, j) = (i == j ? 1.0 : 0.0) + rng.uniform(-scale, scale);
      if (std::fabs(det(m)) > 0.1) return m;
    }
  };
  g.P = sample_invertible();
  g.Q = sample_invertible();
  g.R = Tensor3(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) g.R(j, i, k) = rng.uniform(-scale, scale);
  return g;
}

} // namespace cosserat
