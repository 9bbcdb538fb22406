#pragma once

// Closed-form field expressions for configs: arithmetic, ^, parentheses,
// unary minus, the usual transcendental functions, constants pi and e, and
// variables x1..xn (x, y, z accepted as aliases for the first three).

#include <memory>
#include <string>
#include <vector>

#include "cosserat/numerics.hpp"

namespace cosserat {

class Expression {
public:
  struct Node;

  static Expression parse(const std::string& src, int dim);

  double eval(const Vec& x) const;
  const std::string& source() const { return src_; }

private:
  std::shared_ptr<const Node> root_;
  std::string src_;
};

// n x n matrix field from row-major expression entries.
class MatrixExpr {
public:
  MatrixExpr() = default;
  MatrixExpr(const std::vector<std::string>& entries, int dim);

  Mat eval(const Vec& x) const;
  int dim() const { return dim_; }
  const std::vector<std::string>& sources() const { return sources_; }

private:
  int dim_ = 0;
  std::vector<Expression> entries_;
  std::vector<std::string> sources_;
};

// n-component map from expression entries (e.g. a candidate deformation).
class VectorExpr {
public:
  VectorExpr() = default;
  VectorExpr(const std::vector<std::string>& entries, int dim);

  Vec eval(const Vec& x) const;
  int size() const { return int(entries_.size()); }
  const std::vector<std::string>& sources() const { return sources_; }

private:
  std::vector<Expression> entries_;
  std::vector<std::string> sources_;
};

} // namespace cosserat
