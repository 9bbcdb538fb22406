#include "cosserat/expression.hpp"

#include <cctype>
#include <cmath>
#include <map>

namespace cosserat {

struct Expression::Node {
  enum class Op {
    Const, Var, Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Tan, Atan, Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh
  };
  Op op;
  double value = 0.0; // Const
  int index = 0;      // Var
  std::shared_ptr<const Node> a, b;

  double eval(const Vec& x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x[index];
      case Op::Add: return a->eval(x) + b->eval(x);
      case Op::Sub: return a->eval(x) - b->eval(x);
      case Op::Mul: return a->eval(x) * b->eval(x);
      case Op::Div: return a->eval(x) / b->eval(x);
      case Op::Pow: return std::pow(a->eval(x), b->eval(x));
      case Op::Neg: return -a->eval(x);
      case Op::Sin: return std::sin(a->eval(x));
      case Op::Cos: return std::cos(a->eval(x));
      case Op::Tan: return std::tan(a->eval(x));
      case Op::Atan: return std::atan(a->eval(x));
      case Op::Exp: return std::exp(a->eval(x));
      case Op::Log: return std::log(a->eval(x));
      case Op::Sqrt: return std::sqrt(a->eval(x));
      case Op::Abs: return std::fabs(a->eval(x));
      case Op::Sinh: return std::sinh(a->eval(x));
      case Op::Cosh: return std::cosh(a->eval(x));
      case Op::Tanh: return std::tanh(a->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int idx) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Var;
  n->index = idx;
  return n;
}

class Parser {
public:
  Parser(const std::string& src, int dim) : s_(src), dim_(dim) {}

  NodePtr run() {
    NodePtr e = sum();
    skip_ws();
    if (pos_ != s_.size())
      fail(ErrorKind::Parse, "expression: trailing input at '" + s_.substr(pos_) + "'");
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr left = product();
    for (;;) {
      if (eat('+')) left = make(Op::Add, left, product());
      else if (eat('-')) left = make(Op::Sub, left, product());
      else return left;
    }
  }

  NodePtr product() {
    NodePtr left = unary();
    for (;;) {
      if (eat('*')) left = make(Op::Mul, left, unary());
      else if (eat('/')) left = make(Op::Div, left, unary());
      else return left;
    }
  }

  // unary minus binds looser than '^', so -x^2 is -(x^2)
  NodePtr unary() {
    if (eat('-')) return make(Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::Pow, base, unary()); // right associative
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail(ErrorKind::Parse, "expression: unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      if (!eat(')')) fail(ErrorKind::Parse, "expression: missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail(ErrorKind::Parse, std::string("expression: unexpected character '") + c + "'");
  }

  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    try {
      const double v = std::stod(s_.substr(pos_, end - pos_));
      pos_ = end;
      return make_const(v);
    } catch (...) {
      fail(ErrorKind::Parse, "expression: bad number near '" + s_.substr(pos_, end - pos_) + "'");
    }
  }

  NodePtr name() {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      ++end;
    const std::string id = s_.substr(pos_, end - pos_);
    pos_ = end;

    static const std::map<std::string, Op> fns = {
        {"sin", Op::Sin},   {"cos", Op::Cos},  {"tan", Op::Tan},  {"atan", Op::Atan},
        {"exp", Op::Exp},   {"log", Op::Log},  {"sqrt", Op::Sqrt}, {"abs", Op::Abs},
        {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh}};
    const auto fn = fns.find(id);
    if (fn != fns.end()) {
      if (!eat('(')) fail(ErrorKind::Parse, "expression: '" + id + "' needs parentheses");
      NodePtr arg = sum();
      if (!eat(')')) fail(ErrorKind::Parse, "expression: missing ')' after " + id);
      return make(fn->second, arg);
    }
    if (id == "pi") return make_const(std::acos(-1.0));
    if (id == "e") return make_const(std::exp(1.0));

    int idx = -1;
    if (id.size() >= 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1]))) {
      idx = std::stoi(id.substr(1)) - 1;
    } else if (id == "x") idx = 0;
    else if (id == "y") idx = 1;
    else if (id == "z") idx = 2;
    if (idx < 0 || idx >= dim_)
      fail(ErrorKind::Parse, "expression: unknown identifier '" + id + "' for dim " +
                                 std::to_string(dim_));
    return make_var(idx);
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& src, int dim) {
  Expression e;
  e.root_ = Parser(src, dim).run();
  e.src_ = src;
  return e;
}

double Expression::eval(const Vec& x) const { return root_->eval(x); }

MatrixExpr::MatrixExpr(const std::vector<std::string>& entries, int dim) : dim_(dim) {
  if (int(entries.size()) != dim * dim)
    fail(ErrorKind::Semantic,
         "matrix field needs dim^2 = " + std::to_string(dim * dim) + " entries, got " +
             std::to_string(entries.size()));
  for (const auto& s : entries) entries_.push_back(Expression::parse(s, dim));
  sources_ = entries;
}

Mat MatrixExpr::eval(const Vec& x) const {
  Mat m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = entries_[i * dim_ + j].eval(x);
  return m;
}

VectorExpr::VectorExpr(const std::vector<std::string>& entries, int dim) {
  for (const auto& s : entries) entries_.push_back(Expression::parse(s, dim));
  sources_ = entries;
}

Vec VectorExpr::eval(const Vec& x) const {
  Vec v(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) v[i] = entries_[i].eval(x);
  return v;
}

} // namespace cosserat
