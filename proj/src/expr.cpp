#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace plap::expr {

namespace {

enum class Op { Const, X1, X2, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Abs, Min, Max, Chi };

}  // namespace

struct Expression::Node {
  Op op = Op::Const;
  double value = 0.0;
  std::vector<std::unique_ptr<Node>> args;

  double eval(double x1, double x2) const {
    switch (op) {
      case Op::Const: return value;
      case Op::X1: return x1;
      case Op::X2: return x2;
      case Op::Add: return args[0]->eval(x1, x2) + args[1]->eval(x1, x2);
      case Op::Sub: return args[0]->eval(x1, x2) - args[1]->eval(x1, x2);
      case Op::Mul: return args[0]->eval(x1, x2) * args[1]->eval(x1, x2);
      case Op::Div: return args[0]->eval(x1, x2) / args[1]->eval(x1, x2);
      case Op::Pow: return std::pow(args[0]->eval(x1, x2), args[1]->eval(x1, x2));
      case Op::Neg: return -args[0]->eval(x1, x2);
      case Op::Sin: return std::sin(args[0]->eval(x1, x2));
      case Op::Cos: return std::cos(args[0]->eval(x1, x2));
      case Op::Exp: return std::exp(args[0]->eval(x1, x2));
      case Op::Abs: return std::abs(args[0]->eval(x1, x2));
      case Op::Min: return std::min(args[0]->eval(x1, x2), args[1]->eval(x1, x2));
      case Op::Max: return std::max(args[0]->eval(x1, x2), args[1]->eval(x1, x2));
      case Op::Chi: {
        const double a = args[0]->eval(x1, x2), b = args[1]->eval(x1, x2);
        const double c = args[2]->eval(x1, x2), d = args[3]->eval(x1, x2);
        return (x1 >= a && x1 <= b && x2 >= c && x2 <= d) ? 1.0 : 0.0;
      }
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

NodePtr make(Op op, double value = 0.0) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->value = value;
  return n;
}

NodePtr make(Op op, NodePtr a) {
  auto n = make(op);
  n->args.push_back(std::move(a));
  return n;
}

NodePtr make(Op op, NodePtr a, NodePtr b) {
  auto n = make(op, std::move(a));
  n->args.push_back(std::move(b));
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
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

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    auto left = parse_term();
    for (;;) {
      if (eat('+')) {
        left = make(Op::Add, std::move(left), parse_term());
      } else if (eat('-')) {
        left = make(Op::Sub, std::move(left), parse_term());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_term() {
    auto left = parse_unary();
    for (;;) {
      if (eat('*')) {
        left = make(Op::Mul, std::move(left), parse_unary());
      } else if (eat('/')) {
        left = make(Op::Div, std::move(left), parse_unary());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make(Op::Neg, parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (eat('^')) return make(Op::Pow, std::move(base), parse_unary());  // right associative
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    pos_ += static_cast<size_t>(end - begin);
    return make(Op::Const, v);
  }

  NodePtr parse_ident() {
    const size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "x1") return make(Op::X1);
    if (name == "x2") return make(Op::X2);

    Op op;
    size_t arity;
    if (name == "sin") { op = Op::Sin; arity = 1; }
    else if (name == "cos") { op = Op::Cos; arity = 1; }
    else if (name == "exp") { op = Op::Exp; arity = 1; }
    else if (name == "abs") { op = Op::Abs; arity = 1; }
    else if (name == "min") { op = Op::Min; arity = 2; }
    else if (name == "max") { op = Op::Max; arity = 2; }
    else if (name == "chi") { op = Op::Chi; arity = 4; }
    else throw ParseError("unknown identifier '" + name + "'", start);

    if (!eat('(')) throw ParseError("expected '(' after '" + name + "'", pos_);
    auto n = make(op);
    for (size_t i = 0; i < arity; ++i) {
      if (i > 0 && !eat(',')) throw ParseError("expected ','", pos_);
      n->args.push_back(parse_sum());
    }
    if (!eat(')')) throw ParseError("expected ')'", pos_);
    return n;
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source) : source_(source) {
  Parser p(source);
  root_ = p.parse();
}

Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::eval(double x1, double x2) const { return root_->eval(x1, x2); }

std::vector<double> Expression::eval_at_centroids(const geo::Mesh& mesh) const {
  std::vector<double> out(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) out[k] = eval(mesh.centroid(k));
  return out;
}

std::vector<double> Expression::eval_at_vertices(const geo::Mesh& mesh) const {
  std::vector<double> out(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) out[v] = eval(mesh.vertices()[v]);
  return out;
}

field::ScalarField scalar_field_from_expression(const geo::Mesh& mesh, const std::string& source) {
  return field::ScalarField(Expression(source).eval_at_centroids(mesh));
}

field::MatrixField matrix_field_from_expressions(const geo::Mesh& mesh, const std::string& a11,
                                                 const std::string& a12, const std::string& a22) {
  const Expression e11(a11), e12(a12), e22(a22);
  std::vector<field::SymMat2> cells(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const geo::Vec2 c = mesh.centroid(k);
    cells[k] = {e11.eval(c), e12.eval(c), e22.eval(c)};
  }
  return field::MatrixField(std::move(cells));
}

std::vector<double> nodal_from_expression(const geo::Mesh& mesh, const std::string& source) {
  return Expression(source).eval_at_vertices(mesh);
}

}  // namespace plap::expr
