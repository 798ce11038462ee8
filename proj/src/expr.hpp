#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"
#include "geometry.hpp"

namespace plap::expr {

// Parse error carrying the byte offset into the source string.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& msg, size_t offset)
      : std::invalid_argument(msg + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Compiled coefficient expression over the coordinates x1, x2.
//
// Grammar: numeric literals, x1, x2, + - * / ^, parentheses, the functions
// sin cos exp abs min max, and the box indicator chi(x1a,x1b,x2a,x2b).
class Expression {
 public:
  explicit Expression(const std::string& source);
  ~Expression();
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double eval(double x1, double x2) const;
  double eval(geo::Vec2 p) const { return eval(p.x, p.y); }
  const std::string& source() const { return source_; }

  std::vector<double> eval_at_centroids(const geo::Mesh& mesh) const;
  std::vector<double> eval_at_vertices(const geo::Mesh& mesh) const;

  struct Node;

 private:
  std::unique_ptr<Node> root_;
  std::string source_;
};

// Coefficient builders used by the experiment configs.
field::ScalarField scalar_field_from_expression(const geo::Mesh& mesh, const std::string& source);
field::MatrixField matrix_field_from_expressions(const geo::Mesh& mesh, const std::string& a11,
                                                 const std::string& a12, const std::string& a22);
std::vector<double> nodal_from_expression(const geo::Mesh& mesh, const std::string& source);

}  // namespace plap::expr
