#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fields.hpp"
#include "geometry.hpp"

namespace plap::io {

// Text mesh format: header line "mesh 2d", then "v x y b" per vertex
// (b in {0,1} boundary flag), then "t i j k" per triangle (0-based).
void write_mesh(const geo::Mesh& mesh, const std::string& path);
geo::Mesh read_mesh(const std::string& path);
void write_mesh(const geo::Mesh& mesh, std::ostream& os);
geo::Mesh read_mesh(std::istream& is, const std::string& origin);

enum class FieldKind { Scalar, Vector, Matrix };
enum class FieldSite { Cell, Vertex };

// Generic field container for serialization: one row of components per
// entity. scalar -> 1 value, vector -> 2, matrix -> 3 (a11 a12 a22).
struct FieldData {
  FieldKind kind = FieldKind::Scalar;
  FieldSite site = FieldSite::Cell;
  std::vector<std::vector<double>> rows;

  static FieldData scalar(FieldSite site, std::vector<double> values);
  static FieldData vector(FieldSite site, const std::vector<geo::Vec2>& values);
  static FieldData matrix(FieldSite site, const std::vector<field::SymMat2>& values);

  std::vector<double> as_scalar() const;
  std::vector<geo::Vec2> as_vector() const;
  std::vector<field::SymMat2> as_matrix() const;
};

// Field format: header "field scalar|vector|matrix cell|vertex" followed by
// one line per entity.
void write_field(const FieldData& field, const std::string& path);
FieldData read_field(const std::string& path);

// CSV with a header row; cells formatted with max_digits10 so that
// identical runs produce bit-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  void write(const std::string& path) const;
  static std::string num(double v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

}  // namespace plap::io
