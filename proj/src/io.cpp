#include "io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plap::io {

namespace {

[[noreturn]] void io_fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) io_fail(path, "cannot open for reading");
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) io_fail(path, "cannot open for writing");
  return os;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_mesh(const geo::Mesh& mesh, std::ostream& os) {
  os << "mesh 2d\n";
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const auto& p = mesh.vertices()[v];
    os << "v " << format_double(p.x) << ' ' << format_double(p.y) << ' '
       << (mesh.is_boundary_vertex(v) ? 1 : 0) << '\n';
  }
  for (const auto& t : mesh.triangles()) os << "t " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
}

void write_mesh(const geo::Mesh& mesh, const std::string& path) {
  auto os = open_out(path);
  write_mesh(mesh, os);
}

geo::Mesh read_mesh(std::istream& is, const std::string& origin) {
  std::string header;
  if (!std::getline(is, header) || header != "mesh 2d") io_fail(origin, "missing 'mesh 2d' header");
  std::vector<geo::Vec2> vertices;
  std::vector<geo::Triangle> triangles;
  std::vector<uint8_t> flags;
  std::string line;
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x, y;
      int b;
      if (!(ls >> x >> y >> b) || (b != 0 && b != 1))
        io_fail(origin, "malformed vertex line " + std::to_string(lineno));
      vertices.push_back({x, y});
      flags.push_back(static_cast<uint8_t>(b));
    } else if (tag == "t") {
      geo::Triangle t{};
      if (!(ls >> t.v[0] >> t.v[1] >> t.v[2]))
        io_fail(origin, "malformed triangle line " + std::to_string(lineno));
      triangles.push_back(t);
    } else {
      io_fail(origin, "unknown record '" + tag + "' on line " + std::to_string(lineno));
    }
  }
  return geo::Mesh::from_raw(std::move(vertices), std::move(triangles), std::move(flags));
}

geo::Mesh read_mesh(const std::string& path) {
  auto is = open_in(path);
  return read_mesh(is, path);
}

namespace {

size_t components(FieldKind kind) {
  switch (kind) {
    case FieldKind::Scalar: return 1;
    case FieldKind::Vector: return 2;
    case FieldKind::Matrix: return 3;
  }
  return 1;
}

const char* kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::Scalar: return "scalar";
    case FieldKind::Vector: return "vector";
    case FieldKind::Matrix: return "matrix";
  }
  return "scalar";
}

}  // namespace

FieldData FieldData::scalar(FieldSite site, std::vector<double> values) {
  FieldData f;
  f.kind = FieldKind::Scalar;
  f.site = site;
  f.rows.reserve(values.size());
  for (double v : values) f.rows.push_back({v});
  return f;
}

FieldData FieldData::vector(FieldSite site, const std::vector<geo::Vec2>& values) {
  FieldData f;
  f.kind = FieldKind::Vector;
  f.site = site;
  f.rows.reserve(values.size());
  for (auto v : values) f.rows.push_back({v.x, v.y});
  return f;
}

FieldData FieldData::matrix(FieldSite site, const std::vector<field::SymMat2>& values) {
  FieldData f;
  f.kind = FieldKind::Matrix;
  f.site = site;
  f.rows.reserve(values.size());
  for (const auto& m : values) f.rows.push_back({m.a11, m.a12, m.a22});
  return f;
}

std::vector<double> FieldData::as_scalar() const {
  if (kind != FieldKind::Scalar) throw std::runtime_error("field: not a scalar field");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[0]);
  return out;
}

std::vector<geo::Vec2> FieldData::as_vector() const {
  if (kind != FieldKind::Vector) throw std::runtime_error("field: not a vector field");
  std::vector<geo::Vec2> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r[0], r[1]});
  return out;
}

std::vector<field::SymMat2> FieldData::as_matrix() const {
  if (kind != FieldKind::Matrix) throw std::runtime_error("field: not a matrix field");
  std::vector<field::SymMat2> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r[0], r[1], r[2]});
  return out;
}

void write_field(const FieldData& field, const std::string& path) {
  auto os = open_out(path);
  os << "field " << kind_name(field.kind) << ' '
     << (field.site == FieldSite::Cell ? "cell" : "vertex") << '\n';
  for (const auto& row : field.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << format_double(row[i]);
    os << '\n';
  }
}

FieldData read_field(const std::string& path) {
  auto is = open_in(path);
  std::string tag, kind, site;
  if (!(is >> tag >> kind >> site) || tag != "field") io_fail(path, "missing field header");
  FieldData f;
  if (kind == "scalar") f.kind = FieldKind::Scalar;
  else if (kind == "vector") f.kind = FieldKind::Vector;
  else if (kind == "matrix") f.kind = FieldKind::Matrix;
  else io_fail(path, "unknown field kind '" + kind + "'");
  if (site == "cell") f.site = FieldSite::Cell;
  else if (site == "vertex") f.site = FieldSite::Vertex;
  else io_fail(path, "unknown field site '" + site + "'");

  const size_t nc = components(f.kind);
  std::string line;
  std::getline(is, line);  // rest of header line
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row(nc);
    for (size_t i = 0; i < nc; ++i) {
      if (!(ls >> row[i])) io_fail(path, "malformed field line " + std::to_string(lineno));
    }
    f.rows.push_back(std::move(row));
  }
  return f;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::runtime_error("csv: row width mismatch");
  rows_.push_back(std::move(cells));
}

void CsvWriter::write(const std::string& path) const {
  auto os = open_out(path);
  for (size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

std::string CsvWriter::num(double v) { return format_double(v); }

}  // namespace plap::io
