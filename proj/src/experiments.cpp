#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "expr.hpp"
#include "io.hpp"
#include "rng.hpp"

namespace plap::lab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config field '" + field + "': " + what);
}

const json& require(const json& config, const std::string& field) {
  if (!config.contains(field)) config_error(field, "missing");
  return config.at(field);
}

geo::Mesh build_mesh(const json& config) {
  const json& spec = require(config, "mesh");
  if (spec.contains("file")) return io::read_mesh(spec.at("file").get<std::string>());
  if (spec.contains("rect")) {
    const auto r = spec.at("rect");
    if (!r.is_array() || r.size() != 4) config_error("mesh.rect", "expected [x0, y0, x1, y1]");
    geo::Rect rect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
    return geo::Mesh::structured(rect, require(spec, "n").get<int>());
  }
  config_error("mesh", "expected either {rect, n} or {file}");
}

field::ScalarField build_scalar(const geo::Mesh& mesh, const json& config,
                                const std::string& field_name) {
  const json& spec = require(config, field_name);
  if (spec.is_string()) return expr::scalar_field_from_expression(mesh, spec.get<std::string>());
  if (spec.is_object() && spec.contains("file")) {
    const auto data = io::read_field(spec.at("file").get<std::string>());
    if (data.site != io::FieldSite::Cell) config_error(field_name, "field file must be cellwise");
    return field::ScalarField(data.as_scalar());
  }
  config_error(field_name, "expected an expression string or {file}");
}

field::MatrixField build_matrix(const geo::Mesh& mesh, const json& config) {
  if (!config.contains("A")) return field::MatrixField::identity(mesh.cell_count());
  const json& spec = config.at("A");
  if (spec.is_string()) {
    if (spec.get<std::string>() == "I") return field::MatrixField::identity(mesh.cell_count());
    config_error("A", "only the shorthand \"I\" is accepted as a string");
  }
  if (spec.is_object() && spec.contains("file")) {
    const auto data = io::read_field(spec.at("file").get<std::string>());
    if (data.site != io::FieldSite::Cell) config_error("A", "field file must be cellwise");
    return field::MatrixField(data.as_matrix());
  }
  if (spec.is_object() && spec.contains("a11")) {
    return expr::matrix_field_from_expressions(
        mesh, spec.at("a11").get<std::string>(),
        spec.value("a12", std::string("0")), spec.at("a22").get<std::string>());
  }
  config_error("A", "expected \"I\", {a11, a12, a22} expressions, or {file}");
}

std::vector<double> build_nodal(const geo::Mesh& mesh, const json& config,
                                const std::string& field_name) {
  const json& spec = require(config, field_name);
  if (spec.is_string()) return expr::nodal_from_expression(mesh, spec.get<std::string>());
  if (spec.is_object() && spec.contains("file")) {
    const auto data = io::read_field(spec.at("file").get<std::string>());
    if (data.site != io::FieldSite::Vertex) config_error(field_name, "field file must be vertexwise");
    return data.as_scalar();
  }
  config_error(field_name, "expected an expression string or {file}");
}

dn::BoundaryDictionary build_dictionary(const geo::Mesh& mesh, const json& config) {
  if (!config.contains("dictionary")) return dn::default_dictionary(mesh, 0, 1.0, true);
  const json& spec = config.at("dictionary");
  if (spec.contains("entries")) {
    dn::BoundaryDictionary dict;
    for (const auto& e : spec.at("entries")) {
      dict.entries.push_back({require(e, "label").get<std::string>(),
                              expr::nodal_from_expression(mesh, require(e, "expr").get<std::string>())});
    }
    dict.validate(mesh);
    return dict;
  }
  return dn::default_dictionary(mesh, spec.value("bumps", 0), spec.value("bump_width_factor", 1.0),
                                spec.value("linears", true));
}

fwd::SolverOptions build_solver_options(const json& config) {
  fwd::SolverOptions opts;
  opts.tol_rel = config.value("tol_rel", 1e-10);
  if (config.contains("tol_abs")) opts.tol_abs = config.at("tol_abs").get<double>();
  if (config.contains("max_iterations")) opts.max_iterations = config.at("max_iterations").get<int>();
  if (config.contains("eps_schedule"))
    opts.eps_schedule = config.at("eps_schedule").get<std::vector<double>>();
  return opts;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
  os << j.dump(2) << '\n';
}

struct RunContext {
  const json& config;
  fs::path out_dir;
  uint64_t seed;
  int threads;
  RunManifest* manifest;

  void emit(const std::string& name) { manifest->outputs.push_back(name); }
  void verdict(const std::string& name, bool pass) { manifest->verdicts[name] = pass; }
  fs::path path(const std::string& name) const { return out_dir / name; }
};

void run_solve(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const auto sigma = build_scalar(mesh, ctx.config, "sigma");
  const auto A = build_matrix(mesh, ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto f = build_nodal(mesh, ctx.config, "f");
  const auto opts = build_solver_options(ctx.config);

  const auto sol = fwd::solve_dirichlet(mesh, sigma, A, p, f, opts);

  io::write_field(io::FieldData::scalar(io::FieldSite::Vertex, sol.u), ctx.path("solution.field"));
  ctx.emit("solution.field");

  double boundary_mismatch = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (mesh.is_boundary_vertex(v)) boundary_mismatch = std::max(boundary_mismatch, std::abs(sol.u[v] - f[v]));

  json summary{{"energy", sol.energy},
               {"residual_norm", sol.residual_norm},
               {"iterations", sol.iterations},
               {"regularization_eps", sol.regularization_eps},
               {"tolerance", sol.tolerance},
               {"critical_fraction", fwd::critical_fraction(
                                         mesh, sol.u, ucp::default_plateau_threshold(mesh, sol.u))},
               {"p", p}};
  write_json(summary, ctx.path("solve.json"));
  ctx.emit("solve.json");

  ctx.verdict("converged", sol.residual_norm <= sol.tolerance);
  ctx.verdict("boundary_match", boundary_mismatch == 0.0);
}

void run_dn(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const auto sigma = build_scalar(mesh, ctx.config, "sigma");
  const auto A = build_matrix(mesh, ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto dict = build_dictionary(mesh, ctx.config);
  const auto opts = build_solver_options(ctx.config);

  const auto table = dn::dn_table(mesh, sigma, A, p, dict, opts, ctx.threads);

  std::vector<std::string> header{"f_id"};
  for (const auto& l : table.labels) header.push_back(l);
  io::CsvWriter csv(header);
  for (size_t i = 0; i < table.labels.size(); ++i) {
    std::vector<std::string> row{table.labels[i]};
    for (double v : table.values[i]) row.push_back(io::CsvWriter::num(v));
    csv.add_row(row);
  }
  csv.write(ctx.path("dn_table.csv").string());
  ctx.emit("dn_table.csv");

  bool diag_ok = true;
  for (size_t i = 0; i < table.labels.size(); ++i) {
    if (!table.row_errors[i].empty()) continue;
    diag_ok = diag_ok && std::abs(table.values[i][i] - table.energies[i]) <=
                             1e-8 * (1.0 + std::abs(table.energies[i]));
  }
  json summary{{"labels", table.labels}, {"energies", table.energies},
               {"row_errors", table.row_errors}, {"p", p}};
  write_json(summary, ctx.path("dn.json"));
  ctx.emit("dn.json");

  ctx.verdict("diagonal_energy_identity", diag_ok);
  ctx.verdict("rows_converged", table.ok());
}

void run_mono(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const auto sigma1 = build_scalar(mesh, ctx.config, "sigma1");
  const auto sigma2 = build_scalar(mesh, ctx.config, "sigma2");
  const auto A = build_matrix(mesh, ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto dict = build_dictionary(mesh, ctx.config);
  const auto opts = build_solver_options(ctx.config);

  bool ordered_up = true, ordered_down = true;
  for (int k = 0; k < mesh.cell_count(); ++k) {
    ordered_up = ordered_up && sigma1[k] >= sigma2[k];
    ordered_down = ordered_down && sigma1[k] <= sigma2[k];
  }
  if (ctx.config.value("assert_ordering", false) && !ordered_up)
    throw std::invalid_argument("mono: ordering sigma1 >= sigma2 violated and assert_ordering set");

  io::CsvWriter csv({"f_id", "lower", "middle", "upper"});
  bool sandwich_ok = true;
  for (const auto& entry : dict.entries) {
    const auto t = mono::monotonicity_triple(mesh, sigma1, sigma2, A, p, entry.values, opts,
                                             entry.label);
    csv.add_row({t.f_id, io::CsvWriter::num(t.lower), io::CsvWriter::num(t.middle),
                 io::CsvWriter::num(t.upper)});
    const double tol = 1e-6 * (1.0 + std::abs(t.upper));
    if (ordered_up) {
      sandwich_ok = sandwich_ok && t.lower <= t.middle + tol && t.middle <= t.upper + tol;
    } else if (ordered_down) {
      sandwich_ok = sandwich_ok && t.lower <= tol && t.middle <= tol && t.upper <= tol;
    }
  }
  csv.write(ctx.path("mono.csv").string());
  ctx.emit("mono.csv");

  if (ordered_up || ordered_down) ctx.verdict("sandwich", sandwich_ok);
}

void run_detect(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const auto sigma2 = build_scalar(mesh, ctx.config, "sigma2");
  const auto A = build_matrix(mesh, ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto dict = build_dictionary(mesh, ctx.config);

  mono::DetectorOptions opts;
  opts.solver = build_solver_options(ctx.config);
  opts.quantile = ctx.config.value("quantile", 0.9);
  opts.gap_rel_tol = ctx.config.value("gap_tol", 1e-6);
  opts.threads = ctx.threads;

  // the oracle's diagonal: measured table or synthesized from a hidden sigma1
  std::map<std::string, double> oracle;
  const json& ospec = require(ctx.config, "oracle");
  if (ospec.contains("sigma1")) {
    const auto sigma1 = build_scalar(mesh, ctx.config["oracle"], "sigma1");
    const auto table = dn::dn_table(mesh, sigma1, A, p, dict, opts.solver, ctx.threads);
    if (!table.ok()) throw std::runtime_error("detect: oracle synthesis failed to converge");
    for (size_t i = 0; i < table.labels.size(); ++i) oracle[table.labels[i]] = table.values[i][i];
  } else if (ospec.contains("csv")) {
    // accepts either two-column label,value files or a dn_table.csv, from
    // which the diagonal entries are extracted
    std::ifstream is(ospec.at("csv").get<std::string>());
    if (!is) config_error("oracle.csv", "cannot open");
    auto split = [](const std::string& line) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      return cells;
    };
    std::string line;
    std::getline(is, line);
    const auto header = split(line);
    const bool is_table = header.size() > 2 && header[0] == "f_id";
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto cells = split(line);
      if (cells.size() < 2) config_error("oracle.csv", "expected label,value rows");
      if (is_table) {
        // diagonal entry: the column whose header matches the row label
        size_t col = 0;
        for (size_t c = 1; c < header.size(); ++c)
          if (header[c] == cells[0]) col = c;
        if (col == 0 || col >= cells.size())
          config_error("oracle.csv", "no diagonal column for row '" + cells[0] + "'");
        oracle[cells[0]] = std::stod(cells[col]);
      } else {
        oracle[cells[0]] = std::stod(cells[1]);
      }
    }
  } else {
    config_error("oracle", "expected {sigma1} or {csv}");
  }

  const auto est = mono::detect_difference_region(mesh, oracle, sigma2, A, p, dict, opts);

  io::write_field(io::FieldData::scalar(io::FieldSite::Cell, est.cell_scores),
                  ctx.path("scores.field"));
  ctx.emit("scores.field");
  std::vector<double> indicator(est.detected.begin(), est.detected.end());
  io::write_field(io::FieldData::scalar(io::FieldSite::Cell, indicator), ctx.path("detected.field"));
  ctx.emit("detected.field");

  io::CsvWriter csv({"f_id", "normalized_gap"});
  for (size_t i = 0; i < est.labels.size(); ++i)
    csv.add_row({est.labels[i], io::CsvWriter::num(est.normalized_gaps[i])});
  csv.write(ctx.path("gaps.csv").string());
  ctx.emit("gaps.csv");

  json summary{{"threshold", est.threshold},
               {"quantile", est.quantile},
               {"detected_cells", static_cast<int>(std::count(indicator.begin(), indicator.end(), 1.0))}};
  if (ctx.config.contains("true_region")) {
    const expr::Expression region(ctx.config.at("true_region").get<std::string>());
    std::vector<uint8_t> truth(mesh.cell_count(), 0);
    for (int k = 0; k < mesh.cell_count(); ++k)
      truth[k] = region.eval(mesh.centroid(k)) > 0.5 ? 1 : 0;
    summary["jaccard"] = mono::jaccard(est.detected, truth);
  }
  write_json(summary, ctx.path("detect.json"));
  ctx.emit("detect.json");

  bool nonneg = true;
  for (double s : est.cell_scores) nonneg = nonneg && s >= 0.0;
  ctx.verdict("scores_nonnegative", nonneg);
}

void run_perturb(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const auto sigma0 = build_scalar(mesh, ctx.config, "sigma0");
  const auto A0 = build_matrix(mesh, ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto f = build_nodal(mesh, ctx.config, "f");
  const auto opts = build_solver_options(ctx.config);
  const auto ladder = ctx.config.contains("ladder")
                          ? ctx.config.at("ladder").get<std::vector<double>>()
                          : perturb::default_eps_ladder();

  std::vector<double> dsigma(mesh.cell_count(), 0.0);
  const json& dspec = require(ctx.config, "delta_sigma");
  if (dspec.is_string() && dspec.get<std::string>() == "random") {
    rng::Stream stream(ctx.seed, "perturb-dsigma");
    for (auto& v : dsigma) v = stream.uniform(-1.0, 1.0);
  } else if (dspec.is_string()) {
    dsigma = expr::Expression(dspec.get<std::string>()).eval_at_centroids(mesh);
  } else {
    config_error("delta_sigma", "expected an expression or \"random\"");
  }

  std::vector<field::SymMat2> dA(mesh.cell_count(), {0.0, 0.0, 0.0});
  if (ctx.config.contains("delta_A") && ctx.config.at("delta_A").is_object()) {
    const auto& aspec = ctx.config.at("delta_A");
    const expr::Expression e11(require(aspec, "a11").get<std::string>());
    const expr::Expression e12(aspec.value("a12", std::string("0")));
    const expr::Expression e22(require(aspec, "a22").get<std::string>());
    for (int k = 0; k < mesh.cell_count(); ++k) {
      const auto c = mesh.centroid(k);
      dA[k] = {e11.eval(c), e12.eval(c), e22.eval(c)};
    }
  }

  const auto study = perturb::gradient_stability_study(mesh, sigma0, A0, p, f, dsigma, dA, ladder,
                                                       opts, ctx.threads);

  io::CsvWriter csv({"eps", "lp_ratio", "sup_norm"});
  for (size_t i = 0; i < ladder.size(); ++i)
    csv.add_row({io::CsvWriter::num(ladder[i]), io::CsvWriter::num(study.lp_ratios[i]),
                 io::CsvWriter::num(study.sup_norms[i])});
  csv.write(ctx.path("perturb.csv").string());
  ctx.emit("perturb.csv");

  json summary{{"fitted_exponent_lp", study.fitted_exponent_lp},
               {"fitted_exponent_sup", study.fitted_exponent_sup},
               {"bound_exponent", study.bound_exponent},
               {"c_fit", study.c_fit},
               {"max_grad_norm_ratio", study.max_grad_norm_ratio},
               {"calibrated_nonvanishing_eps", perturb::kCalibratedNonvanishingEps},
               {"p", p}};
  write_json(summary, ctx.path("perturb.json"));
  ctx.emit("perturb.json");

  ctx.verdict("exponent_bound", study.fitted_exponent_lp >= study.bound_exponent - 0.1);
  ctx.verdict("c_fit_sane", study.c_fit < 1e3);
  if (study.identity_checked) ctx.verdict("p_geq_2_identity", study.identity_ok);
  ctx.verdict("gradient_norm_bounded", study.max_grad_norm_ratio <= 2.0);
}

void run_ucp(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto f = build_nodal(mesh, ctx.config, "f");
  const auto opts = build_solver_options(ctx.config);

  // sigma is needed vertex-sampled for the residual fits; expressions are
  // sampled exactly at both sites, cell field files are promoted (lossy)
  const json& sspec = require(ctx.config, "sigma");
  std::vector<double> sigma_vertex;
  field::ScalarField sigma_cell = build_scalar(mesh, ctx.config, "sigma");
  if (sspec.is_string()) {
    sigma_vertex = expr::Expression(sspec.get<std::string>()).eval_at_vertices(mesh);
  } else {
    sigma_vertex = ucp::promote_sigma_to_vertices(mesh, sigma_cell);
  }

  const auto sol = fwd::solve_dirichlet(mesh, sigma_cell, field::MatrixField::identity(mesh.cell_count()),
                                        p, f, opts);

  const double a = ctx.config.value("a", 0.5 * (p - 2.0));
  const auto cg = ucp::complex_gradient(mesh, sol.u, sigma_cell, a);
  const auto coeffs = ucp::beltrami_coefficients(p);
  const auto residual = ucp::beltrami_residual(mesh, sol.u, sigma_vertex, p);
  const auto stream = ucp::dual_stream_function(mesh, sol.u, sigma_cell, p);
  const double threshold = ctx.config.contains("plateau_threshold")
                               ? ctx.config.at("plateau_threshold").get<double>()
                               : ucp::default_plateau_threshold(mesh, sol.u);
  const auto plateau = ucp::plateau_scan(mesh, sol.u, threshold);

  std::vector<geo::Vec2> Fa(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) Fa[k] = {cg.Fa[k].real(), cg.Fa[k].imag()};
  io::write_field(io::FieldData::vector(io::FieldSite::Cell, Fa), ctx.path("F.field"));
  ctx.emit("F.field");
  io::write_field(io::FieldData::scalar(io::FieldSite::Vertex, stream.v), ctx.path("v.field"));
  ctx.emit("v.field");

  json summary{{"p", p},
               {"exponent_a", a},
               {"beltrami", {{"q1_mag", coeffs.q1_mag},
                             {"q2_mag", coeffs.q2_mag},
                             {"residual", residual.residual},
                             {"cells_used", residual.cells_used},
                             {"q3_sup", residual.q3_sup}}},
               {"dual_stream", {{"q", stream.q},
                                {"dual_residual_norm", stream.dual_residual_norm},
                                {"roundtrip_flux_error", stream.roundtrip_flux_error},
                                {"path_residual", stream.path_residual}}},
               {"plateau", {{"component_count", plateau.component_count},
                            {"total_area_fraction", plateau.total_area_fraction},
                            {"largest_component_fraction", plateau.largest_component_fraction},
                            {"threshold", plateau.threshold},
                            {"red_flag", plateau.red_flag}}},
               {"near_zero_cells", ucp::near_zero_cell_count(cg.Fa, 1e-8)}};
  write_json(summary, ctx.path("ucp.json"));
  ctx.emit("ucp.json");

  ctx.verdict("beltrami_ellipticity", coeffs.q1_mag + coeffs.q2_mag < 1.0);
  ctx.verdict("h_bound", residual.h_bound_ok);
  ctx.verdict("plateau_no_red_flag", !plateau.red_flag);
}

void run_calibrate(RunContext& ctx) {
  const auto mesh = build_mesh(ctx.config);
  const double p = require(ctx.config, "p").get<double>();
  const auto opts = build_solver_options(ctx.config);
  const auto ladder = ctx.config.contains("ladder")
                          ? ctx.config.at("ladder").get<std::vector<double>>()
                          : std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.02, 0.01};
  const int directions = ctx.config.value("directions", 8);

  const auto cal = perturb::calibrate_eps(mesh, p, ladder, directions, ctx.seed, opts, ctx.threads);

  io::CsvWriter csv({"eps", "min_gradient"});
  for (size_t i = 0; i < cal.ladder.size(); ++i)
    csv.add_row({io::CsvWriter::num(cal.ladder[i]), io::CsvWriter::num(cal.min_gradients[i])});
  csv.write(ctx.path("calibrate.csv").string());
  ctx.emit("calibrate.csv");

  write_json(json{{"eps_star", cal.eps_star}, {"p", p}, {"directions", directions}},
             ctx.path("calibrate.json"));
  ctx.emit("calibrate.json");

  ctx.verdict("breakdown_found", cal.eps_star > 0.0);
}

}  // namespace

bool RunManifest::all_passed() const {
  for (const auto& [name, pass] : verdicts)
    if (!pass) return false;
  return true;
}

nlohmann::json RunManifest::to_json() const {
  return json{{"tool", "plaplab"},    {"version", version}, {"kind", kind},
              {"config_hash", config_hash}, {"seed", seed},       {"threads", threads},
              {"wall_time_ms", wall_time_ms}, {"outputs", outputs}, {"verdicts", verdicts}};
}

uint64_t config_hash(const nlohmann::json& config) { return rng::fnv1a(config.dump()); }

nlohmann::json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open config");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

RunManifest run(const nlohmann::json& config, const std::string& out_dir, uint64_t seed,
                int threads) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.kind = require(config, "kind").get<std::string>();
  manifest.seed = seed;
  manifest.threads = threads;
  {
    std::ostringstream hex;
    hex << std::hex << config_hash(config);
    manifest.config_hash = hex.str();
  }

  fs::create_directories(out_dir);
  RunContext ctx{config, fs::path(out_dir), seed, threads, &manifest};

  if (manifest.kind == "solve") run_solve(ctx);
  else if (manifest.kind == "dn") run_dn(ctx);
  else if (manifest.kind == "mono") run_mono(ctx);
  else if (manifest.kind == "detect") run_detect(ctx);
  else if (manifest.kind == "perturb") run_perturb(ctx);
  else if (manifest.kind == "ucp") run_ucp(ctx);
  else if (manifest.kind == "calibrate-eps") run_calibrate(ctx);
  else config_error("kind", "unknown experiment '" + manifest.kind + "'");

  manifest.outputs.push_back("manifest.json");
  manifest.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  write_json(manifest.to_json(), ctx.path("manifest.json"));
  return manifest;
}

}  // namespace plap::lab
