#include "plaplab.h"

#include <cstring>
#include <string>

#include "experiments.hpp"
#include "expr.hpp"
#include "forward.hpp"
#include "io.hpp"
#include "monotonicity.hpp"

struct plap_mesh {
  plap::geo::Mesh mesh;
};
struct plap_scalar_field {
  plap::field::ScalarField field;
};
struct plap_matrix_field {
  plap::field::MatrixField field;
};
struct plap_nodal {
  std::vector<double> values;
};
struct plap_solution {
  plap::fwd::Solution solution;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// maps the C++ error idiom onto status codes; ParseError must be checked
// before its base invalid_argument
template <typename Fn>
plap_status wrap(Fn&& fn) {
  try {
    fn();
    return PLAP_OK;
  } catch (const plap::expr::ParseError& e) {
    set_error(e.what());
    return PLAP_ERR_PARSE;
  } catch (const plap::fwd::ConvergenceFailure& e) {
    set_error(e.what());
    return PLAP_ERR_CONVERGENCE;
  } catch (const nlohmann::json::exception& e) {
    set_error(e.what());
    return PLAP_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return PLAP_ERR_INVALID_ARGUMENT;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return PLAP_ERR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return PLAP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

plap_status run_impl(nlohmann::json config, const char* kind, const char* out_dir, uint64_t seed,
                     int threads, char** manifest_json, int* all_passed) {
  return wrap([&] {
    if (kind) {
      if (config.contains("kind") && config.at("kind").get<std::string>() != kind)
        throw std::invalid_argument("config field 'kind': conflicts with the requested experiment '" +
                                    std::string(kind) + "'");
      config["kind"] = kind;
    }
    const auto manifest = plap::lab::run(config, out_dir, seed, threads);
    if (manifest_json) *manifest_json = dup_string(manifest.to_json().dump(2));
    if (all_passed) *all_passed = manifest.all_passed() ? 1 : 0;
  });
}

}  // namespace

extern "C" {

const char* plap_version(void) { return plap::lab::kToolVersion; }

const char* plap_last_error(void) { return g_last_error.c_str(); }

void plap_free_string(char* s) { delete[] s; }

plap_status plap_mesh_rect(double x0, double y0, double x1, double y1, int n, plap_mesh** out) {
  return wrap([&] {
    *out = new plap_mesh{plap::geo::Mesh::structured({x0, y0, x1, y1}, n)};
  });
}

plap_status plap_mesh_read(const char* path, plap_mesh** out) {
  return wrap([&] { *out = new plap_mesh{plap::io::read_mesh(path)}; });
}

plap_status plap_mesh_write(const plap_mesh* mesh, const char* path) {
  return wrap([&] { plap::io::write_mesh(mesh->mesh, path); });
}

int plap_mesh_vertex_count(const plap_mesh* mesh) { return mesh->mesh.vertex_count(); }

int plap_mesh_cell_count(const plap_mesh* mesh) { return mesh->mesh.cell_count(); }

void plap_mesh_free(plap_mesh* mesh) { delete mesh; }

plap_status plap_scalar_field_from_expr(const plap_mesh* mesh, const char* expr,
                                        plap_scalar_field** out) {
  return wrap([&] {
    *out = new plap_scalar_field{plap::expr::scalar_field_from_expression(mesh->mesh, expr)};
  });
}

plap_status plap_scalar_field_from_values(const plap_mesh* mesh, const double* values, int count,
                                          plap_scalar_field** out) {
  return wrap([&] {
    if (count != mesh->mesh.cell_count())
      throw std::invalid_argument("scalar field: expected one value per cell");
    *out = new plap_scalar_field{
        plap::field::ScalarField(std::vector<double>(values, values + count))};
  });
}

void plap_scalar_field_free(plap_scalar_field* field) { delete field; }

plap_status plap_matrix_field_from_expr(const plap_mesh* mesh, const char* a11, const char* a12,
                                        const char* a22, plap_matrix_field** out) {
  return wrap([&] {
    *out = new plap_matrix_field{
        plap::expr::matrix_field_from_expressions(mesh->mesh, a11, a12 ? a12 : "0", a22)};
  });
}

plap_status plap_matrix_field_identity(const plap_mesh* mesh, plap_matrix_field** out) {
  return wrap([&] {
    *out = new plap_matrix_field{plap::field::MatrixField::identity(mesh->mesh.cell_count())};
  });
}

void plap_matrix_field_free(plap_matrix_field* field) { delete field; }

plap_status plap_nodal_from_expr(const plap_mesh* mesh, const char* expr, plap_nodal** out) {
  return wrap([&] {
    *out = new plap_nodal{plap::expr::nodal_from_expression(mesh->mesh, expr)};
  });
}

plap_status plap_nodal_from_values(const plap_mesh* mesh, const double* values, int count,
                                   plap_nodal** out) {
  return wrap([&] {
    if (count != mesh->mesh.vertex_count())
      throw std::invalid_argument("nodal function: expected one value per vertex");
    *out = new plap_nodal{std::vector<double>(values, values + count)};
  });
}

void plap_nodal_free(plap_nodal* nodal) { delete nodal; }

plap_status plap_solve(const plap_mesh* mesh, const plap_scalar_field* sigma,
                       const plap_matrix_field* A, double p, const plap_nodal* f, double tol_rel,
                       plap_solution** out) {
  return wrap([&] {
    plap::fwd::SolverOptions opts;
    if (tol_rel > 0.0) opts.tol_rel = tol_rel;
    *out = new plap_solution{
        plap::fwd::solve_dirichlet(mesh->mesh, sigma->field, A->field, p, f->values, opts)};
  });
}

plap_status plap_solution_values(const plap_solution* sol, double* buffer, int count) {
  return wrap([&] {
    if (count != static_cast<int>(sol->solution.u.size()))
      throw std::invalid_argument("solution values: buffer size mismatch");
    std::memcpy(buffer, sol->solution.u.data(), sizeof(double) * sol->solution.u.size());
  });
}

double plap_solution_energy(const plap_solution* sol) { return sol->solution.energy; }

double plap_solution_residual(const plap_solution* sol) { return sol->solution.residual_norm; }

int plap_solution_iterations(const plap_solution* sol) { return sol->solution.iterations; }

void plap_solution_free(plap_solution* sol) { delete sol; }

plap_status plap_dn_pairing(const plap_mesh* mesh, const plap_scalar_field* sigma,
                            const plap_matrix_field* A, double p, const plap_nodal* f,
                            const plap_nodal* g, double* out) {
  return wrap([&] {
    *out = plap::dn::dn_pairing(mesh->mesh, sigma->field, A->field, p, f->values, g->values).value;
  });
}

plap_status plap_monotonicity_triple(const plap_mesh* mesh, const plap_scalar_field* sigma1,
                                     const plap_scalar_field* sigma2, const plap_matrix_field* A,
                                     double p, const plap_nodal* f, double out_triple[3]) {
  return wrap([&] {
    const auto t = plap::mono::monotonicity_triple(mesh->mesh, sigma1->field, sigma2->field,
                                                   A->field, p, f->values);
    out_triple[0] = t.lower;
    out_triple[1] = t.middle;
    out_triple[2] = t.upper;
  });
}

plap_status plap_run_experiment(const char* config_json, const char* kind, const char* out_dir,
                                uint64_t seed, int threads, char** manifest_json,
                                int* all_passed) {
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    set_error(e.what());
    return PLAP_ERR_PARSE;
  }
  return run_impl(std::move(config), kind, out_dir, seed, threads, manifest_json, all_passed);
}

plap_status plap_run_experiment_file(const char* config_path, const char* kind,
                                     const char* out_dir, uint64_t seed, int threads,
                                     char** manifest_json, int* all_passed) {
  nlohmann::json config;
  const plap_status st = wrap([&] { config = plap::lab::load_config(config_path); });
  if (st != PLAP_OK) return st;
  return run_impl(std::move(config), kind, out_dir, seed, threads, manifest_json, all_passed);
}

}  // extern "C"
