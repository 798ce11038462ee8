/* plaplab: weighted anisotropic p-Laplace laboratory, C API.
 *
 * Every function returns a plap_status; PLAP_OK means success. On failure
 * plap_last_error() returns a thread-local message describing what went
 * wrong. Objects are opaque handles owned by the caller and released with
 * the matching _free function.
 */
#ifndef PLAPLAB_H
#define PLAPLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PLAP_API __declspec(dllexport)
#else
#define PLAP_API __attribute__((visibility("default")))
#endif

typedef enum plap_status {
  PLAP_OK = 0,
  PLAP_ERR_INVALID_ARGUMENT = 1, /* bad sizes, ranges, or classes */
  PLAP_ERR_PARSE = 2,            /* expression or config syntax error */
  PLAP_ERR_CONVERGENCE = 3,      /* solver did not reach tolerance */
  PLAP_ERR_IO = 4,               /* file access or format error */
  PLAP_ERR_INTERNAL = 5
} plap_status;

typedef struct plap_mesh plap_mesh;
typedef struct plap_scalar_field plap_scalar_field;
typedef struct plap_matrix_field plap_matrix_field;
typedef struct plap_nodal plap_nodal;
typedef struct plap_solution plap_solution;

PLAP_API const char* plap_version(void);
PLAP_API const char* plap_last_error(void);
PLAP_API void plap_free_string(char* s);

/* meshes -------------------------------------------------------------- */

/* structured triangulation of [x0,x1] x [y0,y1] with n subdivisions per side */
PLAP_API plap_status plap_mesh_rect(double x0, double y0, double x1, double y1, int n,
                                    plap_mesh** out);
PLAP_API plap_status plap_mesh_read(const char* path, plap_mesh** out);
PLAP_API plap_status plap_mesh_write(const plap_mesh* mesh, const char* path);
PLAP_API int plap_mesh_vertex_count(const plap_mesh* mesh);
PLAP_API int plap_mesh_cell_count(const plap_mesh* mesh);
PLAP_API void plap_mesh_free(plap_mesh* mesh);

/* coefficient fields and boundary data -------------------------------- */

/* expressions use x1, x2, arithmetic (+ - * / ^), sin cos exp abs min max,
 * and the box indicator chi(x1a,x1b,x2a,x2b); scalar fields are sampled at
 * cell centroids, nodal functions at vertices */
PLAP_API plap_status plap_scalar_field_from_expr(const plap_mesh* mesh, const char* expr,
                                                 plap_scalar_field** out);
PLAP_API plap_status plap_scalar_field_from_values(const plap_mesh* mesh, const double* values,
                                                   int count, plap_scalar_field** out);
PLAP_API void plap_scalar_field_free(plap_scalar_field* field);

/* matrix entries a11, a12, a22 as expressions; pass NULL a12 for 0 */
PLAP_API plap_status plap_matrix_field_from_expr(const plap_mesh* mesh, const char* a11,
                                                 const char* a12, const char* a22,
                                                 plap_matrix_field** out);
PLAP_API plap_status plap_matrix_field_identity(const plap_mesh* mesh, plap_matrix_field** out);
PLAP_API void plap_matrix_field_free(plap_matrix_field* field);

PLAP_API plap_status plap_nodal_from_expr(const plap_mesh* mesh, const char* expr,
                                          plap_nodal** out);
PLAP_API plap_status plap_nodal_from_values(const plap_mesh* mesh, const double* values, int count,
                                            plap_nodal** out);
PLAP_API void plap_nodal_free(plap_nodal* nodal);

/* forward solver ------------------------------------------------------- */

/* solves div(sigma |A grad u . grad u|^((p-2)/2) A grad u) = 0 with u = f on
 * the boundary by minimizing the regularized p-Dirichlet energy; tol_rel <= 0
 * selects the default 1e-10 relative tolerance */
PLAP_API plap_status plap_solve(const plap_mesh* mesh, const plap_scalar_field* sigma,
                                const plap_matrix_field* A, double p, const plap_nodal* f,
                                double tol_rel, plap_solution** out);
PLAP_API plap_status plap_solution_values(const plap_solution* sol, double* buffer, int count);
PLAP_API double plap_solution_energy(const plap_solution* sol);
PLAP_API double plap_solution_residual(const plap_solution* sol);
PLAP_API int plap_solution_iterations(const plap_solution* sol);
PLAP_API void plap_solution_free(plap_solution* sol);

/* Dirichlet-to-Neumann pairing <Lambda_sigma(f), g> */
PLAP_API plap_status plap_dn_pairing(const plap_mesh* mesh, const plap_scalar_field* sigma,
                                     const plap_matrix_field* A, double p, const plap_nodal* f,
                                     const plap_nodal* g, double* out);

/* monotonicity triple (lower, middle, upper) of the two-sided DN bound */
PLAP_API plap_status plap_monotonicity_triple(const plap_mesh* mesh,
                                              const plap_scalar_field* sigma1,
                                              const plap_scalar_field* sigma2,
                                              const plap_matrix_field* A, double p,
                                              const plap_nodal* f, double out_triple[3]);

/* experiments ----------------------------------------------------------- */

/* Runs the experiment described by the JSON config (kind: solve | dn | mono
 * | detect | perturb | ucp | calibrate-eps), writing artifacts plus
 * manifest.json into out_dir. kind may be NULL (the config's "kind" field
 * is used) or a kind name, which must match the config when both are given.
 * *manifest_json receives the manifest (free with plap_free_string);
 * *all_passed is 1 when every verdict passed. */
PLAP_API plap_status plap_run_experiment(const char* config_json, const char* kind,
                                         const char* out_dir, uint64_t seed, int threads,
                                         char** manifest_json, int* all_passed);
PLAP_API plap_status plap_run_experiment_file(const char* config_path, const char* kind,
                                              const char* out_dir, uint64_t seed, int threads,
                                              char** manifest_json, int* all_passed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PLAPLAB_H */
