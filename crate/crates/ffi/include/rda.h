#ifndef RDA_H
#define RDA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum RdaStatus {
  RDA_STATUS_OK = 0,
  RDA_STATUS_NULL_POINTER = 1,
  RDA_STATUS_INVALID_ARGUMENT = 2,
  RDA_STATUS_IO = 3,
  RDA_STATUS_PARSE = 4,
  RDA_STATUS_INVALID_MESH = 5,
  RDA_STATUS_DEFICIENT_PATCH = 6,
  RDA_STATUS_NOT_POSITIVE_DEFINITE = 7,
  RDA_STATUS_NO_CONVERGENCE = 8,
  RDA_STATUS_PANIC = 9,
} RdaStatus;

/**
 * Solver selection for [`rda_system_solve`].
 */
typedef enum RdaSolver {
  RDA_SOLVER_AUTO = 0,
  RDA_SOLVER_PCG = 1,
  RDA_SOLVER_DIRECT = 2,
} RdaSolver;

/**
 * Opaque mesh handle.
 */
typedef struct RdaMesh RdaMesh;

/**
 * Opaque handle to a solved system.
 */
typedef struct RdaSolution RdaSolution;

/**
 * Opaque handle to an assembled system together with its mesh and
 * reconstruction operator.
 */
typedef struct RdaSystem RdaSystem;

/**
 * Error norms of a solution against the manufactured exact solution.
 */
typedef struct RdaErrors {
  double h;
  double err_l2;
  double err_energy;
} RdaErrors;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *rda_last_error_message(void);

/**
 * Structured mesh of the unit square (`dim` 2) or cube (`dim` 3) with `n`
 * subdivisions per side.
 *
 * # Safety
 * `out_mesh` must be a valid pointer to writable storage for one handle.
 */
enum RdaStatus rda_mesh_structured(size_t dim, size_t n, struct RdaMesh **out_mesh);

/**
 * Reads a Gmsh ASCII mesh file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_mesh` as for
 * [`rda_mesh_structured`].
 */
enum RdaStatus rda_mesh_load_gmsh(const char *path, struct RdaMesh **out_mesh);

/**
 * Spatial dimension and element count of a mesh.
 *
 * # Safety
 * `mesh` must come from an `rda_mesh_*` constructor; the outputs must be
 * writable.
 */
enum RdaStatus rda_mesh_info(const struct RdaMesh *mesh, size_t *dim, size_t *num_elements);

/**
 * Releases a mesh. Null is ignored.
 *
 * # Safety
 * `mesh` must be null or a handle not yet freed.
 */
void rda_mesh_free(struct RdaMesh *mesh);

/**
 * Builds the reconstruction and assembles the system for one of the
 * manufactured examples (`poly2d`, `poly3d`, `ex1`, `ex2`) on `mesh`.
 * `eta <= 0` selects the default penalty; `patch_size == 0` selects the
 * default patch threshold. The mesh is copied, so it may be freed after.
 *
 * # Safety
 * `mesh` must be a live handle, `example` a NUL-terminated string and
 * `out_system` writable.
 */
enum RdaStatus rda_system_assemble(const struct RdaMesh *mesh,
                                   const char *example,
                                   size_t order,
                                   double eta,
                                   size_t patch_size,
                                   struct RdaSystem **out_system);

/**
 * Number of unknowns of an assembled system.
 *
 * # Safety
 * `system` must be a live handle and `num_dofs` writable.
 */
enum RdaStatus rda_system_num_dofs(const struct RdaSystem *system, size_t *num_dofs);

/**
 * Releases a system. Null is ignored.
 *
 * # Safety
 * `system` must be null or a handle not yet freed.
 */
void rda_system_free(struct RdaSystem *system);

/**
 * Solves the system to relative residual `tol`.
 *
 * # Safety
 * `system` must be a live handle and `out_solution` writable.
 */
enum RdaStatus rda_system_solve(const struct RdaSystem *system,
                                enum RdaSolver solver,
                                double tol,
                                size_t max_iter,
                                struct RdaSolution **out_solution);

/**
 * Copies the barycenter values into `values` (capacity `len`) and stores
 * the full length in `written`. With a short buffer nothing is copied and
 * the status is `InvalidArgument`, so callers can query the size first by
 * passing `len == 0`.
 *
 * # Safety
 * `values` must hold `len` doubles (may be null when `len` is 0);
 * `written` must be writable.
 */
enum RdaStatus rda_solution_values(const struct RdaSolution *solution,
                                   double *values,
                                   size_t len,
                                   size_t *written);

/**
 * Iteration count (0 for direct solves) and final relative residual.
 *
 * # Safety
 * `solution` must be a live handle; the outputs must be writable.
 */
enum RdaStatus rda_solution_stats(const struct RdaSolution *solution,
                                  size_t *iterations,
                                  double *relative_residual);

/**
 * Evaluates the reconstructed solution on element `element` at `point`
 * (`dim` coordinates), writing `dim` components to `value`.
 *
 * # Safety
 * `point` and `value` must each hold the mesh dimension's number of doubles.
 */
enum RdaStatus rda_solution_eval(const struct RdaSystem *system,
                                 const struct RdaSolution *solution,
                                 size_t element,
                                 const double *point,
                                 double *value);

/**
 * Errors of `solution` against the system's manufactured exact solution.
 *
 * # Safety
 * `solution` must come from solving `system`; `errors` must be writable.
 */
enum RdaStatus rda_solution_errors(const struct RdaSystem *system,
                                   const struct RdaSolution *solution,
                                   struct RdaErrors *errors);

/**
 * Releases a solution. Null is ignored.
 *
 * # Safety
 * `solution` must be null or a handle not yet freed.
 */
void rda_solution_free(struct RdaSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDA_H */
