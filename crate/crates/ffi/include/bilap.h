#ifndef BILAP_H
#define BILAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Status code returned by every entry point.
 */
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_INVALID_ARGUMENT = 1,
  BL_STATUS_NULL_POINTER = 2,
  BL_STATUS_SOLVER_FAILURE = 3,
  BL_STATUS_NON_CONVERGENCE = 4,
  BL_STATUS_PANIC = 5,
} BlStatus;

/*
 Ball eigenproblems accepted by [`bl_ritz_solve`].
 */
typedef enum BlProblemKind {
  BL_PROBLEM_KIND_P_STEKLOV = 0,
  BL_PROBLEM_KIND_Q_STEKLOV = 1,
  BL_PROBLEM_KIND_XI_STEKLOV = 2,
  BL_PROBLEM_KIND_WENTZELL = 3,
  BL_PROBLEM_KIND_GAMMA_NAVIER = 4,
  BL_PROBLEM_KIND_LAMBDA_NAVIER = 5,
  BL_PROBLEM_KIND_CLAMPED = 6,
  BL_PROBLEM_KIND_BUCKLING = 7,
  BL_PROBLEM_KIND_LAP_DIRICHLET = 8,
  BL_PROBLEM_KIND_LAP_NEUMANN = 9,
} BlProblemKind;

/*
 Opaque result of [`bl_ritz_solve`].
 */
typedef struct BlSpectrum BlSpectrum;

/*
 First eigenvalues of a cap solve.
 */
typedef struct BlCapValues {
  double lambda1;
  double gamma1;
  double lambda_big1;
  /*
   Largest relative change under node refinement by 16.
   */
  double refinement_change;
  bool converged;
} BlCapValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into this library on the same thread.
 */
const char *bl_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *bl_version(void);

/*
 Dimension of the harmonic homogeneous polynomials of degree `k` in `R^n`.

 # Safety
 `out` must be null or point to writable memory for one `uint64_t`.
 */
enum BlStatus bl_mu(uint32_t n, uint32_t k, uint64_t *out);

/*
 Closed-form Wentzell eigenvalue `k^2 (n + 2k) + beta k (k + n - 2)`.

 # Safety
 `out` must be null or point to writable memory for one `double`.
 */
enum BlStatus bl_wentzell_eigenvalue(uint32_t n, double beta, uint32_t k, double *out);

/*
 Rayleigh-Ritz solve on the ball of radius `radius`; `kind` is a
 [`BlProblemKind`] value. On success `*out` receives a handle to release
 with [`bl_spectrum_free`].

 # Safety
 `out` must be null or point to writable memory for one pointer.
 */
enum BlStatus bl_ritz_solve(int32_t kind,
                            uint32_t n,
                            double radius,
                            uint32_t degree,
                            double beta,
                            struct BlSpectrum **out);

/*
 Number of reported eigenvalues (with multiplicity); 0 for null.

 # Safety
 `h` must be null or a live handle from [`bl_ritz_solve`].
 */
uintptr_t bl_spectrum_len(const struct BlSpectrum *h);

/*
 Eigenvalue `index` (ascending, with multiplicity).

 # Safety
 `h` must be null or a live handle; `out` null or writable.
 */
enum BlStatus bl_spectrum_eigenvalue(const struct BlSpectrum *h, uintptr_t index, double *out);

/*
 Dimension of the denominator kernel removed by the solver.

 # Safety
 `h` must be null or a live handle; `out` null or writable.
 */
enum BlStatus bl_spectrum_deflation_rank(const struct BlSpectrum *h, uintptr_t *out);

/*
 Full result as JSON, owned by the handle; null for a null handle.

 # Safety
 `h` must be null or a live handle. The string dies with the handle.
 */
const char *bl_spectrum_json(const struct BlSpectrum *h);

/*
 Release a handle from [`bl_ritz_solve`]. Null is ignored.

 # Safety
 `h` must be null or a live handle not yet freed.
 */
void bl_spectrum_free(struct BlSpectrum *h);

/*
 Collocation solve on a geodesic cap (`curvature` 1, 0 or -1) sweeping
 angular modes `0..=ell_max`. Returns `NonConvergence` (with `*out`
 filled) when the values move by more than 1e-8 under refinement.

 # Safety
 `out` must be null or point to writable memory for one `BlCapValues`.
 */
enum BlStatus bl_cap_solve(uint32_t n,
                           int32_t curvature,
                           double theta,
                           uint32_t nodes,
                           uint32_t ell_max,
                           struct BlCapValues *out);

/*
 Exact certificates of every Wentzell eigenfunction basis element with
 `k <= kmax`, as a JSON array. Release `*out` with [`bl_string_free`].

 # Safety
 `out` must be null or point to writable memory for one pointer.
 */
enum BlStatus bl_certify_json(uint32_t n, double beta, uint32_t kmax, char **out);

/*
 Run the bound report. `config` is null (defaults) or flat `key=value`
 text. `*out` receives the JSON report (release with [`bl_string_free`]),
 `*all_pass` whether every check passed.

 # Safety
 `config` must be null or NUL-terminated; `out` and `all_pass` must be
 null or writable.
 */
enum BlStatus bl_verify_json(const char *config, char **out, bool *all_pass);

/*
 Release a string returned through an out-parameter. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void bl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BILAP_H */
