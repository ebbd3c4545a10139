/* C interface to the periodic Beltrami solver library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a bt_status; on failure the message is
 * available from bt_last_error() on the calling thread.
 */
#ifndef BELTRAMI_BELTRAMI_H
#define BELTRAMI_BELTRAMI_H

#include <stddef.h>
#include <stdint.h>

#if defined(BELTRAMI_BUILDING_LIBRARY)
#define BT_API __attribute__((visibility("default")))
#else
#define BT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bt_status {
  BT_OK = 0,
  BT_ERR_INVALID_ARGUMENT = 1,
  BT_ERR_ELLIPTICITY = 2,
  BT_ERR_SPEC_MISMATCH = 3,
  BT_ERR_MALFORMED_FILE = 4,
  BT_ERR_SAMPLE_COUNT = 5,
  BT_ERR_NON_FINITE = 6,
  BT_ERR_SHEAR_RESAMPLING = 7,
  BT_ERR_LIPSCHITZ_AUDIT = 8,
  BT_ERR_INSUFFICIENT_LEVELS = 9,
  BT_ERR_IO = 10,
  BT_ERR_GRAMMAR = 11,
  BT_ERR_INTERNAL = 99
} bt_status;

typedef struct bt_field bt_field;
typedef struct bt_map bt_map;
typedef struct bt_report bt_report;
typedef struct bt_regularity bt_regularity;

BT_API const char* bt_last_error(void);
BT_API const char* bt_version(void);

/* ---- fields ------------------------------------------------------------ */

/* samples: n*n interleaved (re, im) pairs, row-major; may be NULL for zeros. */
BT_API bt_status bt_field_create(int n, double period, double c_re, double c_im, double d_re, double d_im,
                                 const double* samples, bt_field** out);
/* Samples a forcing expression (`mode:re,im,k1,k2`, `bump:re,im,sigma`, joined by '+'). */
BT_API bt_status bt_field_from_forcing(const char* text, int n, double period, bt_field** out);
BT_API bt_status bt_field_read(const char* path, bt_field** out);
BT_API bt_status bt_field_write(const bt_field* f, const char* path);
BT_API bt_status bt_field_clone(const bt_field* f, bt_field** out);
BT_API void bt_field_free(bt_field* f);

BT_API int bt_field_n(const bt_field* f);
BT_API double bt_field_period(const bt_field* f);
/* affine[4] = {c_re, c_im, d_re, d_im} */
BT_API void bt_field_affine(const bt_field* f, double affine[4]);
/* Copies n*n interleaved periodic samples into out (capacity in doubles). */
BT_API bt_status bt_field_samples(const bt_field* f, double* out, size_t capacity);

BT_API bt_status bt_field_lp_norm(const bt_field* f, double p, int periodic_only, double* out);
BT_API bt_status bt_field_dz(const bt_field* f, bt_field** out);
BT_API bt_status bt_field_dzbar(const bt_field* f, bt_field** out);
BT_API bt_status bt_field_beurling(const bt_field* f, bt_field** out);
BT_API bt_status bt_field_antiderivative_zbar(const bt_field* phi, double c_re, double c_im, bt_field** out);
/* Relative L2 distance of the derivative pairs, ||D(f-g)|| / ||Dg||. */
BT_API bt_status bt_field_derivative_distance(const bt_field* f, const bt_field* g, double* out);

/* ---- maps -------------------------------------------------------------- */

/* Map grammar: `linear:a_re,a_im,b_re,b_im`, `kabs:k`,
 * `smoothsat:a_re,a_im,b_re,b_im,s`, optionally followed by
 * `+zterm:amp,k1,k2` and `+wterm:amp` tokens. */
BT_API bt_status bt_map_parse(const char* text, bt_map** out);
BT_API void bt_map_free(bt_map* m);
BT_API int bt_map_is_autonomous(const bt_map* m);
BT_API double bt_map_k(const bt_map* m);
BT_API bt_status bt_map_eval(const bt_map* m, double z_re, double z_im, double w_re, double w_im, double zeta_re,
                             double zeta_im, double out[2]);

typedef struct bt_linear_fit {
  double a[2];
  double b[2];
  double alpha;
  double C;
  int ok;
} bt_linear_fit;

BT_API bt_status bt_map_estimate_lipschitz(const bt_map* m, int samples, double radius, uint64_t seed, double* out);
BT_API bt_status bt_map_fit_linear_part(const bt_map* m, const double* radii, size_t count, bt_linear_fit* out);

typedef struct bt_conditions {
  int samples;
  double lipschitz_violation;
  double lipschitz_estimate;
  double zero_violation;
  double structure_violation;
  double fitted_A;
  double fitted_B;
  double alpha_used;
  int structure_declared;
  int measurability_assumed;
  int passed;
} bt_conditions;

BT_API bt_status bt_map_check_conditions(const bt_map* m, int samples, double period, uint64_t seed,
                                         bt_conditions* out);

/* ---- solvers ----------------------------------------------------------- */

typedef enum bt_linear_method { BT_LINEAR_NEUMANN = 0, BT_LINEAR_CHANGEVAR = 1 } bt_linear_method;

typedef struct bt_solve_options {
  double c_mean[2];
  double tol;
  int max_iter;
  double damping; /* fully nonlinear maps only, in (0, 1] */
  uint64_t seed;  /* Lipschitz audit sampling */
} bt_solve_options;

BT_API void bt_solve_options_default(bt_solve_options* opt);

/* Autonomous maps: f_zbar = A(f_z) + h (h may be NULL for zero forcing).
 * Maps with zterm/wterm tokens: the Picard solver on the grid (n, period);
 * h must be NULL. Non-convergence is not an error; check bt_report_converged. */
BT_API bt_status bt_solve(const bt_map* m, const bt_field* h, int n, double period, const bt_solve_options* opt,
                          bt_field** solution, bt_report** report);
/* f_zbar = a f_z + b conj(f_z) + u. */
BT_API bt_status bt_solve_linear(const double a[2], const double b[2], const bt_field* u, bt_linear_method method,
                                 const bt_solve_options* opt, bt_field** solution, bt_report** report);
/* ||f_zbar - A(f_z) - h||_2; h may be NULL. */
BT_API bt_status bt_residual(const bt_map* m, const bt_field* f, const bt_field* h, double* out);

BT_API void bt_report_free(bt_report* r);
BT_API int bt_report_iterations(const bt_report* r);
BT_API int bt_report_converged(const bt_report* r);
BT_API double bt_report_final_residual(const bt_report* r);
BT_API double bt_report_contraction_ratio(const bt_report* r);
BT_API const char* bt_report_method(const bt_report* r);
BT_API const char* bt_report_warning(const bt_report* r);
/* Copies up to capacity entries; returns the full history length. */
BT_API size_t bt_report_history(const bt_report* r, double* out, size_t capacity);
BT_API bt_status bt_report_write_csv(const bt_report* r, const char* history_path, const char* summary_path);

/* ---- change of variables ------------------------------------------------ */

typedef struct bt_transform {
  double mu[2];
  double nu[2];
  int numeric_root;           /* 0: printed formula accepted, 1: numeric root */
  double printed_mu[2];       /* NaN when the printed formula is undefined */
  double printed_nu[2];
  double residual;            /* dg/dzbar - v - mu nu conj(v) */
  double literal_residual;    /* dg/dzbar - v - a b conj(v) */
  double induced_coefficient[2];
  double mu_bound_excess;     /* |mu|(1-|b|^2) - |a| */
  double nu_bound_excess;     /* |nu|(1-|a|^2) - |b| */
} bt_transform;

BT_API bt_status bt_verify_transform(const double a[2], const double b[2], int trials, uint64_t seed,
                                     bt_transform* out);

/* ---- analysis ---------------------------------------------------------- */

typedef struct bt_distortion {
  double max;
  double quantiles[4]; /* at 0.5, 0.9, 0.99, 1 */
  size_t degenerate;
  size_t counted;
} bt_distortion;

/* K field in the real part (+inf where degenerate). mask may be NULL. */
BT_API bt_status bt_distortion_field(const bt_field* f, bt_field** out);
BT_API bt_status bt_distortion_stats(const bt_field* f, const uint8_t* mask, bt_distortion* out);
/* 1 where |h| <= relative * max|h|; out holds n*n bytes. */
BT_API bt_status bt_forcing_free_mask(const bt_field* h, double relative, uint8_t* out, size_t capacity);

/* Ladder of fields at n, 2n, 4n, ... When second_order is nonzero the probe
 * runs on the derivatives of f_z with threshold 1 + 1/k. */
BT_API bt_status bt_probe_fields(const bt_field* const* ladder, size_t levels, const double* p_grid, size_t np,
                                 int second_order, double k, bt_regularity** out);
/* Analytic radial extremal with distortion K at n0, 2 n0, ... */
BT_API bt_status bt_probe_radial(int n0, size_t levels, double period, double K, const double* p_grid, size_t np,
                                 bt_regularity** out);
BT_API void bt_regularity_free(bt_regularity* r);
BT_API double bt_regularity_p_critical(const bt_regularity* r);
BT_API double bt_regularity_fit_r2(const bt_regularity* r);
BT_API double bt_regularity_p_tail(const bt_regularity* r);
BT_API double bt_regularity_distortion_max(const bt_regularity* r);
/* -1 when not a second-order probe */
BT_API int bt_regularity_stable_below_threshold(const bt_regularity* r);
BT_API int bt_regularity_all_stable(const bt_regularity* r);
BT_API bt_status bt_regularity_write_csv(const bt_regularity* r, const char* path);

typedef struct bt_coefficients {
  double max_sum;         /* max |mu| + |nu| on the conditioned set */
  size_t used;
  size_t flagged;
  double gradient_residual;
  double k_prime;
  double directional_max; /* 16 directions */
  size_t directional_degenerate;
} bt_coefficients;

/* mask may be NULL; mu/nu outputs may be NULL. */
BT_API bt_status bt_coefficients_analyze(const bt_field* f, double k, const uint8_t* mask, bt_coefficients* out,
                                         bt_field** mu, bt_field** nu);

typedef struct bt_hodograph {
  double residual;
  double printed_residual;
  double max_ratio;
  int accepted;
  int skipped;
} bt_hodograph;

/* m must be autonomous. */
BT_API bt_status bt_hodograph_check(const bt_field* f, const bt_map* m, int samples, double jacobian_min,
                                    const uint8_t* mask, uint64_t seed, bt_hodograph* out);

/* 8-bit binary PGM of |f_z|; min/max of the scale written to range[2]. */
BT_API bt_status bt_write_dz_graymap(const bt_field* f, const char* path, double range[2]);

#ifdef __cplusplus
}
#endif

#endif
