#ifndef MUBCV_H
#define MUBCV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MUBCV_API __declspec(dllexport)
#else
#define MUBCV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mubcv_status {
  MUBCV_OK = 0,
  MUBCV_ERR_INVALID_INPUT = 1,
  MUBCV_ERR_DEGENERATE_AXES = 2,
  MUBCV_ERR_FIT_FAILURE = 3,
  MUBCV_ERR_PARSE = 4,
  MUBCV_ERR_IO = 5,
  MUBCV_ERR_NULL_ARGUMENT = 6,
  MUBCV_ERR_INTERNAL = 7
} mubcv_status;

typedef enum mubcv_sign { MUBCV_SIGN_MINUS = 0, MUBCV_SIGN_PLUS = 1 } mubcv_sign;

typedef struct mubcv_state mubcv_state;
typedef struct mubcv_wavefunction mubcv_wavefunction;
typedef struct mubcv_run_config mubcv_run_config;
typedef struct mubcv_grid mubcv_grid;

typedef struct mubcv_optimizer_result {
  double eta;
  double xi;
  double g_min;
  int iterations;
  int converged;
} mubcv_optimizer_result;

typedef struct mubcv_criterion {
  double product;
  double product_uncertainty;
  double bound;
  int entangled;
} mubcv_criterion;

/* Message for the most recent failure on the calling thread ("" if none). */
MUBCV_API const char* mubcv_last_error(void);
MUBCV_API const char* mubcv_status_string(mubcv_status status);
MUBCV_API const char* mubcv_version(void);
/* Releases strings returned through char** out-parameters. */
MUBCV_API void mubcv_string_free(char* str);

/* Gaussian states. JSON form: {"n_modes": n, "mean": [...], "cov": [[...]]}. */
MUBCV_API mubcv_status mubcv_state_from_json(const char* json_text, mubcv_state** out);
MUBCV_API mubcv_status mubcv_state_load(const char* path, mubcv_state** out);
MUBCV_API mubcv_status mubcv_state_vacuum(size_t n_modes, mubcv_state** out);
MUBCV_API mubcv_status mubcv_state_spdc(double sigma_plus, double sigma_minus, mubcv_state** out);
MUBCV_API mubcv_status mubcv_state_n_modes(const mubcv_state* state, size_t* out);
MUBCV_API mubcv_status mubcv_state_is_physical(const mubcv_state* state, int* out);
MUBCV_API mubcv_status mubcv_state_to_json(const mubcv_state* state, char** out);
MUBCV_API void mubcv_state_free(mubcv_state* state);

/* Uncertainty relations. */
MUBCV_API mubcv_status mubcv_triple_product(const mubcv_state* state, double offset, double* out);
/* Batch report as JSON. Single-mode states get the pairwise, Schrodinger-
   Robertson and triple-product checks; two-mode states additionally get the
   global triple relation and the entanglement criterion for both signs.
   *all_satisfied is 1 when every relation holds. */
MUBCV_API mubcv_status mubcv_check_ur(const mubcv_state* state, char** report_json,
                                      int* all_satisfied);
MUBCV_API mubcv_status mubcv_minimize_g(double initial_eta, mubcv_optimizer_result* out);
/* Table of g on the saturation curve xi = 1/(4 eta) at n points in [lo, hi]. */
MUBCV_API mubcv_status mubcv_g_sat_scan(double lo, double hi, size_t n, char** out_json);

/* Entanglement criterion from measured variances (value, uncertainty). */
MUBCV_API mubcv_status mubcv_evaluate_criterion(const double values[3],
                                                const double uncertainties[3], mubcv_sign sign,
                                                mubcv_criterion* out);

/* Sampled wavefunctions and the fractional Fourier transform. */
MUBCV_API mubcv_status mubcv_wavefunction_create(size_t n, double dq, const double* re,
                                                 const double* im, mubcv_wavefunction** out);
MUBCV_API mubcv_status mubcv_wavefunction_read_csv(const char* path, mubcv_wavefunction** out);
MUBCV_API mubcv_status mubcv_wavefunction_write_csv(const mubcv_wavefunction* psi,
                                                    const char* path);
MUBCV_API mubcv_status mubcv_wavefunction_size(const mubcv_wavefunction* psi, size_t* n,
                                               double* dq);
/* Copies n real and imaginary parts into caller buffers of length >= n. */
MUBCV_API mubcv_status mubcv_wavefunction_amplitudes(const mubcv_wavefunction* psi, double* re,
                                                     double* im, size_t len);
MUBCV_API mubcv_status mubcv_frft(const mubcv_wavefunction* psi, double theta,
                                  mubcv_wavefunction** out);
MUBCV_API mubcv_status mubcv_rotated_variance(const mubcv_wavefunction* psi, double theta,
                                              double* out);
MUBCV_API void mubcv_wavefunction_free(mubcv_wavefunction* psi);

/* Run configuration (JSON, unknown keys rejected). */
MUBCV_API mubcv_status mubcv_run_config_default(mubcv_run_config** out);
MUBCV_API mubcv_status mubcv_run_config_parse(const char* json_text, mubcv_run_config** out);
MUBCV_API mubcv_status mubcv_run_config_load(const char* path, mubcv_run_config** out);
MUBCV_API mubcv_status mubcv_run_config_set_seed(mubcv_run_config* config, uint64_t seed);
MUBCV_API mubcv_status mubcv_run_config_set_threads(mubcv_run_config* config, unsigned threads);
/* Comma-separated plane list, e.g. "x,u,v". */
MUBCV_API mubcv_status mubcv_run_config_set_planes(mubcv_run_config* config, const char* planes);
MUBCV_API mubcv_status mubcv_run_config_planes(const mubcv_run_config* config, char** out);
MUBCV_API mubcv_status mubcv_run_config_spdc(const mubcv_run_config* config, double* sigma_plus,
                                             double* sigma_minus);
MUBCV_API mubcv_status mubcv_run_config_to_json(const mubcv_run_config* config, char** out);
MUBCV_API void mubcv_run_config_free(mubcv_run_config* config);

/* Coincidence grids. Files ending in .json are JSON, anything else CSV. */
MUBCV_API mubcv_status mubcv_simulate_plane(const mubcv_run_config* config, const char* plane,
                                            mubcv_grid** out);
MUBCV_API mubcv_status mubcv_grid_load(const char* path, mubcv_grid** out);
MUBCV_API mubcv_status mubcv_grid_save(const mubcv_grid* grid, const char* path);
MUBCV_API mubcv_status mubcv_grid_size(const mubcv_grid* grid, size_t* n);
MUBCV_API mubcv_status mubcv_grid_total(const mubcv_grid* grid, uint64_t* out);
/* Row-major counts into a caller buffer of length >= n * n. */
MUBCV_API mubcv_status mubcv_grid_counts(const mubcv_grid* grid, uint64_t* counts, size_t len);
MUBCV_API void mubcv_grid_free(mubcv_grid* grid);

/* Marginal Gaussian fit for one sign, as JSON. */
MUBCV_API mubcv_status mubcv_analyze(const mubcv_grid* grid, mubcv_sign sign, char** out_json);
/* Per-plane variances, correlations and both criteria for the (x1,x2), (r1,s2), (s1,r2) grids as JSON. */
MUBCV_API mubcv_status mubcv_certify(const mubcv_grid* grid_x, const mubcv_grid* grid_u,
                                     const mubcv_grid* grid_v, char** out_json,
                                     int* entangled_minus, int* entangled_plus);

#ifdef __cplusplus
}
#endif

#endif
