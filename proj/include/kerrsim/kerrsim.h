/* C interface to the kerrsim library.
 *
 * Every function returns a ks_status. On failure a description of the most
 * recent error on the calling thread is available from ks_last_error().
 * Objects are opaque and owned by the caller; release them with the
 * matching *_destroy function. Strings returned through char** are freed
 * with ks_string_free.
 */
#ifndef KERRSIM_KERRSIM_H
#define KERRSIM_KERRSIM_H

#include <stddef.h>

#if defined(KERRSIM_BUILDING)
#define KS_API __attribute__((visibility("default")))
#else
#define KS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ks_status {
  KS_OK = 0,
  KS_ERR_INVALID_ARGUMENT = 1,
  KS_ERR_INVALID_DIMENSION = 2,
  KS_ERR_INVALID_PARAMETER = 3,
  KS_ERR_NO_BISTABILITY = 4,
  KS_ERR_POLE = 5,
  KS_ERR_PRECISION = 6,
  KS_ERR_CONVERGENCE = 7,
  KS_ERR_DEGENERATE_NULL_SPACE = 8,
  KS_ERR_STIFFNESS = 9,
  KS_ERR_TRUNCATION = 10,
  KS_ERR_GRID_BUDGET = 11,
  KS_ERR_STATE_INVALID = 12,
  KS_ERR_CONFIG = 13,
  KS_ERR_IO = 14,
  KS_ERR_INTERNAL = 15,
  KS_ERR_NULL_POINTER = 16
} ks_status;

typedef struct ks_model ks_model;
typedef struct ks_liouvillian ks_liouvillian;
typedef struct ks_state ks_state;
typedef struct ks_trajectory ks_trajectory;
typedef struct ks_config ks_config;
typedef struct ks_manifest ks_manifest;

typedef struct ks_entropy {
  double s_q;
  double pi_j;
  double pi_ext;
  double pi_d;
  double pi_u;
  double phi;
  double phi_ext;
  double phi_q;
  double norm;
} ks_entropy;

typedef struct ks_quench_spec {
  double eps_i;
  double eps_f;
  double N;
  double t_max;
  double dt_out;
  double tol;
  int n_max;          /* 0 selects the truncation automatically */
  int phasespace;     /* nonzero: compute the Husimi functionals */
  int gaussianity;    /* nonzero: compute the non-Gaussianity */
  double grid_spacing;
} ks_quench_spec;

/* Number of columns of a trajectory row, matching the CSV header. */
#define KS_TRAJECTORY_COLUMNS 14

KS_API const char* ks_version(void);
KS_API const char* ks_last_error(void);
KS_API const char* ks_status_name(ks_status status);
KS_API void ks_string_free(char* s);

/* Model: H = delta a'a + i E (a' - a) + (U/2) a'a'aa, E = sqrt(N) eps, U = u / N. */
KS_API ks_status ks_model_create(double delta, double kappa, double u, ks_model** out);
KS_API ks_status ks_model_set_pump(ks_model* model, double eps, double N);
KS_API void ks_model_destroy(ks_model* model);

KS_API ks_status ks_bistability_edges(const ks_model* model, double* eps_lo, double* eps_hi);
KS_API ks_status ks_critical_pump(const ks_model* model, double N, double* eps_c);
KS_API ks_status ks_exact_moment(const ks_model* model, int n, int m, double* re, double* im);
KS_API ks_status ks_truncation(const ks_model* model, int* n_max);

/* fock_dim <= 0 selects the automatic truncation. */
KS_API ks_status ks_liouvillian_create(const ks_model* model, int fock_dim, ks_liouvillian** out);
KS_API ks_status ks_liouvillian_fock_dim(const ks_liouvillian* L, int* fock_dim);
KS_API void ks_liouvillian_destroy(ks_liouvillian* L);
KS_API ks_status ks_ness(const ks_liouvillian* L, ks_state** out, double* residual);
/* Fills up to k eigenvalues sorted by |Re|; *count receives the number written. */
KS_API ks_status ks_spectrum(const ks_liouvillian* L, int k, double* re, double* im, int* count, double* gap);

KS_API ks_status ks_state_fock_dim(const ks_state* state, int* fock_dim);
KS_API ks_status ks_state_moments(const ks_state* state, double* re_a, double* im_a, double* n);
KS_API ks_status ks_state_entropy(const ks_state* state, const ks_model* model, ks_entropy* out);
KS_API ks_status ks_state_non_gaussianity(const ks_state* state, double* g);
KS_API void ks_state_destroy(ks_state* state);

KS_API void ks_quench_spec_default(ks_quench_spec* spec);
KS_API ks_status ks_quench_run(const ks_model* model, const ks_quench_spec* spec, ks_trajectory** out);
KS_API ks_status ks_trajectory_length(const ks_trajectory* traj, size_t* length);
/* Row layout follows the CSV header t,re_alpha,...,residual; missing values are NaN. */
KS_API ks_status ks_trajectory_row(const ks_trajectory* traj, size_t index, double row[KS_TRAJECTORY_COLUMNS]);
KS_API ks_status ks_trajectory_write_csv(const ks_trajectory* traj, const char* path);
KS_API void ks_trajectory_destroy(ks_trajectory* traj);

/* subcommand may be NULL when the document names exactly one experiment. */
KS_API ks_status ks_config_parse(const char* text, const char* subcommand, ks_config** out);
KS_API ks_status ks_config_load(const char* path, const char* subcommand, ks_config** out);
KS_API ks_status ks_config_set_output(ks_config* config, const char* dir);
KS_API ks_status ks_config_set_jobs(ks_config* config, int jobs);
KS_API ks_status ks_config_output(const ks_config* config, const char** dir);
KS_API ks_status ks_config_experiment(const ks_config* config, const char** name);
KS_API ks_status ks_config_job_count(const ks_config* config, size_t* count);
KS_API void ks_config_destroy(ks_config* config);

KS_API ks_status ks_run(const ks_config* config, ks_manifest** out);
KS_API ks_status ks_manifest_failed(const ks_manifest* manifest, int* failed);
KS_API ks_status ks_manifest_json(const ks_manifest* manifest, char** json);
KS_API ks_status ks_manifest_file_count(const ks_manifest* manifest, size_t* count);
/* Paths are relative to the output directory; the pointer lives as long as the manifest. */
KS_API ks_status ks_manifest_file(const ks_manifest* manifest, size_t index, const char** path);
KS_API void ks_manifest_destroy(ks_manifest* manifest);

#ifdef __cplusplus
}
#endif

#endif
