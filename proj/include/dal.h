/* C API for the Delone-Anderson laboratory.
 *
 * All functions return dal_status; results travel through out-parameters.
 * Objects are opaque handles freed with the matching _free call. On any
 * failure, dal_last_error() returns a thread-local message describing it.
 */
#ifndef DAL_H
#define DAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dal_status {
  DAL_OK = 0,
  DAL_ERR_INVALID_ARGUMENT = 1,
  DAL_ERR_NON_DELONE = 2,
  DAL_ERR_SOLVER = 3,
  DAL_ERR_CONFIG = 4,
  DAL_ERR_CERTIFICATION = 5,
  DAL_ERR_INTERNAL = 6
} dal_status;

typedef struct dal_delone dal_delone;
typedef struct dal_disorder dal_disorder;
typedef struct dal_operator dal_operator;
typedef struct dal_spectrum dal_spectrum;

const char* dal_version(void);
const char* dal_last_error(void);

/* -- Geometry ------------------------------------------------------------- */

/* Windows are passed as lo/hi arrays of length d (inclusive bounds). */
dal_status dal_delone_generate_periodic(int d, int64_t k, const int64_t* lo, const int64_t* hi,
                                        dal_delone** out);
dal_status dal_delone_generate_sturmian(int d, double alpha, double beta, const int64_t* lo,
                                        const int64_t* hi, dal_delone** out);
dal_status dal_delone_generate_random_cell(int d, int64_t R, const int64_t* lo, const int64_t* hi,
                                           uint64_t seed, dal_delone** out);
dal_status dal_delone_load_file(const char* path, dal_delone** out);
dal_status dal_delone_save_file(const dal_delone* D, const char* path);
dal_status dal_delone_complement(const dal_delone* D, dal_delone** out);

int dal_delone_dim(const dal_delone* D);
int64_t dal_delone_size(const dal_delone* D);
int64_t dal_delone_declared_r(const dal_delone* D);
dal_status dal_delone_compute_r(const dal_delone* D, int64_t* out_r);
void dal_delone_free(dal_delone* D);

/* -- Disorder --------------------------------------------------------------- */

dal_status dal_disorder_uniform(double M, dal_disorder** out);
dal_status dal_disorder_power_tail(double M, double tau, dal_disorder** out);
dal_status dal_disorder_kumaraswamy(double M, double a, double b, dal_disorder** out);
dal_status dal_disorder_reflected(const dal_disorder* in, dal_disorder** out);
double dal_disorder_mean(const dal_disorder* d);
double dal_disorder_cdf(const dal_disorder* d, double t);
void dal_disorder_free(dal_disorder* d);

/* Worst margin of mu((0,t]) <= alpha t^tau over a grid; holds != 0 on pass. */
dal_status dal_check_tail_condition(const dal_disorder* reflected_law, double alpha, double tau,
                                    const double* tgrid, size_t ngrid, int d, int* holds,
                                    double* worst_margin);

/* -- Operators --------------------------------------------------------------- */

/* Boxes are (center[d], half_width). */
dal_status dal_assemble_laplacian(int d, const int64_t* center, int64_t half_width,
                                  dal_operator** out);
dal_status dal_assemble_hamiltonian(const dal_delone* D, const int64_t* center, int64_t half_width,
                                    const dal_disorder* disorder, uint64_t master_seed,
                                    uint64_t sample_index, dal_operator** out);
dal_status dal_assemble_reflected(const dal_delone* D, const int64_t* center, int64_t half_width,
                                  const dal_disorder* disorder, uint64_t master_seed,
                                  uint64_t sample_index, dal_operator** out);
int64_t dal_operator_dim(const dal_operator* H);
dal_status dal_operator_export_file(const dal_operator* H, const char* path);
void dal_operator_free(dal_operator* H);

/* -- Spectral --------------------------------------------------------------- */

dal_status dal_eig_full(const dal_operator* H, dal_spectrum** out);
dal_status dal_eig_extremal(const dal_operator* H, int k, int low_side, double tol,
                            dal_spectrum** out);
int64_t dal_spectrum_count(const dal_spectrum* s);
dal_status dal_spectrum_values(const dal_spectrum* s, double* buf, int64_t buflen);
dal_status dal_spectrum_dist(const dal_spectrum* s, double E, double* out_dist);
void dal_spectrum_free(dal_spectrum* s);

/* -- Thresholds --------------------------------------------------------------- */

dal_status dal_compute_thresholds(int d, int64_t R, double q, double* tilde_ew, double* ew,
                                  double* c);

/* -- Experiment runner --------------------------------------------------------- */

/* Runs a config file with optional key=value overrides. exit_code follows
 * the CLI contract: 0 pass, 2 certification failure. Configuration problems
 * return DAL_ERR_CONFIG (exit code 1 at the CLI). `seed` and `threads`
 * override the config when >= 0. out_dir may be NULL to use the config's. */
dal_status dal_run_config_file(const char* config_path, const char* command_or_null,
                               const char* const* overrides, size_t n_overrides,
                               const char* out_dir, int64_t seed, int threads, int* exit_code);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DAL_H */
