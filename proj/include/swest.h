/* C interface to the sliced-Wasserstein estimation library. All entry points
 * return swest_status; on failure swest_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread). */
#ifndef SWEST_H
#define SWEST_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum swest_status {
  SWEST_OK = 0,
  SWEST_ERR_INVALID_ARGUMENT = 1,
  SWEST_ERR_NON_FINITE = 2,
  SWEST_ERR_DIMENSION_MISMATCH = 3,
  SWEST_ERR_PARSE = 4,
  SWEST_ERR_IO = 5,
  SWEST_ERR_SIZE_CAP = 6,
  SWEST_ERR_NO_CONVERGENCE = 7,
  SWEST_ERR_OPTIMIZER = 8,
  SWEST_ERR_CONFIG = 9,
  SWEST_ERR_INTERRUPTED = 10,
  SWEST_ERR_INTERNAL = 11
} swest_status;

typedef struct swest_measure swest_measure;

const char* swest_version(void);
const char* swest_last_error(void);

/* row_major points to n*d doubles, one sample per row. */
swest_status swest_measure_create(const double* row_major, int64_t n, int64_t d,
                                  swest_measure** out);
/* Headerless CSV of d comma-separated floats per row. */
swest_status swest_measure_from_csv(const char* path, swest_measure** out);
void swest_measure_free(swest_measure* measure);
int64_t swest_measure_size(const swest_measure* measure);
int64_t swest_measure_dim(const swest_measure* measure);
/* out must hold n*d doubles; filled row-major. */
swest_status swest_measure_copy_points(const swest_measure* measure, double* out);

/* method: "sw" (Monte Carlo sliced), "exact" (assignment), "sinkhorn".
 * projections is the direction count for "sw"; epsilon_rel scales the
 * Sinkhorn regularization relative to the mean transport cost (pass 0 for the
 * default). */
swest_status swest_distance(const swest_measure* x, const swest_measure* y, const char* method,
                            double p, int32_t projections, uint64_t seed, double epsilon_rel,
                            double* out);

/* Runs one estimator fit described by a JSON config document; *result_json
 * receives a malloc'd JSON result (free with swest_string_free). Returns
 * SWEST_ERR_OPTIMIZER when the fit was aborted or flagged; the result JSON is
 * still produced in that case. */
swest_status swest_estimate_run(const char* config_json, char** result_json);

/* Runs a named experiment ("consistency", "clt", "meswe-vs-mswe", "timing")
 * and writes the records CSV, metadata sidecar and any per-experiment files
 * into out_dir. Partial results are flushed on interrupt or failure. */
swest_status swest_experiment_run(const char* name, const char* config_json, const char* out_dir);

/* Asks running experiments to stop after the current task (signal-safe). */
void swest_request_interrupt(void);
void swest_clear_interrupt(void);

void swest_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SWEST_H */
