/* C interface to the MoSSP solver library. All objects are opaque handles;
 * every fallible call returns a mossp_status and leaves a message retrievable
 * with mossp_last_error() on the calling thread. */
#ifndef MOSSP_MOSSP_H
#define MOSSP_MOSSP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MOSSP_API __declspec(dllexport)
#else
#define MOSSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mossp_status {
  MOSSP_OK = 0,
  MOSSP_ERR_INVALID_ARGUMENT = 1,
  MOSSP_ERR_SCHEDULE = 2, /* a parameter inequality is violated */
  MOSSP_ERR_PARSE = 3,
  MOSSP_ERR_IO = 4,
  MOSSP_ERR_DIVERGED = 5,
  MOSSP_ERR_INTERNAL = 6
} mossp_status;

typedef struct mossp_spec mossp_spec;
typedef struct mossp_report mossp_report;
typedef struct mossp_result mossp_result;
typedef struct mossp_bench mossp_bench;

typedef struct mossp_record {
  uint64_t iter;
  uint64_t oracle_calls;
  double elapsed_s;
  double objective;
  double feas;
  double infeas_stat;
  double crit_u;
  double crit_gap;
  double potential;
} mossp_record;

typedef struct mossp_kkt {
  double criticality;  /* max{|u|^2, |x - y|^2} at the output iterate */
  double feasibility;  /* |c(x)|^2 */
  double infeasible_stationarity;
  double max_membership_gap;
  uint64_t output_index; /* R */
} mossp_kkt;

typedef struct mossp_dataset_info {
  uint64_t rows;
  uint64_t cols;
  uint64_t nonzeros;
  int labels_remapped;
} mossp_dataset_info;

typedef struct mossp_summary {
  double lambda;
  double mean_objective, std_objective;
  double mean_feas, std_feas;
  double mean_violation, std_violation;
} mossp_summary;

MOSSP_API const char* mossp_version(void);
/* Message of the last failed call on this thread; "" when none. */
MOSSP_API const char* mossp_last_error(void);
/* For MOSSP_ERR_SCHEDULE, the violated inequality, e.g. "μ₀ ≤ 1/(4ρ₀)". */
MOSSP_API const char* mossp_last_inequality(void);

/* Run specification: `key = value` fields as in configuration files. */
MOSSP_API mossp_status mossp_spec_create(mossp_spec** out);
MOSSP_API void mossp_spec_destroy(mossp_spec* spec);
MOSSP_API mossp_status mossp_spec_set(mossp_spec* spec, const char* key, const char* value);
MOSSP_API mossp_status mossp_spec_load(mossp_spec* spec, const char* path);
/* Writes the serialized config into buf (NUL-terminated, truncated to cap);
 * *needed receives the full length including the terminator. */
MOSSP_API mossp_status mossp_spec_serialize(const mossp_spec* spec, char* buf, size_t cap,
                                            size_t* needed);

/* Schedule / configuration validation. A report is produced even when checks
 * fail; the status is MOSSP_ERR_SCHEDULE in that case. */
MOSSP_API mossp_status mossp_validate(const mossp_spec* spec, mossp_report** out);
MOSSP_API void mossp_report_destroy(mossp_report* report);
MOSSP_API size_t mossp_report_count(const mossp_report* report);
MOSSP_API mossp_status mossp_report_check(const mossp_report* report, size_t i, const char** name,
                                          double* lhs, double* rhs, int* ok);

/* Single run with the spec's seed; metrics are written to `out` when set. */
MOSSP_API mossp_status mossp_solve(const mossp_spec* spec, mossp_result** out);
MOSSP_API void mossp_result_destroy(mossp_result* result);
MOSSP_API size_t mossp_result_record_count(const mossp_result* result);
MOSSP_API mossp_status mossp_result_record(const mossp_result* result, size_t i, mossp_record* out);
MOSSP_API mossp_status mossp_result_final(const mossp_result* result, double* objective,
                                          double* feas, double* violation_l1);
MOSSP_API mossp_status mossp_result_kkt(const mossp_result* result, mossp_kkt* out);
/* which: 0 = output iterate x^{R+1}, 1 = final x, 2 = final z. Copies up to
 * cap entries; *n receives the dimension. */
MOSSP_API mossp_status mossp_result_vector(const mossp_result* result, int which, double* buf,
                                           size_t cap, size_t* n);
MOSSP_API size_t mossp_result_warning_count(const mossp_result* result);
MOSSP_API const char* mossp_result_warning(const mossp_result* result, size_t i);

/* Seeds seed..seed+repeats-1; per-seed metrics and summary.csv under `out`. */
MOSSP_API mossp_status mossp_benchmark(const mossp_spec* spec, unsigned threads, mossp_bench** out);
MOSSP_API void mossp_bench_destroy(mossp_bench* bench);
MOSSP_API size_t mossp_bench_group_count(const mossp_bench* bench);
MOSSP_API mossp_status mossp_bench_summary(const mossp_bench* bench, size_t group,
                                           mossp_summary* out);
MOSSP_API const char* mossp_bench_summary_path(const mossp_bench* bench, size_t group);

/* Writes a seeded quadratic-equality instance with M constraints in n
 * variables. *max_abs_c receives max_j |c_j(x_star)| when non-null. */
MOSSP_API mossp_status mossp_gen_quadeq(uint64_t n, uint64_t M, uint64_t seed, const char* path,
                                        double* max_abs_c);

MOSSP_API mossp_status mossp_parse_check(const char* path, mossp_dataset_info* info);

#ifdef __cplusplus
}
#endif

#endif
