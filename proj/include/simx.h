/* simx -- sub-image source retrieval via random-weight CNN encodings.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * simx_status, with a human-readable message available from simx_last_error()
 * (thread-local, valid until the next failing call on the same thread).
 */
#ifndef SIMX_H
#define SIMX_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum simx_status {
  SIMX_OK = 0,
  SIMX_ERR_INVALID_ARGUMENT,
  SIMX_ERR_IO,
  SIMX_ERR_DECODE,
  SIMX_ERR_FORMAT,
  SIMX_ERR_CORRUPT,
  SIMX_ERR_VERSION,
  SIMX_ERR_EMPTY_CORPUS,
  SIMX_ERR_GEOMETRY,
  SIMX_ERR_LOOKUP,
  SIMX_ERR_INTERNAL
} simx_status;

typedef enum simx_mode {
  SIMX_MODE_QUAD = 0,   /* 4 pieces of 64x64, default tolerance 100 */
  SIMX_MODE_GRID16 = 1  /* 16 pieces of 32x32, default tolerance 200 */
} simx_mode;

typedef struct simx_net simx_net;
typedef struct simx_index simx_index;
typedef struct simx_session simx_session;
typedef struct simx_match_list simx_match_list;
typedef struct simx_bench_report simx_bench_report;

const char* simx_status_name(simx_status status);
const char* simx_last_error(void);

/* Fixed three-stage architecture with weights generated from the seed. */
simx_status simx_net_create(uint64_t seed, simx_net** out);
void simx_net_destroy(simx_net* net);

/* --- index ------------------------------------------------------------- */

simx_status simx_index_build(const simx_net* net, const char* corpus_dir,
                             simx_index** out, uint32_t* skipped_files);
simx_status simx_index_save(const simx_index* index, const char* path);
simx_status simx_index_load(const char* path, simx_index** out);
void simx_index_destroy(simx_index* index);

uint32_t simx_index_size(const simx_index* index);
uint64_t simx_index_seed(const simx_index* index);
/* Borrowed pointer, valid for the index's lifetime. */
const char* simx_index_entry_path(const simx_index* index, uint32_t image_id);

/* --- query ------------------------------------------------------------- */

/* A session caches per-candidate state across queries against one index.
 * The net and index must outlive the session. */
simx_status simx_session_create(const simx_net* net, const simx_index* index,
                                const char* image_root, simx_session** out);
void simx_session_destroy(simx_session* session);

/* tolerance < 0 selects the mode default (100 quad / 200 grid16);
 * threads <= 0 selects the hardware default. */
simx_status simx_session_query(simx_session* session, const char* patch_path,
                               simx_mode mode, double tolerance, int threads,
                               simx_match_list** out);

void simx_match_list_destroy(simx_match_list* list);
uint32_t simx_match_count(const simx_match_list* list);
/* rank 0 is the best candidate. matched is 1 when distance <= tolerance.
 * Any out pointer may be NULL. */
simx_status simx_match_get(const simx_match_list* list, uint32_t rank,
                           uint32_t* image_id, uint32_t* placement,
                           double* distance, int* matched);
/* Rank of the reported answer, or -1 for a clean no-match. */
int32_t simx_match_answer_rank(const simx_match_list* list);

/* --- calibration -------------------------------------------------------- */

typedef struct simx_calibration {
  double recommended_tolerance;
  double true_p95, true_mean, true_max;
  double impostor_p5, impostor_mean, impostor_min;
  int sample_count;
  int overlap; /* 1 when the distributions overlap beyond the percentiles */
} simx_calibration;

simx_status simx_calibrate(uint64_t seed, const char* corpus_dir,
                           simx_mode mode, double holdout_fraction,
                           int threads, simx_calibration* out);

/* --- benchmark ---------------------------------------------------------- */

/* methods: comma-separated list from cnn-quad, cnn-grid16, kmeans, knn-L1,
 * knn-L2. exact_piece selects the exact-piece crop policy, otherwise random
 * crops. tolerance < 0 means "calibrate". report_path may be NULL. */
simx_status simx_bench_run(uint64_t seed, const char* corpus_dir,
                           int query_count, const char* methods,
                           int exact_piece, double tolerance, int threads,
                           const char* report_path, simx_bench_report** out);

void simx_bench_report_destroy(simx_bench_report* report);
uint32_t simx_bench_row_count(const simx_bench_report* report);
simx_status simx_bench_row_get(const simx_bench_report* report, uint32_t row,
                               const char** method, int* correct, int* total,
                               double* accuracy_percent, double* tolerance,
                               double* wall_seconds);
/* Full report as aligned text; borrowed pointer. */
const char* simx_bench_report_text(const simx_bench_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SIMX_H */
