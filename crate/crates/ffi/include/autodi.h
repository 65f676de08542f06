#ifndef AUTODI_H
#define AUTODI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AutodiStatus {
  AUTODI_STATUS_OK = 0,
  AUTODI_STATUS_NULL_ARGUMENT = 1,
  AUTODI_STATUS_INVALID_UTF8 = 2,
  AUTODI_STATUS_INVALID_ARGUMENT = 3,
  AUTODI_STATUS_IO = 4,
  AUTODI_STATUS_CONFIG = 5,
  AUTODI_STATUS_MISSING_PREREQUISITE = 6,
  AUTODI_STATUS_BUDGET_EXHAUSTED = 7,
  AUTODI_STATUS_PIPELINE = 8,
  AUTODI_STATUS_PANIC = 9,
} AutodiStatus;

/**
 * A delimited source file loaded into memory.
 */
typedef struct AutodiDataset AutodiDataset;

/**
 * Oracle usage entries read from a ledger file.
 */
typedef struct AutodiLedger AutodiLedger;

/**
 * A run configuration bound to its output directory.
 */
typedef struct AutodiPipeline AutodiPipeline;

/**
 * Integration metrics computed from counts. Ratios are fractions; fields
 * that are undefined for the inputs are NaN.
 */
typedef struct AutodiReportMetrics {
  uint64_t total_input_records;
  uint64_t largest_input;
  double fusion_ratio;
  int64_t row_gain_abs;
  double row_gain_pct;
} AutodiReportMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *autodi_last_error(void);

/**
 * Library version, static.
 */
const char *autodi_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void autodi_string_free(char *s);

/**
 * String similarity in [0, 1]. `metric` is one of `jaccard-token`,
 * `jaro-winkler`, `levenshtein-sim`, `cosine-char3`.
 */
enum AutodiStatus autodi_string_similarity(const char *a,
                                           const char *b,
                                           const char *metric,
                                           double *result);

/**
 * Loads a run configuration. A non-null `out_dir` overrides the configured
 * output directory.
 */
enum AutodiStatus autodi_pipeline_open(const char *config_path,
                                       const char *out_dir,
                                       struct AutodiPipeline **pipeline);

/**
 * Runs one step (`profile`, `match-schema`, `normalize`, `match-entities`,
 * `cluster`, `fuse`, `report` or `all`). On success `artifacts` receives a
 * JSON array of the written paths; it may be null if not wanted.
 */
enum AutodiStatus autodi_pipeline_run(const struct AutodiPipeline *pipeline,
                                      const char *step,
                                      char **artifacts);

void autodi_pipeline_free(struct AutodiPipeline *pipeline);

/**
 * Loads a delimited file. `id_column` names the id column, or is null to
 * synthesize ids.
 */
enum AutodiStatus autodi_dataset_load(const char *path,
                                      const char *id_column,
                                      uint8_t delimiter,
                                      struct AutodiDataset **dataset);

/**
 * Number of records; 0 for a null handle.
 */
size_t autodi_dataset_len(const struct AutodiDataset *dataset);

/**
 * Column profiles as a JSON array.
 */
enum AutodiStatus autodi_dataset_profile(const struct AutodiDataset *dataset, char **json);

void autodi_dataset_free(struct AutodiDataset *dataset);

/**
 * Fusion ratio and row gain from record counts of `n_inputs` sources, the
 * output size and the number of fused groups.
 */
enum AutodiStatus autodi_report_from_counts(const uint64_t *input_records,
                                            size_t n_inputs,
                                            uint64_t output_records,
                                            uint64_t fused_groups,
                                            struct AutodiReportMetrics *metrics);

/**
 * Reads a JSON-lines ledger file as written by a pipeline run.
 */
enum AutodiStatus autodi_ledger_open(const char *path, struct AutodiLedger **ledger);

/**
 * Total cost in micro-units of currency; 0 for a null handle.
 */
uint64_t autodi_ledger_total_micro(const struct AutodiLedger *ledger);

/**
 * Per-task and per-step usage as JSON.
 */
enum AutodiStatus autodi_ledger_summary(const struct AutodiLedger *ledger, char **json);

void autodi_ledger_free(struct AutodiLedger *ledger);

/**
 * Renders micro-units as `$d.cc`. Never fails; the result must be freed.
 */
char *autodi_format_currency(uint64_t micro);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUTODI_H */
