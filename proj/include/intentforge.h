/* Copyright 2026 The Intentforge Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the intentforge shared library. All functions return an
 * ifx_status; on failure the thread-local message from ifx_last_error()
 * describes the problem. Strings returned through out-parameters are
 * heap-allocated and must be released with ifx_string_free().
 */

#ifndef INTENTFORGE_H
#define INTENTFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t ifx_status;
enum {
  IFX_OK = 0,
  IFX_ERR_VALIDATION = 2, /* bad inputs or undefined math */
  IFX_ERR_CONFIG = 3      /* unusable configuration */
};

/* Message from the most recent failing call on this thread ("" if none). */
const char* ifx_last_error(void);

void ifx_string_free(char* s);

/* ---- dense matrices -------------------------------------------------- */

typedef struct ifx_matrix ifx_matrix;

ifx_status ifx_matrix_create(size_t rows, size_t cols, const double* row_major,
                             ifx_matrix** out);
void ifx_matrix_free(ifx_matrix* m);
size_t ifx_matrix_rows(const ifx_matrix* m);
size_t ifx_matrix_cols(const ifx_matrix* m);
/* Copies the row-major payload into `out` (rows*cols doubles). */
ifx_status ifx_matrix_copy_data(const ifx_matrix* m, double* out);

ifx_status ifx_matrix_save(const ifx_matrix* m, const char* path);
ifx_status ifx_matrix_load(const char* path, ifx_matrix** out);

/* ---- numerics and clustering ----------------------------------------- */

/* labels: n ints; centroids may be NULL if not wanted. */
ifx_status ifx_kmeans(const ifx_matrix* x, size_t k, size_t n_init, size_t max_iter,
                      uint64_t seed, int32_t* labels, ifx_matrix** centroids);
ifx_status ifx_spectral(const ifx_matrix* x, size_t k, size_t n_neighbors, size_t n_init,
                        uint64_t seed, int32_t* labels);
ifx_status ifx_silhouette(const ifx_matrix* x, const int32_t* labels, double* out);

/* assignment: one entry per cost row, -1 when unmatched. */
ifx_status ifx_hungarian(const ifx_matrix* cost, int32_t* assignment, double* total_cost);

/* mode: 0 = one-to-one, 1 = overlapping. *report_json: JSON text. */
ifx_status ifx_compute_metrics(const int32_t* pred, const int32_t* ref, size_t n,
                               int32_t mode, char** report_json);

/* ---- subcommand entry points ------------------------------------------
 * config_json carries the merged subcommand configuration; *summary_json
 * receives the run summary. */

ifx_status ifx_gen_fixture(const char* config_json, uint64_t seed, char** summary_json);
ifx_status ifx_extract(const char* config_json, uint64_t seed, char** summary_json);
ifx_status ifx_train_mdb(const char* config_json, uint64_t seed, char** summary_json);
ifx_status ifx_train_pgt(const char* config_json, uint64_t seed, char** summary_json);
ifx_status ifx_induce(const char* config_json, uint64_t seed, char** summary_json);
ifx_status ifx_evaluate(const char* config_json, uint64_t seed, char** summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* INTENTFORGE_H */
