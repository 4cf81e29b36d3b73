/*
 * svmtree C API.
 *
 * Multi-class SVM reductions (OVO, OVA, DDAG, ADAG, BTS-G, c-BTS-G,
 * IB-DTree, IBGE-DTree) behind opaque handles. Every fallible call returns an
 * svt_status; on failure svt_last_error() describes the problem for the
 * calling thread until its next failing call.
 */
#ifndef SVMTREE_H
#define SVMTREE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SVMTREE_BUILDING)
#    define SVT_API __declspec(dllexport)
#  else
#    define SVT_API __declspec(dllimport)
#  endif
#else
#  define SVT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svt_status {
    SVT_OK = 0,
    SVT_ERR_INVALID_ARGUMENT = 1,
    SVT_ERR_IO = 2,
    SVT_ERR_PARSE = 3,
    SVT_ERR_DIMENSION = 4,
    SVT_ERR_BUILD = 5,
    SVT_ERR_UNKNOWN_STRATEGY = 6,
    SVT_ERR_FORMAT = 7,
    SVT_ERR_INTERNAL = 8
} svt_status;

typedef struct svt_dataset svt_dataset;
typedef struct svt_model svt_model;
typedef struct svt_report svt_report;

SVT_API const char* svt_version(void);
SVT_API const char* svt_last_error(void);
SVT_API const char* svt_status_name(svt_status status);

/* Datasets. label_column < 0 counts from the end (-1 = last column). */
SVT_API svt_status svt_dataset_load_csv(const char* path, int label_column, int has_header, svt_dataset** out);
SVT_API void svt_dataset_free(svt_dataset* ds);
SVT_API size_t svt_dataset_size(const svt_dataset* ds);
SVT_API int svt_dataset_num_classes(const svt_dataset* ds);
SVT_API size_t svt_dataset_feature_dim(const svt_dataset* ds);
SVT_API uint64_t svt_dataset_hash(const svt_dataset* ds);

/* Protocol settings shared by training and benchmarking. The grid arrays are
 * borrowed for the duration of the call. svt_options_default fills in 10
 * folds, 3 inner folds, gamma {0.001,0.01,0.1,1,10}, C {1,10,100,1000},
 * frac 0.2, c 0.1, delta 0.01, 10 BTS-G runs and 1000 DAG orders. */
typedef struct svt_options {
    const double* gammas;
    size_t n_gammas;
    const double* cs;
    size_t n_cs;
    int folds;
    int inner_folds;
    uint64_t seed;
    double frac;
    double bound_c;
    double bound_delta;
    int bts_runs;
    int dag_orders;
    double tolerance;
    int max_passes;
    int record_timing;
} svt_options;

SVT_API void svt_options_default(svt_options* opts);

/* Models. strategy is one of ovo, ova, ddag, adag, bts_g, cbts_g, ib_dtree,
 * ibge_dtree. Training normalizes the dataset, selects (gamma, C) by inner
 * cross-validation when the grid has more than one point, and trains on all
 * examples. */
SVT_API svt_status svt_model_train(const svt_dataset* ds, const char* strategy, const svt_options* opts,
                                   svt_model** out);
SVT_API svt_status svt_model_save(const svt_model* model, const char* path);
SVT_API svt_status svt_model_load(const char* path, svt_model** out);
SVT_API void svt_model_free(svt_model* model);
SVT_API const char* svt_model_strategy(const svt_model* model);
SVT_API size_t svt_model_feature_dim(const svt_model* model);
SVT_API int svt_model_num_classes(const svt_model* model);
/* Internal decision nodes for tree strategies, 0 otherwise. */
SVT_API size_t svt_model_internal_nodes(const svt_model* model);
SVT_API double svt_model_gamma(const svt_model* model);
SVT_API double svt_model_c(const svt_model* model);

/* Classifies one raw feature row. *label points into the model and stays
 * valid until the model is freed. Any output pointer may be NULL. */
SVT_API svt_status svt_model_predict(const svt_model* model, const double* x, size_t dim, int* class_id,
                                     const char** label, size_t* decisions);

/* Classifies every row of a CSV file and writes "predicted,decisions" rows
 * (label text, decision count) to output_path, or stdout when NULL. When
 * drop_label is non-zero, label_column is removed from each row first. */
SVT_API svt_status svt_model_predict_csv(const svt_model* model, const char* input_path, int has_header,
                                         int drop_label, int label_column, const char* output_path);

/* Benchmark reports. */
SVT_API svt_status svt_report_create(const svt_options* opts, const char* const* strategies, size_t n_strategies,
                                     svt_report** out);
/* Cross-validates every strategy of the report on the CSV at path. Build
 * failures are recorded in the report, not returned. */
SVT_API svt_status svt_report_add_dataset(svt_report* report, const char* path, int label_column, int has_header);
/* Records the identity of a dataset (path, columns, content hash) without
 * evaluating it, e.g. to describe a training run in a manifest. */
SVT_API svt_status svt_report_declare_dataset(svt_report* report, const char* path, int label_column, int has_header);
/* Reruns a manifest written by svt_report_write(..., "manifest", ...). */
SVT_API svt_status svt_report_run_manifest(const char* manifest_path, svt_report** out);
SVT_API svt_status svt_report_load_json(const char* path, svt_report** out);
/* Appends the datasets and cells of src not already present in dst. */
SVT_API svt_status svt_report_merge(svt_report* dst, const svt_report* src);
SVT_API void svt_report_free(svt_report* report);
SVT_API size_t svt_report_cell_count(const svt_report* report);
SVT_API size_t svt_report_failed_cells(const svt_report* report);
/* Mean accuracy and per-example decision count of one (dataset, strategy)
 * cell. dataset is the name used when it was added (its path). */
SVT_API svt_status svt_report_cell(const svt_report* report, const char* dataset, const char* strategy,
                                   double* mean_accuracy, double* mean_decisions);
/* format: text, csv, json or manifest. path NULL writes to stdout. */
SVT_API svt_status svt_report_write(const svt_report* report, const char* format, const char* path);

/* Two-sided Wilcoxon signed-rank test on n paired values. *p_defined is 0
 * when fewer than 5 differences are non-zero. */
SVT_API svt_status svt_wilcoxon(const double* a, const double* b, size_t n, double* p_value, int* p_defined,
                                int* win, int* lose, int* draw);

#ifdef __cplusplus
}
#endif

#endif /* SVMTREE_H */
