/* C interface to the sgrf pipeline: SMOTE oversampling, GA wrapper feature
 * selection, and random-forest classification for imbalanced tabular data.
 *
 * Conventions:
 *   - every function returns an sgrf_status; non-zero means failure and
 *     sgrf_last_error() describes it (thread-local message)
 *   - objects are opaque handles released with the matching _free call
 *   - strings produced by the library (char** out params) are heap
 *     allocated and released with sgrf_string_free
 *   - structured inputs and outputs are JSON or CSV text; file formats are
 *     documented in the project README
 */
#ifndef SGRF_C_API_H
#define SGRF_C_API_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgrf_status {
    SGRF_STATUS_OK = 0,
    /* bad arguments to the call itself (null handle, null out param) */
    SGRF_STATUS_ARGUMENT_ERROR = 1,
    /* malformed input: files, CSV cells, schemas, configuration JSON */
    SGRF_STATUS_INPUT_ERROR = 2,
    /* violated algorithmic precondition or internal failure */
    SGRF_STATUS_COMPUTE_ERROR = 3
} sgrf_status;

typedef struct sgrf_dataset sgrf_dataset;
typedef struct sgrf_forest sgrf_forest;

const char* sgrf_version(void);

/* Message for the most recent failure on this thread. */
const char* sgrf_last_error(void);

void sgrf_string_free(char* s);
void sgrf_dataset_free(sgrf_dataset* ds);
void sgrf_forest_free(sgrf_forest* forest);

/* ---- datasets ---- */

sgrf_status sgrf_dataset_from_csv(const char* csv_text, const char* schema_json,
                                  sgrf_dataset** out);
sgrf_status sgrf_dataset_from_csv_file(const char* csv_path, const char* schema_json,
                                       sgrf_dataset** out);

/* Draws a dataset from a generator configuration (JSON). */
sgrf_status sgrf_dataset_generate(const char* generator_json, sgrf_dataset** out);

/* Rows, features, label names, class counts, missing-cell count as JSON. */
sgrf_status sgrf_dataset_info(const sgrf_dataset* ds, char** out_json);

sgrf_status sgrf_dataset_to_csv(const sgrf_dataset* ds, char** out_csv);
sgrf_status sgrf_dataset_schema(const sgrf_dataset* ds, char** out_schema_json);

/* Imputes, rescales to [0,1] and removes degenerate columns, fitting the
 * parameters on the dataset itself. Summary lists dropped columns and the
 * learned fill/scale values. */
sgrf_status sgrf_dataset_preprocess(const sgrf_dataset* ds, sgrf_dataset** out,
                                    char** out_summary_json);

/* ---- SMOTE ---- */

/* config: {"k_neighbors": 6, "target_ratio": 1.0, "seed": 0}
 * provenance CSV columns: base_index, neighbor_index, gap */
sgrf_status sgrf_smote(const sgrf_dataset* ds, const char* config_json, sgrf_dataset** out,
                       char** out_provenance_csv, char** out_summary_json);

/* ---- GA feature selection ---- */

/* config: {"seed": ..., "threads": ..., "ga": {...}, "fitness": {...}}
 * selection JSON: {"selected": [names...], "mask": [0/1...], "fitness": f}
 * history CSV columns: generation, best, mean */
sgrf_status sgrf_select_features(const sgrf_dataset* ds, const char* config_json,
                                 char** out_selection_json, char** out_history_csv);

/* ---- random forest ---- */

/* config: {"seed": ..., "threads": ..., "forest": {...}}
 * mask_json: optional (may be NULL) selection JSON or ["name", ...] array
 * restricting training to named features. */
sgrf_status sgrf_forest_train(const sgrf_dataset* ds, const char* config_json,
                              const char* mask_json, sgrf_forest** out);

sgrf_status sgrf_forest_save(const sgrf_forest* forest, char** out_model_json);
sgrf_status sgrf_forest_load(const char* model_json, sgrf_forest** out);

/* Prediction CSV columns: row, predicted_label, score (positive-class vote
 * fraction). The dataset must contain every feature the model was trained
 * on, matched by name. */
sgrf_status sgrf_forest_predict(const sgrf_forest* forest, const sgrf_dataset* ds,
                                char** out_csv);

/* Out-of-bag error and coverage against the training dataset, as JSON. */
sgrf_status sgrf_forest_oob(const sgrf_forest* forest, const sgrf_dataset* ds,
                            char** out_json);

/* Permutation variable importance, as JSON. */
sgrf_status sgrf_forest_importance(const sgrf_forest* forest, const sgrf_dataset* ds,
                                   uint64_t seed, char** out_json);

/* ---- evaluation pipeline ---- */

/* Runs one pipeline mode under stratified cross-validation and returns the
 * full evaluation report as JSON. config is the pipeline configuration
 * documented in the README (mode, smote_scope, cv_folds, seed, smote, ga,
 * fitness, forest). */
sgrf_status sgrf_run_pipeline(const sgrf_dataset* ds, const char* config_json,
                              char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* SGRF_C_API_H */
