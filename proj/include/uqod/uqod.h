#ifndef UQOD_UQOD_H
#define UQOD_UQOD_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(UQOD_BUILDING_LIBRARY)
#    define UQOD_API __declspec(dllexport)
#  else
#    define UQOD_API __declspec(dllimport)
#  endif
#else
#  define UQOD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uqod_status {
  UQOD_OK = 0,
  UQOD_ERR_INVALID_ARGUMENT = 1,
  UQOD_ERR_SCHEMA = 2,
  UQOD_ERR_EMPTY = 3,
  UQOD_ERR_MISMATCH = 4,
  UQOD_ERR_IO = 5,
  UQOD_ERR_INTERNAL = 6
} uqod_status;

typedef enum uqod_map_source { UQOD_MAP_CONSENSUS = 0, UQOD_MAP_FIRST_PASS = 1 } uqod_map_source;

typedef enum uqod_alternative {
  UQOD_TWO_SIDED = 0,
  UQOD_GREATER = 1,
  UQOD_LESS = 2
} uqod_alternative;

typedef enum uqod_uqm { UQOD_VR = 0, UQOD_SE = 1, UQOD_MI = 2, UQOD_TV = 3, UQOD_PS = 4 } uqod_uqm;

typedef struct uqod_dump uqod_dump;
typedef struct uqod_clustering uqod_clustering;
typedef struct uqod_run_config uqod_run_config;

/* Message of the last failed call on this thread; never NULL. */
UQOD_API const char* uqod_last_error(void);
UQOD_API const char* uqod_version(void);

/* Prediction dumps. The parse and load calls validate the JSON structure;
   uqod_dump_validate checks the semantic constraints. */
UQOD_API uqod_status uqod_dump_parse(const char* json, uqod_dump** out);
UQOD_API uqod_status uqod_dump_load(const char* path, uqod_dump** out);
UQOD_API void uqod_dump_free(uqod_dump* dump);
UQOD_API size_t uqod_dump_detection_count(const uqod_dump* dump);
UQOD_API uqod_status uqod_dump_validate(const uqod_dump* dump, size_t* violation_count);
/* Violation text from the last uqod_dump_validate call on this dump. */
UQOD_API const char* uqod_dump_violation(const uqod_dump* dump, size_t index);

/* Density clustering of one dump's detections. */
UQOD_API uqod_status uqod_cluster(const uqod_dump* dump, int min_samples, int min_cluster_size,
                                  uqod_clustering** out);
UQOD_API void uqod_clustering_free(uqod_clustering* clustering);
UQOD_API size_t uqod_clustering_count(const uqod_clustering* clustering);
UQOD_API size_t uqod_clustering_noise_count(const uqod_clustering* clustering);
UQOD_API size_t uqod_clustering_size(const uqod_clustering* clustering, size_t cluster);
/* Writes VR, SE, MI, TV, PS (5 values) of one cluster. */
UQOD_API uqod_status uqod_cluster_uncertainty(const uqod_clustering* clustering, size_t cluster,
                                              double values[5]);
/* Image level means; UQOD_ERR_EMPTY when there are no clusters. */
UQOD_API uqod_status uqod_image_uncertainty(const uqod_clustering* clustering, double values[5]);

/* Statistics over paired samples of length n. */
UQOD_API uqod_status uqod_wilcoxon(const double* a, const double* b, size_t n,
                                   uqod_alternative alternative, double* statistic,
                                   double* p_value);
/* values is row-major, n_rows x n_groups. */
UQOD_API uqod_status uqod_friedman(const double* values, size_t n_rows, size_t n_groups,
                                   double* statistic, double* p_value);
/* rho is NaN when a sample has no rank variance. */
UQOD_API uqod_status uqod_spearman(const double* x, const double* y, size_t n, double* rho,
                                   double* p_value);
UQOD_API uqod_status uqod_holm(const double* p_values, size_t n, double alpha, int* reject,
                               double* adjusted);
UQOD_API uqod_status uqod_rank_biserial(const double* a, const double* b, size_t n, double* r);

UQOD_API uqod_status uqod_rs_map(double original, const double* adversarial, size_t m,
                                 double* score);
UQOD_API uqod_status uqod_rs_uqm(double original, const double* adversarial, size_t m,
                                 double* score);

/* Pipeline configuration shared by the evaluate, robustness and compare
   entry points. Setters take copies of the strings. */
UQOD_API uqod_run_config* uqod_run_config_new(void);
UQOD_API void uqod_run_config_free(uqod_run_config* config);
UQOD_API void uqod_run_config_set_manifest(uqod_run_config* config, const char* path);
UQOD_API void uqod_run_config_set_dumps(uqod_run_config* config, const char* path);
UQOD_API void uqod_run_config_set_out(uqod_run_config* config, const char* path);
UQOD_API void uqod_run_config_set_model_id(uqod_run_config* config, const char* model_id);
UQOD_API void uqod_run_config_set_iou_threshold(uqod_run_config* config, double threshold);
UQOD_API void uqod_run_config_set_min_samples(uqod_run_config* config, int min_samples);
UQOD_API void uqod_run_config_set_min_cluster_size(uqod_run_config* config, int size);
UQOD_API void uqod_run_config_set_map_source(uqod_run_config* config, uqod_map_source source);
UQOD_API void uqod_run_config_set_normalize_minmax(uqod_run_config* config, int enabled);
UQOD_API void uqod_run_config_set_alpha(uqod_run_config* config, double alpha);
UQOD_API void uqod_run_config_set_threads(uqod_run_config* config, unsigned threads);
UQOD_API void uqod_run_config_add_run(uqod_run_config* config, const char* path);

UQOD_API uqod_status uqod_run_evaluate(const uqod_run_config* config);
UQOD_API uqod_status uqod_run_robustness(const uqod_run_config* config);
UQOD_API uqod_status uqod_run_compare(const uqod_run_config* config);
UQOD_API uqod_status uqod_run_synth(const char* config_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
