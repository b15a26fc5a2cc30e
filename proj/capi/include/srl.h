/* C interface to the subspace representation library. All objects are
 * opaque handles; every function returns a status code and reports details
 * through srl_last_error(). Strings and objects returned through out
 * parameters are owned by the caller and released with the matching
 * srl_*_free function. */

#ifndef SRL_H
#define SRL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srl_status {
  SRL_OK = 0,
  SRL_ERROR_ARGUMENT = 1, /* invalid argument or misuse */
  SRL_ERROR_DATA = 2,     /* missing or malformed data on disk */
  SRL_ERROR_NUMERIC = 3,  /* numerical failure */
  SRL_ERROR_INTERNAL = 4
} srl_status;

typedef enum srl_metric {
  SRL_METRIC_WSD = 0,
  SRL_METRIC_PROJECTION_FNORM = 1
} srl_metric;

typedef enum srl_template {
  SRL_TEMPLATE_PS = 0,
  SRL_TEMPLATE_DS = 1,
  SRL_TEMPLATE_UNION = 2,
  SRL_TEMPLATE_NN = 3
} srl_template;

/* Library version string, static storage. */
const char* srl_version(void);

/* Message for the most recent failing call on this thread; never NULL. */
const char* srl_last_error(void);

void srl_string_free(char* s);

/* ---- feature grids ------------------------------------------------ */

typedef struct srl_grid srl_grid;

/* values: h*w*d doubles, spatial-row-major, channel innermost. */
srl_status srl_grid_create(uint32_t height, uint32_t width, uint32_t depth,
                           const double* values, srl_grid** out);
srl_status srl_grid_load(const char* path, srl_grid** out);
srl_status srl_grid_save(const srl_grid* grid, const char* path);
srl_status srl_grid_dims(const srl_grid* grid, uint32_t* height, uint32_t* width,
                         uint32_t* depth);
srl_status srl_grid_values(const srl_grid* grid, double* out);
void srl_grid_free(srl_grid* grid);

/* ---- subspaces ----------------------------------------------------- */

typedef struct srl_subspace srl_subspace;

srl_status srl_subspace_extract(const srl_grid* grid, uint32_t basis_size,
                                srl_subspace** out);
srl_status srl_subspace_shape(const srl_subspace* sub, uint32_t* ambient_dim,
                              uint32_t* basis_size);
/* basis: row-major ambient_dim x basis_size. weights: basis_size entries. */
srl_status srl_subspace_basis(const srl_subspace* sub, double* out);
srl_status srl_subspace_weights(const srl_subspace* sub, double* out);
/* JSON document {"basis": [[...]], "weights": [...], "d": ..., "s": ...}. */
srl_status srl_subspace_to_json(const srl_subspace* sub, char** json_out);
void srl_subspace_free(srl_subspace* sub);

srl_status srl_distance(const srl_subspace* a, const srl_subspace* b, srl_metric metric,
                        double* out);

/* CSV of per-cell cosine similarities, height rows x width columns. */
srl_status srl_activation_map_csv(const srl_grid* grid, const srl_subspace* sub,
                                  uint32_t component, char** csv_out);

/* ---- datasets ------------------------------------------------------ */

typedef struct srl_dataset srl_dataset;

typedef struct srl_synthetic_config {
  uint32_t num_classes;
  uint32_t grids_per_class;
  uint32_t height, width, depth;
  uint32_t class_signal_rank;
  uint32_t background_rank;
  double noise_sigma;
  double foreground_fraction;
  double contrast_sigma; /* log-normal spread of per-grid contrast */
  double style_sigma;    /* log-normal spread of per-grid direction gains */
  double signal_decay;   /* geometric decay of class-direction strengths, (0,1] */
  double class_dispersion; /* spread of class directions around shared axes, (0,1] */
  uint64_t seed;
} srl_synthetic_config;

srl_status srl_dataset_generate(const srl_synthetic_config* config, srl_dataset** out);
/* dir must contain manifest.json plus the SRLF files it references. */
srl_status srl_dataset_load(const char* dir, srl_dataset** out);
srl_status srl_dataset_save(const srl_dataset* dataset, const char* dir);
srl_status srl_dataset_info(const srl_dataset* dataset, uint32_t* num_classes,
                            uint32_t* height, uint32_t* width, uint32_t* depth);
void srl_dataset_free(srl_dataset* dataset);

/* ---- episodic evaluation ------------------------------------------- */

typedef struct srl_eval_config {
  uint32_t ways;
  uint32_t shots;
  uint32_t queries_per_class;
  uint32_t episodes;
  uint32_t basis_size;
  srl_metric metric;
  srl_template template_strategy;
  double alpha; /* <= 0 picks the strategy default (0.1 PS, 0.01 DS) */
  uint32_t iterations;
  double gradient_floor; /* <= 0 picks the default 1e-8 */
  uint64_t seed;
  uint32_t workers;
} srl_eval_config;

/* Fills in the defaults: 5-way 5-shot, 15 queries, 1000 episodes, s = 5,
 * WSD metric, DS templates, 50 iterations, seed 0, 1 worker. */
void srl_eval_config_init(srl_eval_config* config);

/* Full evaluation report as a JSON document. Identical inputs produce
 * byte-identical JSON except for the "runtime" block. */
srl_status srl_evaluate_json(const srl_dataset* dataset, const srl_eval_config* config,
                             char** json_out);

/* Basis-size sweep; sizes must be strictly increasing. Either output may be
 * NULL when not wanted. */
srl_status srl_sweep(const srl_dataset* dataset, const uint32_t* sizes, size_t num_sizes,
                     const srl_eval_config* config, char** csv_out, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* SRL_H */
