#ifndef EGAN_EGAN_H
#define EGAN_EGAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EGAN_BUILDING)
#    define EGAN_API __declspec(dllexport)
#  else
#    define EGAN_API __declspec(dllimport)
#  endif
#else
#  define EGAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define EGAN_EMBEDDING_DIM 64
#define EGAN_HEX_DIGEST_LEN 65 /* 64 hex characters plus NUL */

typedef enum egan_status {
  EGAN_OK = 0,
  EGAN_ERR_SHAPE = 1,
  EGAN_ERR_CONTRACT = 2,
  EGAN_ERR_DEGENERATE = 3,
  EGAN_ERR_SINGULAR = 4,
  EGAN_ERR_FORMAT = 5,
  EGAN_ERR_IO = 6,
  EGAN_ERR_DIVERGENCE = 7,
  EGAN_ERR_INTERNAL = 8
} egan_status;

/* Message for the most recent failure on the calling thread; empty after success. */
EGAN_API const char* egan_last_error(void);
EGAN_API const char* egan_status_name(egan_status status);
EGAN_API const char* egan_version(void);

/* Strings returned through char** are heap-allocated; release with egan_string_free. */
EGAN_API void egan_string_free(char* s);

typedef struct egan_corpus egan_corpus;
typedef struct egan_model egan_model;
typedef struct egan_basis egan_basis;
typedef struct egan_probe egan_probe;
typedef struct egan_flip_report egan_flip_report;
typedef struct egan_range_report egan_range_report;
typedef struct egan_audit_report egan_audit_report;
typedef struct egan_registry egan_registry;

/* ---- corpus ---- */

typedef struct egan_synth_config {
  uint32_t speakers;
  uint32_t utterances_per_speaker;
  double mean_scale;
  double noise_scale;
  double margin;
  double slope;
  uint64_t seed;
} egan_synth_config;

EGAN_API void egan_synth_config_default(egan_synth_config* cfg);
EGAN_API egan_status egan_corpus_synthesize(const egan_synth_config* cfg, egan_corpus** out);
EGAN_API egan_status egan_corpus_load(const char* path, egan_corpus** out);
EGAN_API egan_status egan_corpus_import_csv(const char* path, egan_corpus** out);
EGAN_API egan_status egan_corpus_save(const egan_corpus* c, const char* path);
EGAN_API egan_status egan_corpus_subset(const egan_corpus* c, const size_t* rows, size_t n,
                                        egan_corpus** out);
EGAN_API void egan_corpus_free(egan_corpus* c);
EGAN_API size_t egan_corpus_count(const egan_corpus* c);
EGAN_API size_t egan_corpus_dim(const egan_corpus* c);
/* Copies row i (dim floats) into out. */
EGAN_API egan_status egan_corpus_row(const egan_corpus* c, size_t i, float* out);
/* Speaker id of row i; EGAN_ERR_CONTRACT when the corpus has no speaker labels. */
EGAN_API egan_status egan_corpus_speaker(const egan_corpus* c, size_t i, uint32_t* out);
EGAN_API egan_status egan_corpus_hash(const egan_corpus* c, char out_hex[EGAN_HEX_DIGEST_LEN]);
/* JSON object with per-dimension mean/variance, norm summary and speaker counts. */
EGAN_API egan_status egan_corpus_stats_json(const egan_corpus* c, char** out_json);

/* ---- training ---- */

typedef struct egan_train_config {
  uint32_t latent_dim;
  uint32_t hidden;
  uint32_t blocks;
  uint32_t batch_size;
  uint32_t critic_updates;
  uint64_t steps;
  uint64_t seed;
  uint64_t log_interval;
  double lr_generator;
  double lr_critic;
  double beta1;
  double beta2;
  double cost_scale;
} egan_train_config;

typedef struct egan_metrics {
  uint64_t step;
  double transport_cost;
  double critic_loss;
  double generator_loss;
} egan_metrics;

typedef void (*egan_metrics_fn)(const egan_metrics* m, void* user);

EGAN_API void egan_train_config_default(egan_train_config* cfg);
EGAN_API egan_status egan_train_config_validate(const egan_train_config* cfg);
/* on_log receives interval means every log_interval steps and at the last step.
   EGAN_ERR_DIVERGENCE carries the failing step in the error message. */
EGAN_API egan_status egan_train(const egan_corpus* corpus, const egan_train_config* cfg,
                                egan_metrics_fn on_log, void* user, egan_model** out);

EGAN_API egan_status egan_model_load(const char* path, egan_model** out);
EGAN_API egan_status egan_model_save(const egan_model* m, const char* path);
EGAN_API void egan_model_free(egan_model* m);
EGAN_API size_t egan_model_latent_dim(const egan_model* m);
EGAN_API void egan_model_train_config(const egan_model* m, egan_train_config* out);
EGAN_API egan_status egan_model_fingerprint(const egan_model* m, char out_hex[EGAN_HEX_DIGEST_LEN]);
EGAN_API egan_status egan_model_corpus_hash(const egan_model* m, char out_hex[EGAN_HEX_DIGEST_LEN]);

/* Standard-normal latent drawn from the stream derived from (seed, index). */
EGAN_API egan_status egan_sample_latent(uint64_t seed, uint64_t index, size_t latent_dim,
                                        float* out);
/* n latents (n x d_z, row-major) to n embeddings (n x 64). */
EGAN_API egan_status egan_generate(const egan_model* m, const float* z, size_t n, float* out);
EGAN_API egan_status egan_first_layer(const egan_model* m, const float* z, float* out_hidden);
EGAN_API egan_status egan_critic_score(const egan_model* m, const float* embedding, double* out);

/* ---- direction discovery and editing ---- */

typedef struct egan_directions_config {
  uint64_t samples;
  uint32_t directions;
  uint64_t seed;
} egan_directions_config;

EGAN_API void egan_directions_config_default(egan_directions_config* cfg);
EGAN_API egan_status egan_basis_fit(const egan_model* m, const egan_directions_config* cfg,
                                    egan_basis** out);
EGAN_API egan_status egan_basis_load(const char* path, egan_basis** out);
EGAN_API egan_status egan_basis_save(const egan_basis* b, const char* path);
EGAN_API void egan_basis_free(egan_basis* b);
EGAN_API size_t egan_basis_directions(const egan_basis* b);
EGAN_API size_t egan_basis_latent_dim(const egan_basis* b);
EGAN_API egan_status egan_basis_variances(const egan_basis* b, double* out);
/* z' = z + U x, then generate. offsets has one entry per direction. */
EGAN_API egan_status egan_edit(const egan_model* m, const egan_basis* b, const float* z,
                               const float* offsets, float* out_latent, float* out_embedding);

/* ---- probes ---- */

typedef enum egan_probe_kind { EGAN_PROBE_BINARY = 0, EGAN_PROBE_SCALAR = 1 } egan_probe_kind;

typedef struct egan_probe_config {
  double heldout_fraction;
  uint64_t seed;
  uint32_t iterations;
  double learning_rate;
  double l2;
} egan_probe_config;

EGAN_API void egan_probe_config_default(egan_probe_config* cfg);
/* The attribute's kind decides the probe kind. */
EGAN_API egan_status egan_probe_fit(const egan_corpus* c, const char* attribute,
                                    const egan_probe_config* cfg, egan_probe** out);
EGAN_API egan_status egan_probe_load(const char* path, egan_probe** out);
EGAN_API egan_status egan_probe_save(const egan_probe* p, const char* path);
EGAN_API void egan_probe_free(egan_probe* p);
EGAN_API egan_probe_kind egan_probe_get_kind(const egan_probe* p);
EGAN_API double egan_probe_heldout_accuracy(const egan_probe* p);
EGAN_API egan_status egan_probe_score(const egan_probe* p, const float* embedding, double* out);

/* ---- sweeps ---- */

typedef struct egan_sweep_config {
  uint32_t n_seeds;
  double range_lo;
  double range_hi;
  double step;
  uint64_t seed;
} egan_sweep_config;

typedef enum egan_report_part {
  EGAN_REPORT_RECORDS_CSV = 0,
  EGAN_REPORT_HISTOGRAM_CSV = 1,
  EGAN_REPORT_SUMMARY_JSON = 2,
  EGAN_REPORT_HISTOGRAM_SVG = 3
} egan_report_part;

typedef struct egan_flip_summary {
  uint32_t seeds;
  uint32_t flipped;
  uint32_t flipped_once;
  uint32_t multi_flip;
  uint32_t central; /* flip points inside the middle half of the range */
  double low_to_high_fraction;
  double high_to_low_fraction;
} egan_flip_summary;

typedef struct egan_range_summary {
  uint32_t seeds;
  double mean_range;
} egan_range_summary;

EGAN_API void egan_sweep_config_default(egan_sweep_config* cfg);
/* Mean per-seed range of the probe's unsquashed output (logit or unclamped
   regression) along each direction; out has one entry per direction. */
EGAN_API egan_status egan_direction_effects(const egan_model* m, const egan_basis* b,
                                            const egan_probe* p, const egan_sweep_config* cfg,
                                            double* out);
EGAN_API egan_status egan_flip_sweep(const egan_model* m, const egan_basis* b, size_t k,
                                     const egan_probe* p, const egan_sweep_config* cfg,
                                     egan_flip_report** out);
EGAN_API void egan_flip_report_free(egan_flip_report* r);
EGAN_API void egan_flip_report_summary(const egan_flip_report* r, egan_flip_summary* out);
EGAN_API egan_status egan_flip_report_render(const egan_flip_report* r, egan_report_part part,
                                             char** out);

EGAN_API egan_status egan_range_sweep(const egan_model* m, const egan_basis* b, size_t k,
                                      const egan_probe* p, const egan_sweep_config* cfg,
                                      egan_range_report** out);
EGAN_API void egan_range_report_free(egan_range_report* r);
EGAN_API void egan_range_report_summary(const egan_range_report* r, egan_range_summary* out);
EGAN_API egan_status egan_range_report_render(const egan_range_report* r, egan_report_part part,
                                              char** out);

/* ---- privacy audit ---- */

typedef struct egan_calibration {
  double threshold;
  double equal_error_rate;
  double false_positive_rate;
  double false_negative_rate;
} egan_calibration;

typedef struct egan_audit_config {
  uint32_t n_generated;
  int use_fixed_threshold; /* nonzero: use threshold below instead of calibrating */
  double threshold;
  uint64_t seed;
} egan_audit_config;

typedef struct egan_audit_summary {
  uint32_t generated;
  double threshold;
  double error_rate_percent;
  uint32_t flagged;
  uint32_t duplicates;
  double nn_median;
  double nn_max;
} egan_audit_summary;

EGAN_API void egan_audit_config_default(egan_audit_config* cfg);
EGAN_API egan_status egan_calibrate_threshold(const egan_corpus* c, egan_calibration* out);
EGAN_API egan_status egan_privacy_audit(const egan_model* m, const egan_corpus* train,
                                        const egan_audit_config* cfg, egan_audit_report** out);
/* Audits caller-supplied embeddings (n x 64); n_generated and seed are ignored. */
EGAN_API egan_status egan_audit_embeddings(const float* embeddings, size_t n,
                                           const egan_corpus* train, const egan_audit_config* cfg,
                                           egan_audit_report** out);
EGAN_API void egan_audit_report_free(egan_audit_report* r);
EGAN_API void egan_audit_report_summary(const egan_audit_report* r, egan_audit_summary* out);
/* Supports EGAN_REPORT_RECORDS_CSV and EGAN_REPORT_SUMMARY_JSON. */
EGAN_API egan_status egan_audit_report_render(const egan_audit_report* r, egan_report_part part,
                                              char** out);

/* ---- direction labels ---- */

EGAN_API egan_status egan_registry_new(size_t directions, egan_registry** out);
EGAN_API egan_status egan_registry_load(const char* path, size_t directions, egan_registry** out);
EGAN_API egan_status egan_registry_save(const egan_registry* r, const char* path);
EGAN_API void egan_registry_free(egan_registry* r);
EGAN_API egan_status egan_registry_register(egan_registry* r, size_t k, const char* label,
                                            const char* provenance);
/* *out_label is NULL when direction k has no label. */
EGAN_API egan_status egan_registry_lookup(const egan_registry* r, size_t k, char** out_label,
                                          char** out_provenance);

/* ---- redundancy-reduction loss ---- */

/* a, b: n x f row-major. grad_a / grad_b may be NULL. */
EGAN_API egan_status egan_twins_loss(const float* a, const float* b, size_t n, size_t f,
                                     double lambda, double* out_loss, float* grad_a,
                                     float* grad_b);

/* ---- files ---- */

EGAN_API egan_status egan_file_sha256(const char* path, char out_hex[EGAN_HEX_DIGEST_LEN]);
/* Writes via a temporary file and rename. */
EGAN_API egan_status egan_write_file_atomic(const char* path, const void* data, size_t len);

#ifdef __cplusplus
}
#endif

#endif /* EGAN_EGAN_H */
