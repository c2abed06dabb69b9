/* treewass — Wasserstein distances, optimal couplings and ell^1 embeddings
 * for discrete measures on weighted trees.
 *
 * C interface of the shared library. All objects are opaque handles created
 * and released through this API; every fallible call returns a twa_status
 * and, on failure, leaves a description in twa_last_error() (thread-local).
 * Handles are immutable once created and may be shared across threads.
 *
 * Numeric modes: TWA_NUM_DOUBLE computes in binary floating point;
 * TWA_NUM_RATIONAL computes in exact rational arithmetic. Values are always
 * reported as doubles; functions with an `out_exact` parameter additionally
 * return the exact value as a canonical "p" or "p/q" string in rational mode
 * (set to NULL in double mode). Strings returned through char** are owned by
 * the caller and released with twa_str_free(). Objects of different numeric
 * modes cannot be mixed in one call.
 */
#ifndef TREEWASS_H
#define TREEWASS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TWA_API __declspec(dllexport)
#else
#define TWA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum twa_status {
  TWA_OK = 0,
  TWA_ERR_CYCLE = 1,
  TWA_ERR_DISCONNECTED = 2,
  TWA_ERR_NON_POSITIVE_WEIGHT = 3,
  TWA_ERR_UNKNOWN_ROOT = 4,
  TWA_ERR_UNKNOWN_VERTEX = 5,
  TWA_ERR_NEGATIVE_MASS = 6,
  TWA_ERR_NOT_NORMALIZED = 7,
  TWA_ERR_UNMAPPED_POINT = 8,
  TWA_ERR_TOO_LARGE = 9,
  TWA_ERR_INFEASIBLE_MARGINALS = 10,
  TWA_ERR_MASS_LEAK = 11,
  TWA_ERR_SINGLE_POINT = 12,
  TWA_ERR_NON_CONTRACTION = 13,
  TWA_ERR_EMPTY_METRIC = 14,
  TWA_ERR_PARSE = 15,
  TWA_ERR_INVALID_ARGUMENT = 16,
  TWA_ERR_INTERNAL = 17
} twa_status;

typedef enum twa_numeric {
  TWA_NUM_DOUBLE = 0,
  TWA_NUM_RATIONAL = 1
} twa_numeric;

typedef struct twa_tree twa_tree;           /* rooted weighted tree + labels */
typedef struct twa_measure twa_measure;     /* discrete probability measure */
typedef struct twa_metric twa_metric;       /* finite metric + labels */
typedef struct twa_coupling twa_coupling;   /* sparse joint measure */
typedef struct twa_vector twa_vector;       /* sparse ell^1 embedding vector */
typedef struct twa_embedding twa_embedding; /* stochastic tree embedding */

/* ------------------------------------------------------------------ */
/* library                                                             */

TWA_API const char* twa_version(void);
TWA_API const char* twa_last_error(void);
TWA_API void twa_str_free(char* s);

/* ------------------------------------------------------------------ */
/* trees                                                               */

/* {"root": "<label>", "edges": [{"u": "...", "v": "...", "w": <num>}]} */
TWA_API twa_status twa_tree_from_json(const char* json, twa_numeric mode, twa_tree** out);

/* dense vertex ids 0..n-1; labels default to the decimal ids */
TWA_API twa_status twa_tree_build(uint32_t vertex_count, size_t edge_count, const uint32_t* u, const uint32_t* v,
                                  const double* w, uint32_t root, twa_numeric mode, twa_tree** out);

TWA_API twa_status twa_tree_to_json(const twa_tree* t, char** out_json);
TWA_API void twa_tree_free(twa_tree* t);
TWA_API uint32_t twa_tree_vertex_count(const twa_tree* t);
TWA_API twa_numeric twa_tree_mode(const twa_tree* t);
TWA_API twa_status twa_tree_vertex(const twa_tree* t, const char* label, uint32_t* out_id);
/* NULL when the id is out of range; pointer lives as long as the tree */
TWA_API const char* twa_tree_vertex_label(const twa_tree* t, uint32_t id);
TWA_API twa_status twa_tree_path_distance(const twa_tree* t, uint32_t u, uint32_t v, double* out);
TWA_API twa_status twa_tree_subtree_size(const twa_tree* t, uint32_t v, uint32_t* out);

/* ------------------------------------------------------------------ */
/* measures                                                            */

/* {"masses": {"<label>": <number>, ...}}; labels resolve against the tree */
TWA_API twa_status twa_measure_on_tree_from_json(const twa_tree* t, const char* json, twa_measure** out);
TWA_API twa_status twa_measure_on_tree(const twa_tree* t, size_t count, const uint32_t* ids, const double* masses,
                                       twa_measure** out);
TWA_API twa_status twa_measure_on_metric_from_json(const twa_metric* m, const char* json, twa_measure** out);
TWA_API twa_status twa_measure_on_metric(const twa_metric* m, size_t count, const uint32_t* ids,
                                         const double* masses, twa_measure** out);
TWA_API twa_status twa_measure_to_json_tree(const twa_tree* t, const twa_measure* m, char** out_json);
TWA_API uint32_t twa_measure_support_size(const twa_measure* m);
TWA_API void twa_measure_free(twa_measure* m);

/* ------------------------------------------------------------------ */
/* transport on trees                                                  */

TWA_API twa_status twa_tree_wasserstein(const twa_tree* t, const twa_measure* mu, const twa_measure* nu,
                                        double* out, char** out_exact);
TWA_API twa_status twa_optimal_coupling(const twa_tree* t, const twa_measure* mu, const twa_measure* nu,
                                        twa_coupling** out);
TWA_API twa_status twa_embed_measure(const twa_tree* t, const twa_measure* m, twa_vector** out);

TWA_API twa_status twa_vector_l1(const twa_vector* a, const twa_vector* b, double* out, char** out_exact);
TWA_API size_t twa_vector_entry_count(const twa_vector* v);
TWA_API twa_status twa_vector_to_json_tree(const twa_tree* t, const twa_vector* v, char** out_json);
TWA_API void twa_vector_free(twa_vector* v);

TWA_API size_t twa_coupling_entry_count(const twa_coupling* c);
TWA_API twa_status twa_coupling_entry(const twa_coupling* c, size_t i, uint32_t* src, uint32_t* dst, double* mass);
/* largest deviation of any row/column sum from the prescribed marginals */
TWA_API twa_status twa_coupling_marginal_deviation(const twa_coupling* c, double* out);
TWA_API twa_status twa_coupling_cost_tree(const twa_tree* t, const twa_coupling* c, double* out, char** out_exact);
TWA_API twa_status twa_coupling_cost_metric(const twa_metric* m, const twa_coupling* c, double* out,
                                            char** out_exact);
TWA_API twa_status twa_coupling_to_json_tree(const twa_tree* t, const twa_coupling* c, char** out_json);
TWA_API twa_status twa_coupling_to_json_metric(const twa_metric* m, const twa_coupling* c, char** out_json);
TWA_API void twa_coupling_free(twa_coupling* c);

/* ------------------------------------------------------------------ */
/* finite metrics and the exact transport oracle                       */

/* square numeric CSV, optional header row of labels */
TWA_API twa_status twa_metric_from_csv(const char* text, twa_numeric mode, twa_metric** out);
/* rows of coordinates, Euclidean metric; double mode only */
TWA_API twa_status twa_metric_from_points_csv(const char* text, twa_metric** out);
/* path metric of a tree; cap 0 means the default oracle cap (256) */
TWA_API twa_status twa_metric_from_tree(const twa_tree* t, uint32_t cap, twa_metric** out);
TWA_API uint32_t twa_metric_point_count(const twa_metric* m);
TWA_API twa_numeric twa_metric_mode(const twa_metric* m);
TWA_API twa_status twa_metric_distance(const twa_metric* m, uint32_t i, uint32_t j, double* out);
TWA_API twa_status twa_metric_point(const twa_metric* m, const char* label, uint32_t* out_id);
TWA_API const char* twa_metric_point_label(const twa_metric* m, uint32_t id);
TWA_API void twa_metric_free(twa_metric* m);

/* exact minimum-cost transport; out_coupling may be NULL */
TWA_API twa_status twa_transport_lp(const twa_metric* m, const twa_measure* mu, const twa_measure* nu,
                                    double* out_value, char** out_exact, twa_coupling** out_coupling);
/* Kantorovich-Rubinstein dual optimum (equals twa_transport_lp) */
TWA_API twa_status twa_kr_dual(const twa_metric* m, const twa_measure* mu, const twa_measure* nu, double* out_value,
                               char** out_exact);

/* ------------------------------------------------------------------ */
/* stochastic tree embeddings                                          */

/* `count` trees sampled independently, each with weight 1/count;
 * deterministic for a given (metric, seed, count) */
TWA_API twa_status twa_frt_sample(const twa_metric* m, uint64_t seed, uint32_t count, twa_embedding** out);
TWA_API twa_status twa_embedding_from_json(const char* json, twa_numeric mode, twa_embedding** out);
TWA_API twa_status twa_embedding_to_json(const twa_embedding* e, char** out_json);
TWA_API uint32_t twa_embedding_component_count(const twa_embedding* e);
TWA_API twa_status twa_embedding_source(const twa_embedding* e, twa_metric** out);
TWA_API void twa_embedding_free(twa_embedding* e);

/* exhaustive point-pair distortion audit; max_ratio is the empirical
 * distortion; flags (optional, component count entries) report
 * per-component non-contraction */
TWA_API twa_status twa_embedding_validate(const twa_embedding* e, double* min_ratio, double* max_ratio,
                                          uint32_t* argmax_a, uint32_t* argmax_b, int* flags, size_t flags_len);

/* pushforward of a source measure through component `component` */
TWA_API twa_status twa_lift_measure(const twa_embedding* e, const twa_measure* m, uint32_t component,
                                    twa_measure** out);
/* concatenated ell^1 image of a measure across all components */
TWA_API twa_status twa_wasserstein_l1_map(const twa_embedding* e, const twa_measure* m, twa_vector** out);

typedef struct twa_audit_result {
  double point_min_ratio;  /* exhaustive point-pair audit */
  double point_max_ratio;  /* = empirical distortion D */
  uint32_t point_argmax_a;
  uint32_t point_argmax_b;
  double pair_min_ratio;   /* sampled measure-pair audit */
  double pair_max_ratio;
  uint32_t pair_argmax;    /* sample index of the worst pair */
  uint32_t pairs_evaluated;
  uint32_t pairs_skipped;  /* pairs with zero transport distance */
  int sandwich_ok;         /* 1 iff ratios lie in [1 - 1e-9, D * (1 + 1e-9)] */
} twa_audit_result;

/* audits `pairs` random measure pairs drawn from `seed` against the exact
 * transport oracle on the source metric */
TWA_API twa_status twa_wasserstein_audit(const twa_embedding* e, uint32_t pairs, uint64_t seed,
                                         twa_audit_result* out);

/* ------------------------------------------------------------------ */
/* random instances (bench and audit tooling)                          */

TWA_API twa_status twa_random_tree(uint32_t vertex_count, uint64_t seed, twa_numeric mode, twa_tree** out);
TWA_API twa_status twa_random_measure_pair_on_tree(const twa_tree* t, uint64_t seed, uint32_t max_support,
                                                   twa_measure** out_mu, twa_measure** out_nu);
TWA_API twa_status twa_random_measure_pair_on_metric(const twa_metric* m, uint64_t seed, uint32_t max_support,
                                                     twa_measure** out_mu, twa_measure** out_nu);

#ifdef __cplusplus
}
#endif

#endif /* TREEWASS_H */
