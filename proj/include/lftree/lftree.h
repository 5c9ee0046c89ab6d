// Copyright 2026 The lftree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the lftree optimizer. All functions return an
 * lftree_status; on failure lftree_last_error() describes the problem for
 * the calling thread. Strings returned through char** are owned by the
 * caller and released with lftree_string_free(). */

#ifndef LFTREE_LFTREE_H
#define LFTREE_LFTREE_H

#include <stddef.h>
#include <stdint.h>

#if defined(LFTREE_BUILDING_LIBRARY)
#define LFTREE_API __attribute__((visibility("default")))
#else
#define LFTREE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lftree_status {
  LFTREE_OK = 0,
  LFTREE_INVALID_ARGUMENT = 1,
  LFTREE_IO = 2,
  LFTREE_INGESTION = 3,
  LFTREE_NUMERIC = 4,
  LFTREE_CONFIG = 5,
  LFTREE_NETWORK = 6,
  LFTREE_EXHAUSTED = 7,
  LFTREE_INTERNAL = 8
} lftree_status;

typedef struct lftree_pool lftree_pool;
typedef struct lftree_config lftree_config;

typedef struct lftree_run_summary {
  size_t iterations;
  size_t queries;
  int exhausted;
  double best;        /* native orientation */
  double final_gap;
  double final_regret;
} lftree_run_summary;

LFTREE_API const char* lftree_version(void);
LFTREE_API const char* lftree_last_error(void);
LFTREE_API const char* lftree_status_name(lftree_status status);
LFTREE_API void lftree_string_free(char* text);

/* Pools. `sense` is "maximize" or "minimize". */
LFTREE_API lftree_status lftree_pool_load(const char* path, const char* sense, lftree_pool** out);
LFTREE_API lftree_status lftree_pool_make_levy(size_t dim, size_t samples, uint64_t seed, double lo, double hi,
                                               lftree_pool** out);
/* Pool named by the [pool] section of a configuration. */
LFTREE_API lftree_status lftree_pool_from_config(const lftree_config* config, lftree_pool** out);
LFTREE_API void lftree_pool_free(lftree_pool* pool);
LFTREE_API size_t lftree_pool_size(const lftree_pool* pool);
LFTREE_API size_t lftree_pool_dim(const lftree_pool* pool);
/* Oracle value of one candidate in native orientation. */
LFTREE_API lftree_status lftree_pool_oracle(const lftree_pool* pool, size_t id, double* value);
LFTREE_API lftree_status lftree_pool_write_csv(const lftree_pool* pool, const char* path);

/* Run configurations. */
LFTREE_API lftree_status lftree_config_create(lftree_config** out);
LFTREE_API lftree_status lftree_config_load(const char* path, lftree_config** out);
LFTREE_API lftree_status lftree_config_set(lftree_config* config, const char* key, const char* value);
LFTREE_API lftree_status lftree_config_validate(const lftree_config* config);
LFTREE_API lftree_status lftree_config_to_json(const lftree_config* config, char** json);
LFTREE_API void lftree_config_free(lftree_config* config);

/* One optimization run. `timing_path` may be NULL; `summary` may be NULL. */
LFTREE_API lftree_status lftree_run(const lftree_config* config, const char* trace_path, const char* timing_path,
                                    lftree_run_summary* summary);

/* Clustering. Label files are CSV `id,label`. */
LFTREE_API lftree_status lftree_cluster_kmeans(const lftree_pool* pool, size_t clusters, uint64_t seed,
                                               size_t max_iters, const char* labels_path);
/* Labels the pool through a chat-completion endpoint described by the
 * clustering section of `config`; `cache_path` doubles as the label file.
 * `requests` receives the number of HTTP attempts and may be NULL. */
LFTREE_API lftree_status lftree_cluster_llm(const lftree_pool* pool, const lftree_config* config,
                                            const char* cache_path, size_t* requests);

/* Welch ANOVA and Games-Howell on `label,value` CSV text; result as JSON. */
LFTREE_API lftree_status lftree_stats_test(const char* csv_text, double p_threshold, int bonferroni, char** json);

/* Summary CSV over trace files with equal horizons. */
LFTREE_API lftree_status lftree_aggregate(const char* const* trace_paths, size_t count, int median, int normalize,
                                          const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* LFTREE_LFTREE_H */
