// Copyright 2026 The ShieldSyn Authors
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


#ifndef SHIELDSYN_SHIELDSYN_H_
#define SHIELDSYN_SHIELDSYN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SHS_API __declspec(dllexport)
#else
#define SHS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns SHS_OK or an error code; the message of the last error
 * on the calling thread is available from shs_last_error_message(). Strings
 * returned through char** are owned by the caller and released with
 * shs_string_free(). */
typedef enum shs_status {
  SHS_OK = 0,
  SHS_ERR_INVALID_ARGUMENT = 1,
  SHS_ERR_CONFIG = 2,
  SHS_ERR_PARSE = 3,
  SHS_ERR_DIMENSION = 4,
  SHS_ERR_STRUCTURAL = 5,
  SHS_ERR_NUMERICAL = 6,
  SHS_ERR_INVARIANT = 7,
  SHS_ERR_IO = 8,
  /* CEGIS stopped without covering the initial set. */
  SHS_ERR_NOT_FOUND = 9,
  SHS_ERR_INTERNAL = 10
} shs_status;

typedef struct shs_benchmark shs_benchmark;
typedef struct shs_oracle shs_oracle;
typedef struct shs_shield shs_shield;

SHS_API const char* shs_version(void);
SHS_API const char* shs_last_error_message(void);
SHS_API const char* shs_status_name(shs_status status);
SHS_API void shs_string_free(char* s);

/* Benchmarks: a registered name or a path to a benchmark file. */
SHS_API size_t shs_benchmark_count(void);
SHS_API const char* shs_benchmark_name_at(size_t index);
SHS_API shs_status shs_benchmark_load(const char* name_or_path,
                                      shs_benchmark** out);
SHS_API void shs_benchmark_free(shs_benchmark* b);
SHS_API const char* shs_benchmark_name(const shs_benchmark* b);
SHS_API int shs_benchmark_state_dim(const shs_benchmark* b);
SHS_API int shs_benchmark_action_dim(const shs_benchmark* b);
SHS_API shs_status shs_benchmark_to_json(const shs_benchmark* b, char** out);
/* Invariant degree bound for CEGIS; must be even and >= 2. */
SHS_API shs_status shs_benchmark_set_degree(shs_benchmark* b, int degree);
SHS_API shs_status shs_benchmark_set_hidden(shs_benchmark* b,
                                            const int* sizes, size_t count);
/* Wall-clock CEGIS budget in seconds; 0 disables. */
SHS_API shs_status shs_benchmark_set_time_budget(shs_benchmark* b,
                                                 double seconds);

/* Oracle networks. `curve_csv` (nullable) receives "iteration,eval_reward,
 * best_reward" rows. */
SHS_API shs_status shs_oracle_train(const shs_benchmark* b, uint64_t seed,
                                    shs_oracle** out, char** curve_csv);
SHS_API shs_status shs_oracle_load(const shs_benchmark* b, const char* path,
                                   shs_oracle** out);
SHS_API shs_status shs_oracle_save(const shs_oracle* o, const char* path);
SHS_API void shs_oracle_free(shs_oracle* o);
SHS_API shs_status shs_oracle_act(const shs_oracle* o, const double* state,
                                  size_t n, double* action, size_t m);

/* CEGIS over the benchmark's linear sketch. On SHS_ERR_NOT_FOUND the partial
 * shield is still returned in `out`. `report_json` (nullable) receives the
 * CEGIS outputs: status, entries, attempts and certificates. */
SHS_API shs_status shs_cegis_run(const shs_benchmark* b, const shs_oracle* o,
                                 uint64_t seed, shs_shield** out,
                                 char** report_json);
SHS_API shs_status shs_shield_load(const shs_benchmark* b, const char* path,
                                   shs_shield** out);
SHS_API shs_status shs_shield_save(const shs_benchmark* b,
                                   const shs_shield* s, const char* path);
SHS_API void shs_shield_free(shs_shield* s);
SHS_API size_t shs_shield_size(const shs_shield* s);
/* One shielded decision. `intervened` and `entry` are nullable. */
SHS_API shs_status shs_shield_step(const shs_benchmark* b,
                                   const shs_shield* s, const shs_oracle* o,
                                   const double* state, size_t n,
                                   double* action, size_t m, int* intervened,
                                   int* entry);

/* Paired episodes. A null shield runs the unshielded oracle only.
 * `step_log_path` (nullable) receives the per-step rows of the shielded run.
 * `metrics_json` receives the run metrics. */
SHS_API shs_status shs_simulate(const shs_benchmark* b, const shs_oracle* o,
                                const shs_shield* s, int episodes, int steps,
                                uint64_t seed, const char* step_log_path,
                                char** metrics_json);

/* CSV grid of the invariants over the first two state dimensions of the safe
 * box, columns named after the states then "E0,...,min". Other dimensions sit
 * at the initial-set center; unbounded dimensions use the verification bound. */
SHS_API shs_status shs_plot_grid(const shs_benchmark* b, const shs_shield* s,
                                 int resolution, char** csv);

/* Report JSON and CSV for one command. `results_json` and `artifacts_json`
 * are JSON objects (nullable for empty). */
SHS_API shs_status shs_report_build(const char* command,
                                    const shs_benchmark* b, uint64_t seed,
                                    const char* started,
                                    const char* results_json,
                                    const char* artifacts_json,
                                    char** report_json, char** report_csv);
SHS_API shs_status shs_timestamp(char** out);
/* Aggregated table over report JSON texts: aligned text and CSV. */
SHS_API shs_status shs_report_aggregate(const char* const* reports,
                                        size_t count, char** table_text,
                                        char** table_csv);

#ifdef __cplusplus
}
#endif

#endif /* SHIELDSYN_SHIELDSYN_H_ */
