/* C interface to the approximate-adder error analysis library. */
#ifndef APX_APX_H
#define APX_APX_H

#include <stddef.h>
#include <stdint.h>

#if defined(APX_BUILDING_LIBRARY)
#define APX_API __attribute__((visibility("default")))
#else
#define APX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum apx_status {
  APX_OK = 0,
  APX_ERR_PARSE = 1,
  APX_ERR_INVALID_ARGUMENT = 2,
  APX_ERR_IO = 3,
  APX_ERR_INFEASIBLE = 4,
  APX_ERR_OVERFLOW = 5,
  APX_ERR_UNSTABLE = 6,
  APX_ERR_INTERNAL = 7
} apx_status;

typedef struct apx_netlist apx_netlist;
typedef struct apx_assignment apx_assignment;
typedef struct apx_report apx_report;

/* Message of the last failed call on this thread ("" if none). */
APX_API const char* apx_last_error(void);
APX_API const char* apx_status_name(apx_status status);

/* ---- netlists ---------------------------------------------------------- */

APX_API apx_status apx_netlist_read(const char* path, apx_netlist** out);
APX_API apx_status apx_netlist_parse(const char* text, apx_netlist** out);
/* name: fir18 | iir4 | dct8 | fig3a | fig3b */
APX_API apx_status apx_benchmark_generate(const char* name, int frac_bits, apx_netlist** out);
APX_API apx_status apx_netlist_write(const apx_netlist* net, const char* path);
APX_API int apx_netlist_frac_bits(const apx_netlist* net);
APX_API size_t apx_netlist_adder_count(const apx_netlist* net);
APX_API size_t apx_netlist_output_count(const apx_netlist* net);
APX_API void apx_netlist_free(apx_netlist* net);

/* ---- assignments (approximate bits per adder) -------------------------- */

APX_API apx_status apx_assignment_uniform(const apx_netlist* net, int k, apx_assignment** out);
APX_API apx_status apx_assignment_read(const apx_netlist* net, const char* path, apx_assignment** out);
APX_API apx_status apx_assignment_write(const apx_netlist* net, const apx_assignment* a, const char* path);
APX_API apx_status apx_assignment_set(const apx_netlist* net, apx_assignment* a, const char* adder_id, int k);
APX_API apx_status apx_assignment_get(const apx_netlist* net, const apx_assignment* a, const char* adder_id, int* k);
APX_API int apx_assignment_total(const apx_assignment* a);
APX_API uint64_t apx_assignment_hash(const apx_netlist* net, const apx_assignment* a);
APX_API void apx_assignment_free(apx_assignment* a);

/* ---- options ------------------------------------------------------------ */

typedef struct apx_model_options {
  const char* adder_kind; /* accurate|trunc|median|loa|ama1|ama2|ama5|eta1 */
  const char* prob_mode;  /* uniform|marginal|markov */
  int refine_median;      /* nonzero: refined Median fills */
} apx_model_options;

typedef struct apx_optimize_options {
  apx_model_options model;
  double target_db;
  int max_tabu_iters;
  int tabu_tenure;
  uint64_t seed;
} apx_optimize_options;

typedef enum apx_input_source { APX_INPUT_UNIFORM = 0, APX_INPUT_FILE = 1, APX_INPUT_IMAGE = 2 } apx_input_source;

typedef struct apx_sim_options {
  uint64_t samples;
  uint64_t seed;
  apx_input_source source;
  const char* input_path;
  int64_t warmup; /* negative: default */
  int threads;
} apx_sim_options;

APX_API void apx_model_options_init(apx_model_options* o);
APX_API void apx_optimize_options_init(apx_optimize_options* o);
APX_API void apx_sim_options_init(apx_sim_options* o);

/* ---- analyses ------------------------------------------------------------ */

APX_API apx_status apx_analyze(const apx_netlist* net, const apx_assignment* a, const apx_model_options* model,
                               apx_report** out);
/* On success *out_assignment holds the result; apx_report_feasible() is 0 when
   no adder could be approximated within the target. */
APX_API apx_status apx_optimize(const apx_netlist* net, const apx_optimize_options* opt,
                                apx_assignment** out_assignment, apx_report** out_report);
APX_API apx_status apx_simulate(const apx_netlist* net, const apx_assignment* a, const apx_model_options* model,
                                const apx_sim_options* sim, apx_report** out);
APX_API apx_status apx_compare(const apx_netlist* net, const apx_assignment* a, const apx_model_options* model,
                               const apx_sim_options* sim, apx_report** out);
/* Samples file (one unsigned integer per line) or, for *.pgm, an image. */
APX_API apx_status apx_check_uniformity(const char* path, int bits, double epsilon, apx_report** out);

/* ---- reports ------------------------------------------------------------- */

/* format: "csv" | "text". The string stays valid until the next render call
   on the same report or apx_report_free. */
APX_API apx_status apx_report_render(apx_report* r, const char* format, const char** text);
APX_API apx_status apx_report_write(apx_report* r, const char* format, const char* path);
APX_API size_t apx_report_output_count(const apx_report* r);
/* Noise power in dB of output i (the simulated value for simulations and
   comparisons, the parameterized model otherwise). */
APX_API double apx_report_np_db(const apx_report* r, size_t i);
APX_API double apx_report_mean_np_db(const apx_report* r);
APX_API int apx_report_k_max(const apx_report* r);
APX_API int apx_report_feasible(const apx_report* r);
APX_API void apx_report_free(apx_report* r);

#ifdef __cplusplus
}
#endif

#endif /* APX_APX_H */
