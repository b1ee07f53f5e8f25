/* C interface to the isingmc sweep engines. All entry points return an
 * ising_status; on failure ising_last_error() describes the problem for the
 * calling thread. Handles are opaque and freed with their matching _free
 * function. */
#ifndef ISINGMC_H
#define ISINGMC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ising_status {
    ISING_OK = 0,
    ISING_ERR_ARGUMENT = 1, /* bad parameter or precondition violation */
    ISING_ERR_PARSE = 2,    /* malformed model document */
    ISING_ERR_IO = 3,       /* file could not be read or written */
    ISING_ERR_INTERNAL = 4
} ising_status;

typedef enum ising_engine {
    ISING_ENGINE_REFERENCE = 0,
    ISING_ENGINE_BASIC = 1,
    ISING_ENGINE_VECTOR4 = 2,
    ISING_ENGINE_COALESCED = 3
} ising_engine;

typedef enum ising_exp_kind {
    ISING_EXP_ENGINE_DEFAULT = 0, /* exact for reference, fast otherwise */
    ISING_EXP_EXACT = 1,
    ISING_EXP_FAST = 2,
    ISING_EXP_ACCURATE = 3
} ising_exp_kind;

/* Message describing the last failure seen by this thread. */
const char* ising_last_error(void);

void ising_string_free(char* s);

/* ---- models ---- */

typedef struct ising_model ising_model;

ising_status ising_model_load(const char* path, ising_model** out);
ising_status ising_model_save(const ising_model* model, const char* path);
ising_status ising_model_from_string(const char* text, ising_model** out);
ising_status ising_model_to_string(const ising_model* model, char** out);
void ising_model_free(ising_model* model);

uint32_t ising_model_spins(const ising_model* model);
/* Returns 1 and fills layers/per_layer for layered models, 0 otherwise. */
int ising_model_layers(const ising_model* model, uint32_t* layers, uint32_t* per_layer);
/* spins: n entries, each +1 or -1. */
ising_status ising_model_cost(const ising_model* model, const int8_t* spins, uint32_t n,
                              double* cost);

typedef struct ising_generate_spec {
    uint32_t layers;
    uint32_t per_layer;
    uint32_t space_degree_min;
    uint32_t space_degree_max;
    int couplings_uniform; /* 0: J in {-1,+1}, h in {-1,0,+1}; 1: uniform(-1,1) */
    float j_tau;
    uint32_t seed;
    int allow_tau_ring; /* permit per_layer == 1 */
} ising_generate_spec;

ising_status ising_model_generate(const ising_generate_spec* spec, ising_model** out);

/* ---- sweeps ---- */

typedef struct ising_run_params {
    ising_engine engine;
    uint64_t sweeps;
    float beta;
    float tau_scale;
    int exp_kind;  /* ising_exp_kind */
    uint32_t seed;
    uint32_t workers;                 /* coalesced phase workers, >= 1 */
    const uint32_t* stats_widths;     /* group widths for wait statistics */
    uint32_t n_stats_widths;
} ising_run_params;

#define ISING_MAX_STATS_WIDTHS 8

typedef struct ising_run_report {
    double final_cost;
    double flip_rate;
    uint64_t flips;
    uint64_t attempts;
    uint64_t checksum; /* sign sequence in original spin order */
    uint32_t n_wait;
    uint32_t wait_width[ISING_MAX_STATS_WIDTHS];
    double wait_probability[ISING_MAX_STATS_WIDTHS];
} ising_run_report;

/* Runs `sweeps` Metropolis sweeps of the chosen engine on the model (the
 * engine-specific spin reordering is applied internally; reported quantities
 * are in the model's original indexing). */
ising_status ising_run(const ising_model* model, const ising_run_params* params,
                       ising_run_report* out);
/* As ising_run, but also renders the report as a JSON document. */
ising_status ising_run_json(const ising_model* model, const ising_run_params* params,
                            ising_run_report* out_report, char** out_json);

/* ---- benchmark ---- */

typedef struct ising_bench_params {
    const ising_engine* engines;
    uint32_t n_engines;
    uint64_t sweeps;
    uint32_t repetitions;
    const float* betas; /* one chain per value */
    uint32_t n_betas;
    float tau_scale;
    int exp_kind; /* ising_exp_kind */
    uint32_t seed;
    uint32_t workers; /* chains in flight; 1 = single worker */
} ising_bench_params;

typedef struct ising_bench_report ising_bench_report;

ising_status ising_bench_run(const ising_model* model, const ising_bench_params* params,
                             ising_bench_report** out);
ising_status ising_bench_report_csv(const ising_bench_report* report, char** out);
ising_status ising_bench_report_json(const ising_bench_report* report, char** out);
void ising_bench_report_free(ising_bench_report* report);

/* exp_fast vs the library exponential; speedup = libm time / fast time. */
ising_status ising_bench_exp(double* fast_ns, double* libm_ns, double* speedup);

/* ---- validation ---- */

/* suite: "rng", "exp", "trajectory", "boltzmann" or "all". Fills the failure
 * count and, when out_json is non-NULL, a detailed JSON report. */
ising_status ising_validate(const char* suite, int* failures, char** out_json);

/* ---- exponential approximation scan ---- */

typedef struct ising_exp_scan_summary {
    double lo, hi;
    long long samples;
    double min_rel, max_rel, mean_rel;
} ising_exp_scan_summary;

/* variant: 0 = fast, 1 = accurate. csv_path may be NULL; when given, at most
 * csv_max_rows sample rows plus a summary row are written. */
ising_status ising_exp_scan(int variant, double lo, double hi, long long samples,
                            const char* csv_path, long long csv_max_rows,
                            ising_exp_scan_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* ISINGMC_H */
