#include "isingmc.h"

#include <cstring>
#include <new>
#include <string>

#include "isingmc/bench.hpp"
#include "isingmc/fastexp.hpp"
#include "isingmc/model.hpp"
#include "isingmc/model_io.hpp"
#include "isingmc/oracle.hpp"
#include "isingmc/sweep.hpp"
#include "isingmc/validate.hpp"

#include <json.hpp>

using namespace isingmc;

extern "C" {

struct ising_model {
    SpinModel model;
};

struct ising_bench_report {
    BenchReport report;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename F>
ising_status guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        set_error(e.what());
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("write failed") != std::string::npos) {
            return ISING_ERR_IO;
        }
        if (what.find("line ") == 0 || what.find(": line ") != std::string::npos) {
            return ISING_ERR_PARSE;
        }
        return ISING_ERR_ARGUMENT;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return ISING_ERR_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return ISING_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ExpKind to_exp_kind(int kind, EngineKind engine) {
    switch (kind) {
        case ISING_EXP_ENGINE_DEFAULT: return default_exp_kind(engine);
        case ISING_EXP_EXACT: return ExpKind::exact;
        case ISING_EXP_FAST: return ExpKind::fast;
        case ISING_EXP_ACCURATE: return ExpKind::accurate;
    }
    throw Error("invalid exp_kind value " + std::to_string(kind));
}

EngineKind to_engine(ising_engine e) {
    switch (e) {
        case ISING_ENGINE_REFERENCE: return EngineKind::reference;
        case ISING_ENGINE_BASIC: return EngineKind::basic;
        case ISING_ENGINE_VECTOR4: return EngineKind::vector4;
        case ISING_ENGINE_COALESCED: return EngineKind::coalesced;
    }
    throw Error("invalid engine value " + std::to_string(int(e)));
}

struct RunOutcome {
    ising_run_report report;
    std::string engine;
    std::string exp;
    uint64_t sweeps;
    float beta, tau_scale;
    uint32_t seed, workers;
};

RunOutcome do_run(const ising_model* model, const ising_run_params* params) {
    if (model == nullptr || params == nullptr) throw Error("null argument");
    if (params->workers < 1) throw Error("workers must be >= 1");
    const EngineKind engine = to_engine(params->engine);
    const ExpKind exp_kind = to_exp_kind(params->exp_kind, engine);

    auto [emodel, perm] = prepare_model_for_engine(model->model, engine);
    EngineConfig cfg;
    cfg.engine = engine;
    cfg.params.beta = params->beta;
    cfg.params.tau_scale = params->tau_scale;
    cfg.params.exp_kind = exp_kind;
    cfg.seed = params->seed;
    cfg.workers = params->workers;
    if (params->n_stats_widths > ISING_MAX_STATS_WIDTHS) {
        throw Error("too many stats widths (max " + std::to_string(ISING_MAX_STATS_WIDTHS) + ")");
    }
    cfg.stats_widths.assign(params->stats_widths, params->stats_widths + params->n_stats_widths);

    SweepState state = init_state(emodel, cfg);
    run_sweeps(state, emodel, params->sweeps);

    RunOutcome out{};
    out.report.final_cost = total_cost(emodel, std::span<const float>(state.spins));
    out.report.flip_rate = state.stats.flip_rate();
    out.report.flips = state.stats.flips;
    out.report.attempts = state.stats.attempts;
    out.report.checksum = state_checksum(state.spins, &perm);
    out.report.n_wait = 0;
    const auto waits = collect_wait_stats(state.stats, cfg.stats_widths);
    for (const auto& [w, p] : waits) {
        out.report.wait_width[out.report.n_wait] = w;
        out.report.wait_probability[out.report.n_wait] = p;
        ++out.report.n_wait;
    }
    out.engine = engine_name(engine);
    out.exp = exp_kind_name(exp_kind);
    out.sweeps = params->sweeps;
    out.beta = params->beta;
    out.tau_scale = params->tau_scale;
    out.seed = params->seed;
    out.workers = params->workers;
    return out;
}

}  // namespace

extern "C" {

const char* ising_last_error(void) { return g_last_error.c_str(); }

void ising_string_free(char* s) { delete[] s; }

ising_status ising_model_load(const char* path, ising_model** out) {
    return guarded([&]() {
        if (path == nullptr || out == nullptr) throw Error("null argument");
        auto* handle = new ising_model{load_model(path)};
        *out = handle;
        return ISING_OK;
    });
}

ising_status ising_model_save(const ising_model* model, const char* path) {
    return guarded([&]() {
        if (model == nullptr || path == nullptr) throw Error("null argument");
        save_model(model->model, path);
        return ISING_OK;
    });
}

ising_status ising_model_from_string(const char* text, ising_model** out) {
    return guarded([&]() {
        if (text == nullptr || out == nullptr) throw Error("null argument");
        *out = new ising_model{model_from_string(text)};
        return ISING_OK;
    });
}

ising_status ising_model_to_string(const ising_model* model, char** out) {
    return guarded([&]() {
        if (model == nullptr || out == nullptr) throw Error("null argument");
        *out = dup_string(model_to_string(model->model));
        return *out != nullptr ? ISING_OK : ISING_ERR_INTERNAL;
    });
}

void ising_model_free(ising_model* model) { delete model; }

uint32_t ising_model_spins(const ising_model* model) {
    return model != nullptr ? model->model.n_spins : 0;
}

int ising_model_layers(const ising_model* model, uint32_t* layers, uint32_t* per_layer) {
    if (model == nullptr || !model->model.layered) return 0;
    if (layers != nullptr) *layers = model->model.layered->layers;
    if (per_layer != nullptr) *per_layer = model->model.layered->per_layer;
    return 1;
}

ising_status ising_model_cost(const ising_model* model, const int8_t* spins, uint32_t n,
                              double* cost) {
    return guarded([&]() {
        if (model == nullptr || spins == nullptr || cost == nullptr) throw Error("null argument");
        *cost = total_cost(model->model, std::span<const int8_t>(spins, n));
        return ISING_OK;
    });
}

ising_status ising_model_generate(const ising_generate_spec* spec, ising_model** out) {
    return guarded([&]() {
        if (spec == nullptr || out == nullptr) throw Error("null argument");
        GenerateSpec g;
        g.layers = spec->layers;
        g.per_layer = spec->per_layer;
        g.space_degree_min = spec->space_degree_min;
        g.space_degree_max = spec->space_degree_max;
        g.couplings = spec->couplings_uniform ? CouplingDist::uniform : CouplingDist::pm1;
        g.j_tau = spec->j_tau;
        g.seed = spec->seed;
        g.allow_tau_ring = spec->allow_tau_ring != 0;
        *out = new ising_model{generate_model(g)};
        return ISING_OK;
    });
}

ising_status ising_run(const ising_model* model, const ising_run_params* params,
                       ising_run_report* out) {
    return guarded([&]() {
        if (out == nullptr) throw Error("null argument");
        *out = do_run(model, params).report;
        return ISING_OK;
    });
}

ising_status ising_run_json(const ising_model* model, const ising_run_params* params,
                            ising_run_report* out_report, char** out_json) {
    return guarded([&]() {
        if (out_json == nullptr) throw Error("null argument");
        const RunOutcome outcome = do_run(model, params);
        if (out_report != nullptr) *out_report = outcome.report;
        nlohmann::json j;
        j["engine"] = outcome.engine;
        j["exp"] = outcome.exp;
        j["spins"] = ising_model_spins(model);
        j["sweeps"] = outcome.sweeps;
        j["beta"] = outcome.beta;
        j["tau_scale"] = outcome.tau_scale;
        j["seed"] = outcome.seed;
        j["workers"] = outcome.workers;
        j["final_cost"] = outcome.report.final_cost;
        j["flip_rate"] = outcome.report.flip_rate;
        j["flips"] = outcome.report.flips;
        j["attempts"] = outcome.report.attempts;
        nlohmann::json wait = nlohmann::json::object();
        for (uint32_t i = 0; i < outcome.report.n_wait; ++i) {
            wait[std::to_string(outcome.report.wait_width[i])] = outcome.report.wait_probability[i];
        }
        j["wait"] = wait;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(outcome.report.checksum));
        j["checksum"] = buf;
        j["environment"] = environment_descriptor();
        *out_json = dup_string(j.dump(2));
        return *out_json != nullptr ? ISING_OK : ISING_ERR_INTERNAL;
    });
}

ising_status ising_bench_run(const ising_model* model, const ising_bench_params* params,
                             ising_bench_report** out) {
    return guarded([&]() {
        if (model == nullptr || params == nullptr || out == nullptr) throw Error("null argument");
        BenchConfig cfg;
        cfg.engines.clear();
        for (uint32_t i = 0; i < params->n_engines; ++i) {
            cfg.engines.push_back(to_engine(params->engines[i]));
        }
        cfg.sweeps = params->sweeps;
        cfg.repetitions = params->repetitions;
        cfg.betas.assign(params->betas, params->betas + params->n_betas);
        cfg.tau_scale = params->tau_scale;
        if (params->exp_kind != ISING_EXP_ENGINE_DEFAULT) {
            cfg.exp_kind = to_exp_kind(params->exp_kind, EngineKind::reference);
        }
        cfg.seed = params->seed;
        cfg.workers = params->workers;
        *out = new ising_bench_report{run_benchmark(model->model, cfg)};
        return ISING_OK;
    });
}

ising_status ising_bench_report_csv(const ising_bench_report* report, char** out) {
    return guarded([&]() {
        if (report == nullptr || out == nullptr) throw Error("null argument");
        *out = dup_string(report_to_csv(report->report));
        return *out != nullptr ? ISING_OK : ISING_ERR_INTERNAL;
    });
}

ising_status ising_bench_report_json(const ising_bench_report* report, char** out) {
    return guarded([&]() {
        if (report == nullptr || out == nullptr) throw Error("null argument");
        *out = dup_string(report_to_json(report->report));
        return *out != nullptr ? ISING_OK : ISING_ERR_INTERNAL;
    });
}

void ising_bench_report_free(ising_bench_report* report) { delete report; }

ising_status ising_bench_exp(double* fast_ns, double* libm_ns, double* speedup) {
    return guarded([&]() {
        const ExpBenchResult r = bench_exp_fast();
        if (fast_ns != nullptr) *fast_ns = r.fast_ns_per_call;
        if (libm_ns != nullptr) *libm_ns = r.libm_ns_per_call;
        if (speedup != nullptr) *speedup = r.speedup;
        return ISING_OK;
    });
}

ising_status ising_validate(const char* suite, int* failures, char** out_json) {
    return guarded([&]() {
        if (suite == nullptr || failures == nullptr) throw Error("null argument");
        const SuiteReport report = run_validation_suite(suite);
        *failures = report.failures;
        if (out_json != nullptr) {
            *out_json = dup_string(suite_report_json(report));
            if (*out_json == nullptr) return ISING_ERR_INTERNAL;
        }
        return ISING_OK;
    });
}

ising_status ising_exp_scan(int variant, double lo, double hi, long long samples,
                            const char* csv_path, long long csv_max_rows,
                            ising_exp_scan_summary* out) {
    return guarded([&]() {
        if (variant != 0 && variant != 1) throw Error("variant must be 0 (fast) or 1 (accurate)");
        const ErrorScanReport r =
            error_scan_csv(variant == 0 ? ExpVariant::fast : ExpVariant::accurate, lo, hi, samples,
                           csv_path, csv_max_rows);
        if (out != nullptr) {
            out->lo = r.lo;
            out->hi = r.hi;
            out->samples = r.samples;
            out->min_rel = r.min_rel;
            out->max_rel = r.max_rel;
            out->mean_rel = r.mean_rel;
        }
        return ISING_OK;
    });
}

}  // extern "C"
