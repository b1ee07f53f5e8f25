#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isingmc/model.hpp"
#include "isingmc/sweep.hpp"

namespace isingmc {

enum class CouplingDist : uint8_t { pm1, uniform };

/// Deterministic-for-seed layered model generator: a circulant base graph
/// raised to the requested space-degree band with seeded extra edges.
/// pm1 draws J in {-1,+1} and h in {-1,0,+1}; uniform draws both from (-1,1).
struct GenerateSpec {
    uint32_t layers = 64;
    uint32_t per_layer = 8;
    uint32_t space_degree_min = 4;
    uint32_t space_degree_max = 6;
    CouplingDist couplings = CouplingDist::pm1;
    float j_tau = 1.0f;
    uint32_t seed = 1;
    bool allow_tau_ring = false;  // permit per_layer == 1 (tau ring, degree 2)
};

SpinModel generate_model(const GenerateSpec& spec);

struct BenchConfig {
    std::vector<EngineKind> engines = {EngineKind::reference, EngineKind::basic,
                                       EngineKind::vector4};
    uint64_t sweeps = 1000;
    uint32_t repetitions = 10;
    std::vector<float> betas = {0.15f, 0.35f, 0.8f, 2.0f};  // one chain per value
    float tau_scale = 1.0f;
    std::optional<ExpKind> exp_kind;  // unset: per-engine default
    uint32_t seed = 1;
    uint32_t workers = 1;  // chains in flight; 1 pins everything to one worker
    std::vector<uint32_t> stats_widths = {1, 4, 32};
};

struct EngineBenchResult {
    EngineKind engine = EngineKind::reference;
    ExpKind exp_kind = ExpKind::exact;
    double mean_seconds = 0.0;
    double sd_seconds = 0.0;
    double spin_updates_per_sec = 0.0;
    double speedup_vs_reference = 1.0;
    double flip_rate = 0.0;
    std::map<uint32_t, double> wait;  // width -> wait probability
    uint64_t checksum = 0;            // final state, identical across repetitions
    std::vector<double> rep_seconds;
    std::vector<double> per_beta_flip_rate;
};

struct BenchReport {
    uint32_t spins = 0;
    uint64_t sweeps = 0;
    uint32_t repetitions = 0;
    std::vector<float> betas;
    std::string beta_ladder_origin = "synthetic";
    std::string environment;
    std::vector<std::string> warnings;
    std::vector<EngineBenchResult> engines;
};

/// Times every engine over the beta ladder: one untimed warmup repetition
/// per engine gathers flip/wait statistics, then `repetitions` timed runs
/// re-seeded identically. Ratios are taken against the reference engine when
/// present, otherwise against the first engine listed. If the timer cannot
/// resolve 1% of a repetition the sweep count is raised and a warning noted.
BenchReport run_benchmark(const SpinModel& model, const BenchConfig& config);

/// CSV columns: engine, spins, sweeps, reps, mean_seconds, sd_seconds,
/// spin_updates_per_sec, speedup_vs_reference, flip_rate, wait_w4, wait_w32.
/// The environment descriptor follows as '#'-prefixed trailer lines.
std::string report_to_csv(const BenchReport& report);
std::string report_to_json(const BenchReport& report);
void write_report(const BenchReport& report, const std::string& path, bool as_json);

/// Wall-clock descriptor attached to every report (host, build, compiler).
std::string environment_descriptor();

struct ExpBenchResult {
    double fast_ns_per_call = 0.0;
    double libm_ns_per_call = 0.0;
    double speedup = 0.0;
};

/// Microbenchmark of exp_fast against the library float exponential over a
/// Metropolis-typical argument range.
ExpBenchResult bench_exp_fast(uint32_t n_values = 1u << 22, uint32_t repetitions = 5);

}  // namespace isingmc
