#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isingmc/model.hpp"
#include "isingmc/sweep.hpp"

namespace isingmc {

/// Exact Boltzmann distribution of a small model, by full enumeration.
/// State index encodes spins bitwise: bit i set means s_i = +1.
struct ExactDistribution {
    double beta = 0.0;
    uint32_t n_spins = 0;
    double mean_cost = 0.0;
    double mean_magnetization = 0.0;  // mean of (sum_i s_i) / n
    double log_partition = 0.0;
    std::vector<double> probabilities;  // 2^n entries
};

/// P(state) proportional to exp(-beta * total_cost(state)), accumulated in
/// extended precision around the minimum cost so large beta cannot underflow.
/// Rejects models with more than 24 spins.
ExactDistribution enumerate_boltzmann(const SpinModel& model, double beta);

struct ChainStatsConfig {
    EngineKind engine = EngineKind::basic;
    SweepParams params;
    uint64_t sweeps = 100000;
    uint64_t burn_in = 10000;
    uint32_t replicates = 12;
    uint32_t base_seed = 1;
    uint32_t workers = 1;
    double z_threshold = 4.0;
};

struct ChainStatsReport {
    double exact_cost = 0.0;
    double exact_magnetization = 0.0;
    double est_cost = 0.0;
    double est_magnetization = 0.0;
    double se_cost = 0.0;
    double se_magnetization = 0.0;
    double z_cost = 0.0;
    double z_magnetization = 0.0;
    bool pass = false;
};

/// Runs `replicates` independent chains of the engine on an enumerable
/// identity-ordered model and compares time-averaged cost and magnetization
/// against enumerate_boltzmann. Standard errors come from the spread of the
/// replicate means (batch means over independent replicates); pass means both
/// observables land within z_threshold standard errors.
ChainStatsReport chain_statistics_test(const SpinModel& model, const ChainStatsConfig& cfg);

struct EngineRun {
    EngineKind engine = EngineKind::basic;
    SweepParams params;
    uint32_t seed = 1;
    uint32_t workers = 1;
    bool vector4_group_updates = true;
};

struct TrajectoryResult {
    bool equal = true;
    uint64_t first_divergence_sweep = 0;  // 0-based, valid when !equal
    uint32_t first_divergence_spin = 0;
};

/// Runs both configurations side by side on the same (already engine-ordered)
/// model from identical initial spins and compares the full spin state after
/// every sweep. Configurations must agree on the model ordering; an engine
/// that cannot run on the given ordering is rejected by init_state.
TrajectoryResult trajectory_equivalence(const SpinModel& model, const EngineRun& a,
                                        const EngineRun& b, uint64_t sweeps);

}  // namespace isingmc
