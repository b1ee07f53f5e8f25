#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "isingmc/model.hpp"
#include "isingmc/rng.hpp"

namespace isingmc {

enum class ExpKind : uint8_t { exact, fast, accurate };
enum class EngineKind : uint8_t { reference, basic, vector4, coalesced };

const char* exp_kind_name(ExpKind k);
const char* engine_name(EngineKind e);

/// Run default when none is requested: the approximation enters with the
/// basic optimizations, the reference engine stays on the library exponential.
ExpKind default_exp_kind(EngineKind e);

struct SweepParams {
    float beta = 1.0f;       // inverse temperature
    float tau_scale = 1.0f;  // multiplier on the tau field inside the flip exponent
    ExpKind exp_kind = ExpKind::exact;
};

struct GroupCounter {
    uint64_t groups = 0;
    uint64_t with_flip = 0;
};

/// Attempt/flip counters plus, per recorded width W, how many W-wide groups
/// of consecutively-processed spins contained at least one flip.
struct FlipStats {
    uint64_t attempts = 0;
    uint64_t flips = 0;
    std::map<uint32_t, GroupCounter> group_wait;

    double flip_rate() const { return attempts ? double(flips) / double(attempts) : 0.0; }
};

/// (groups with >=1 flip) / (groups processed) for each requested width.
/// Width 1 equals the raw flip rate. Throws for widths that were not recorded.
std::map<uint32_t, double> collect_wait_stats(const FlipStats& stats,
                                              std::span<const uint32_t> widths);

/// Folds one sweep's flip flags (processing order) into the per-width group
/// counters; every width must divide the flag count.
void accumulate_group_flags(FlipStats& stats, std::span<const uint8_t> flags,
                            std::span<const uint32_t> widths);

struct EngineConfig {
    EngineKind engine = EngineKind::basic;
    SweepParams params;
    uint32_t seed = 1;                     // RNG lane k is seeded seed + k
    std::vector<uint32_t> stats_widths;    // group widths; each must divide n_spins
    uint32_t workers = 1;                  // coalesced schedule lanes per phase step
    bool vector4_group_updates = true;     // vector4: masked quadruplet stores vs per-lane
};

/// Flat edge arrays shared by the optimized engines: per-spin slices of
/// (target, J) with the per-spin tau edges in the final tau_count slots.
struct FlatEdges {
    std::vector<uint32_t> offsets;  // n_spins + 1
    std::vector<uint32_t> targets;
    std::vector<float> couplings;
    std::vector<uint8_t> tau_counts;
};

/// The unoptimized tier's view of the graph: a global undirected edge table
/// with endpoint pairs, couplings and the tau classification held in separate
/// arrays, reached through per-spin incident-edge index lists.
struct LegacyGraph {
    std::vector<uint32_t> endpoints;        // 2 per edge
    std::vector<float> couplings;           // per edge
    std::vector<uint8_t> is_tau_edge;       // per edge
    std::vector<uint32_t> incident_offsets; // n_spins + 1
    std::vector<uint32_t> incident_edges;   // edge indices
};

struct SweepState {
    EngineKind engine = EngineKind::basic;
    SweepParams params;
    uint32_t seed = 1;
    uint32_t workers = 1;
    bool vector4_group_updates = true;

    uint32_t n_spins = 0;
    std::vector<float> spins;        // +/-1.0f
    std::vector<float> h_eff_space;  // h_i + sum over space edges of J*s
    std::vector<float> h_eff_tau;    // sum over tau edges of J*s

    FlatEdges flat;
    LegacyGraph legacy;  // reference engine only
    LayeredMeta meta;    // engines needing layout info (vector4/coalesced)

    std::unique_ptr<Mt19937> scalar_rng;
    std::unique_ptr<InterlacedMt> lane_rng;
    std::vector<uint32_t> raw_batch;
    std::vector<float> uniform_batch;
    size_t batch_pos = 0;
    size_t batch_end = 0;

    FlipStats stats;
    std::vector<uint32_t> stats_widths;
    bool record_flags = false;
    std::vector<uint8_t> flip_flags;
    std::vector<uint64_t> worker_flips;  // coalesced per-worker counters

    /// Uniform draws consumed so far; exact at sweep boundaries.
    uint64_t uniforms_consumed() const;
};

/// The seed-derived random initial state used by init_state when no explicit
/// spins are given; drawn from a generator kept apart from the sweep stream.
std::vector<int8_t> initial_spins(uint32_t n_spins, uint32_t seed);

/// Builds engine state: flattened edges, effective fields from scratch, RNG
/// lanes seeded seed+lane. Initial spins are taken from `initial` when given,
/// otherwise drawn from a separate generator derived from the seed.
/// Validates that the model ordering matches the engine.
SweepState init_state(const SpinModel& model, const EngineConfig& cfg);
SweepState init_state(const SpinModel& model, const EngineConfig& cfg,
                      std::span<const int8_t> initial);

/// From-scratch effective-field sums (space, tau); the coherence oracle for
/// the incremental updates done by the engines.
std::pair<std::vector<float>, std::vector<float>> recompute_fields(
    const SpinModel& model, std::span<const float> spins);

/// min(1, exp_kind(-beta * dE)) with dE = 2 s_i (h_eff_space + tau_scale * h_eff_tau).
float flip_probability(const SweepState& state, uint32_t spin);

// One Metropolis sweep per call. All engines visit every spin once, draw one
// uniform per spin, and update neighbour fields incrementally on flips.
void sweep_reference(SweepState& state, const SpinModel& model);
void sweep_basic(SweepState& state, const SpinModel& model);
void sweep_vector4(SweepState& state, const SpinModel& model, bool lane_parallel_updates);
void sweep_coalesced(SweepState& state, const SpinModel& model, uint32_t workers);

/// Runs `sweeps` sweeps on the state's configured engine; coalesced states
/// with workers > 1 reuse one worker pool across all sweeps.
void run_sweeps(SweepState& state, const SpinModel& model, uint64_t sweeps);

/// Reorders (for the scalar engines) or permutes (vector4/coalesced) an
/// identity-ordered model into the layout the engine requires; the returned
/// permutation maps original indices to engine indices.
std::pair<SpinModel, SpinPermutation> prepare_model_for_engine(const SpinModel& model,
                                                               EngineKind engine);

/// FNV-1a over the sign sequence in original spin order (perm maps original
/// to engine order; pass nullptr when the state is in original order).
uint64_t state_checksum(std::span<const float> spins, const SpinPermutation* perm = nullptr);

/// Largest bit-level ULP distance between stored fields and a from-scratch
/// recomputation, across both arrays and all spins.
uint64_t field_coherence_ulp(const SweepState& state, const SpinModel& model);

int64_t ulp_distance(float a, float b);

}  // namespace isingmc
