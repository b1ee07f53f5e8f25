#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace isingmc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One directed half of an undirected coupling, stored with the spin it
/// belongs to: the adjacent spin's index and the J value.
struct EdgeRecord {
    uint32_t target_spin = 0;
    float coupling = 0.0f;
};

/// Per-spin adjacency. The last tau_count records are the tau (inter-layer)
/// edges; everything before them is a space edge. Canonical order is space
/// edges ascending by target, then tau to the next layer, then tau to the
/// previous layer.
struct SpinEdgeList {
    std::vector<EdgeRecord> edges;
    uint32_t tau_count = 0;

    uint32_t degree() const { return static_cast<uint32_t>(edges.size()); }
    std::span<const EdgeRecord> space_edges() const {
        return {edges.data(), edges.size() - tau_count};
    }
    std::span<const EdgeRecord> tau_edges() const {
        return {edges.data() + (edges.size() - tau_count), tau_count};
    }
};

enum class Ordering : uint8_t { identity, vector4, coalesce };

const char* ordering_name(Ordering o);

/// Present on models built as L identical layers ring-coupled along tau.
struct LayeredMeta {
    uint32_t layers = 0;     // L
    uint32_t per_layer = 0;  // P
    Ordering ordering = Ordering::identity;
    uint32_t lane_width = 0;  // W for coalesce, 0 otherwise
};

struct SpinModel {
    uint32_t n_spins = 0;
    std::vector<float> h;                  // local field per spin
    std::vector<SpinEdgeList> adjacency;   // one list per spin
    std::optional<LayeredMeta> layered;

    bool is_layered() const { return layered.has_value(); }
    uint64_t edge_count() const;  // undirected edges
};

/// Space-edge topology and fields of a single layer; replicated L times by
/// build_layered_model. Edges are undirected pairs listed once.
struct LayerEdge {
    uint32_t p = 0;
    uint32_t q = 0;
    float coupling = 0.0f;
};

struct LayerSpec {
    uint32_t positions = 0;
    std::vector<float> h;          // one per position
    std::vector<LayerEdge> edges;
};

/// Bijective spin relabeling; forward maps old index to new index.
struct SpinPermutation {
    std::vector<uint32_t> forward;
    std::vector<uint32_t> inverse;
    Ordering kind = Ordering::identity;
    uint32_t lane_width = 0;

    uint32_t size() const { return static_cast<uint32_t>(forward.size()); }
};

/// L identical copies of `layer`, tau edges of coupling j_tau between
/// corresponding positions of adjacent layers, wrapping layer L-1 back to 0.
/// Spin (l, p) gets index l*P + p; tau edges sit last in every edge list.
/// Rejects n_layers < 4 and malformed layer specs.
SpinModel build_layered_model(const LayerSpec& layer, uint32_t n_layers, float j_tau);

/// -sum_i h_i s_i - sum_edges J_ij s_i s_j, each undirected edge once.
/// Spins must be +/-1 and match the model size.
double total_cost(const SpinModel& model, std::span<const int8_t> spins);
double total_cost(const SpinModel& model, std::span<const float> spins);

/// Rebuilds every edge list with the 2 tau edges in the final slots, keeping
/// the relative order of space edges. Tau edges are identified from the
/// layered topology, so the model must be layered and identity-ordered.
/// Rejects spins that do not have exactly 2 tau edges.
SpinModel reorder_edges_tau_last(const SpinModel& model);

/// Splits the L layers into 4 sections and interlaces them:
/// new_index(l, p) = 4*((l mod L/4)*P + p) + floor(l / (L/4)).
/// Consecutive groups of 4 new indices ("quadruplets") then hold 4 spins with
/// no edges between them and no shared neighbours (requires L/4 >= 3).
/// Rejects models whose L is not a multiple of 4.
SpinPermutation vector4_permutation(const SpinModel& model);

/// Splits the model into W = L/2 groups of 2 layers and interlaces them:
/// new_index(l, p) = W*((l mod 2)*P + p) + floor(l/2); lane t owns layers
/// 2t and 2t+1. Rejects L != 2*lane_width.
SpinPermutation coalesce_permutation(const SpinModel& model, uint32_t lane_width);

/// Relabels spins: output spin i is input spin perm.inverse[i] with all edge
/// targets remapped. Order inside edge lists (and tau-last placement) is
/// preserved, so total cost is invariant under the matching state relabeling.
SpinModel apply_permutation(const SpinModel& model, const SpinPermutation& perm);

/// Structural checks: symmetric adjacency with matching couplings and
/// space/tau classification, no self edges, in-range targets, layered
/// metadata consistency (identical layers, 2 tau edges per spin).
/// Throws Error with a description of the first violation.
void validate_model(const SpinModel& model);

/// Exhaustive check of the quadruplet safety and tau-alignment properties a
/// vector4-ordered model must satisfy; throws Error on violation.
void validate_vector4_layout(const SpinModel& model);

bool models_equal(const SpinModel& a, const SpinModel& b);  // bit-exact compare

}  // namespace isingmc
