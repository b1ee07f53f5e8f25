#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "sweep_kernels.hpp"

namespace isingmc {

const char* exp_kind_name(ExpKind k) {
    switch (k) {
        case ExpKind::exact: return "exact";
        case ExpKind::fast: return "fast";
        case ExpKind::accurate: return "accurate";
    }
    return "?";
}

const char* engine_name(EngineKind e) {
    switch (e) {
        case EngineKind::reference: return "reference";
        case EngineKind::basic: return "basic";
        case EngineKind::vector4: return "vector4";
        case EngineKind::coalesced: return "coalesced";
    }
    return "?";
}

ExpKind default_exp_kind(EngineKind e) {
    return e == EngineKind::reference ? ExpKind::exact : ExpKind::fast;
}

std::map<uint32_t, double> collect_wait_stats(const FlipStats& stats,
                                              std::span<const uint32_t> widths) {
    std::map<uint32_t, double> out;
    for (uint32_t w : widths) {
        const auto it = stats.group_wait.find(w);
        if (it == stats.group_wait.end()) {
            throw Error("collect_wait_stats: width " + std::to_string(w) + " was not recorded");
        }
        out[w] = it->second.groups ? double(it->second.with_flip) / double(it->second.groups) : 0.0;
    }
    return out;
}

namespace {

constexpr uint32_t kInitSpinSeedMix = 0x9E3779B9u;  // keeps the init draw off the sweep stream

LegacyGraph build_legacy_graph(const SpinModel& model) {
    LegacyGraph g;
    // Global edge ids in (i, j) discovery order with endpoints stored
    // (smaller, larger), so roughly half the incident lookups of any spin
    // find it in slot 0 and half in slot 1.
    std::vector<std::vector<uint32_t>> incident(model.n_spins);
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        const SpinEdgeList& list = model.adjacency[i];
        for (size_t k = 0; k < list.edges.size(); ++k) {
            const EdgeRecord& e = list.edges[k];
            if (e.target_spin < i) continue;
            const uint32_t edge_id = static_cast<uint32_t>(g.couplings.size());
            g.endpoints.push_back(i);
            g.endpoints.push_back(e.target_spin);
            g.couplings.push_back(e.coupling);
            g.is_tau_edge.push_back(k >= list.edges.size() - list.tau_count ? 1 : 0);
            incident[i].push_back(edge_id);
            incident[e.target_spin].push_back(edge_id);
        }
    }
    g.incident_offsets.resize(model.n_spins + 1);
    uint32_t total = 0;
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        g.incident_offsets[i] = total;
        total += static_cast<uint32_t>(incident[i].size());
    }
    g.incident_offsets[model.n_spins] = total;
    g.incident_edges.reserve(total);
    for (const auto& list : incident) {
        g.incident_edges.insert(g.incident_edges.end(), list.begin(), list.end());
    }
    return g;
}

FlatEdges flatten(const SpinModel& model) {
    FlatEdges flat;
    flat.offsets.resize(model.n_spins + 1);
    flat.tau_counts.resize(model.n_spins);
    uint64_t total = 0;
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        flat.offsets[i] = static_cast<uint32_t>(total);
        total += model.adjacency[i].edges.size();
        flat.tau_counts[i] = static_cast<uint8_t>(model.adjacency[i].tau_count);
    }
    flat.offsets[model.n_spins] = static_cast<uint32_t>(total);
    flat.targets.resize(total);
    flat.couplings.resize(total);
    size_t k = 0;
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        for (const EdgeRecord& e : model.adjacency[i].edges) {
            flat.targets[k] = e.target_spin;
            flat.couplings[k] = e.coupling;
            ++k;
        }
    }
    return flat;
}

void check_engine_model(const SpinModel& model, const EngineConfig& cfg) {
    switch (cfg.engine) {
        case EngineKind::reference:
        case EngineKind::basic:
            break;
        case EngineKind::vector4: {
            if (!model.layered || model.layered->ordering != Ordering::vector4) {
                throw Error("init_state: vector4 engine needs a vector4-ordered model");
            }
            validate_vector4_layout(model);
            break;
        }
        case EngineKind::coalesced: {
            if (!model.layered || model.layered->ordering != Ordering::coalesce) {
                throw Error("init_state: coalesced engine needs a coalesce-ordered model");
            }
            const uint32_t W = model.layered->lane_width;
            if (cfg.workers < 1 || cfg.workers > W) {
                throw Error("init_state: coalesced workers must be in [1, " + std::to_string(W) + "]");
            }
            // The two-phase schedule addresses tau neighbours by slot:
            // slot degree-2 is the next layer, slot degree-1 the previous one.
            const uint32_t P = model.layered->per_layer;
            for (uint32_t i = 0; i < model.n_spins; ++i) {
                const SpinEdgeList& list = model.adjacency[i];
                if (list.tau_count != 2) throw Error("init_state: coalesced model needs 2 tau edges per spin");
                const bool odd = i >= W * P;
                const uint32_t p = (odd ? i - W * P : i) / W;
                const uint32_t t = i % W;
                const uint32_t up = odd ? W * p + (t + 1) % W : W * (P + p) + t;
                const uint32_t down = odd ? W * p + t : W * (P + p) + (t + W - 1) % W;
                const auto taus = list.tau_edges();
                if (taus[0].target_spin != up || taus[1].target_spin != down) {
                    throw Error("init_state: coalesced tau slots out of order at spin " +
                                std::to_string(i));
                }
            }
            break;
        }
    }
    if (!(cfg.params.beta >= 0.0f) || !std::isfinite(cfg.params.beta)) {
        throw Error("init_state: beta must be finite and >= 0");
    }
    if (!std::isfinite(cfg.params.tau_scale)) throw Error("init_state: tau_scale must be finite");
    for (uint32_t w : cfg.stats_widths) {
        if (w == 0 || model.n_spins % w != 0) {
            throw Error("init_state: stats width " + std::to_string(w) +
                        " must divide the spin count");
        }
    }
}

SweepState init_state_common(const SpinModel& model, const EngineConfig& cfg,
                             std::vector<float> spins) {
    check_engine_model(model, cfg);

    SweepState st;
    st.engine = cfg.engine;
    st.params = cfg.params;
    st.seed = cfg.seed;
    st.workers = cfg.workers;
    st.vector4_group_updates = cfg.vector4_group_updates;
    st.n_spins = model.n_spins;
    st.spins = std::move(spins);
    st.flat = flatten(model);
    if (model.layered) st.meta = *model.layered;

    auto fields = recompute_fields(model, st.spins);
    st.h_eff_space = std::move(fields.first);
    st.h_eff_tau = std::move(fields.second);

    switch (cfg.engine) {
        case EngineKind::reference:
            st.scalar_rng = std::make_unique<Mt19937>(cfg.seed, TwistImpl::plain);
            st.legacy = build_legacy_graph(model);
            break;
        case EngineKind::basic:
            st.scalar_rng = std::make_unique<Mt19937>(cfg.seed);
            st.raw_batch.resize(kMtStateSize);
            st.uniform_batch.resize(kMtStateSize);
            break;
        case EngineKind::vector4:
            st.lane_rng = std::make_unique<InterlacedMt>(InterlacedMt::with_base_seed(cfg.seed, 4));
            st.uniform_batch.resize(size_t(kMtStateSize) * 4);
            break;
        case EngineKind::coalesced: {
            const uint32_t W = st.meta.lane_width;
            st.lane_rng = std::make_unique<InterlacedMt>(InterlacedMt::with_base_seed(cfg.seed, W));
            st.uniform_batch.resize(model.n_spins);
            st.worker_flips.assign(std::max(1u, cfg.workers), 0);
            break;
        }
    }

    st.stats_widths = cfg.stats_widths;
    std::sort(st.stats_widths.begin(), st.stats_widths.end());
    st.record_flags = !st.stats_widths.empty() || cfg.engine == EngineKind::coalesced;
    if (st.record_flags) st.flip_flags.assign(model.n_spins, 0);
    return st;
}

}  // namespace

std::vector<int8_t> initial_spins(uint32_t n_spins, uint32_t seed) {
    Mt19937 init_rng(seed ^ kInitSpinSeedMix);
    std::vector<int8_t> spins(n_spins);
    for (int8_t& s : spins) s = (init_rng.next_u32() >> 31) ? -1 : 1;
    return spins;
}

SweepState init_state(const SpinModel& model, const EngineConfig& cfg) {
    const std::vector<int8_t> signs = initial_spins(model.n_spins, cfg.seed);
    std::vector<float> spins(model.n_spins);
    for (uint32_t i = 0; i < model.n_spins; ++i) spins[i] = float(signs[i]);
    return init_state_common(model, cfg, std::move(spins));
}

SweepState init_state(const SpinModel& model, const EngineConfig& cfg,
                      std::span<const int8_t> initial) {
    if (initial.size() != model.n_spins) throw Error("init_state: initial spin count mismatch");
    std::vector<float> spins(model.n_spins);
    for (size_t i = 0; i < initial.size(); ++i) {
        if (initial[i] != 1 && initial[i] != -1) throw Error("init_state: spins must be +/-1");
        spins[i] = float(initial[i]);
    }
    return init_state_common(model, cfg, std::move(spins));
}

std::pair<std::vector<float>, std::vector<float>> recompute_fields(
    const SpinModel& model, std::span<const float> spins) {
    if (spins.size() != model.n_spins) throw Error("recompute_fields: spin count mismatch");
    std::vector<float> hs(model.n_spins);
    std::vector<float> ht(model.n_spins, 0.0f);
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        const SpinEdgeList& list = model.adjacency[i];
        float space_sum = model.h[i];
        for (const EdgeRecord& e : list.space_edges()) {
            space_sum += e.coupling * spins[e.target_spin];
        }
        float tau_sum = 0.0f;
        for (const EdgeRecord& e : list.tau_edges()) {
            tau_sum += e.coupling * spins[e.target_spin];
        }
        hs[i] = space_sum;
        ht[i] = tau_sum;
    }
    return {std::move(hs), std::move(ht)};
}

float flip_probability(const SweepState& state, uint32_t spin) {
    if (spin >= state.n_spins) throw Error("flip_probability: spin out of range");
    const float x = detail::flip_exponent(state.params.beta, state.params.tau_scale,
                                          state.spins[spin], state.h_eff_space[spin],
                                          state.h_eff_tau[spin]);
    return std::min(1.0f, detail::eval_exp_dyn(state.params.exp_kind, x));
}

uint64_t SweepState::uniforms_consumed() const {
    const uint64_t pending = batch_end - batch_pos;
    if (scalar_rng) return scalar_rng->generated() - pending;
    if (lane_rng) return lane_rng->blocks_generated() * lane_rng->lanes() - pending;
    return 0;
}

void run_sweeps(SweepState& state, const SpinModel& model, uint64_t sweeps) {
    switch (state.engine) {
        case EngineKind::reference:
            for (uint64_t s = 0; s < sweeps; ++s) sweep_reference(state, model);
            break;
        case EngineKind::basic:
            for (uint64_t s = 0; s < sweeps; ++s) sweep_basic(state, model);
            break;
        case EngineKind::vector4:
            for (uint64_t s = 0; s < sweeps; ++s) {
                sweep_vector4(state, model, state.vector4_group_updates);
            }
            break;
        case EngineKind::coalesced: {
            void run_sweeps_coalesced(SweepState&, const SpinModel&, uint64_t, uint32_t);
            run_sweeps_coalesced(state, model, sweeps, state.workers);
            break;
        }
    }
}

std::pair<SpinModel, SpinPermutation> prepare_model_for_engine(const SpinModel& model,
                                                               EngineKind engine) {
    if (model.layered && model.layered->ordering != Ordering::identity) {
        throw Error("prepare_model_for_engine: expects an identity-ordered model");
    }
    SpinPermutation identity;
    identity.forward.resize(model.n_spins);
    identity.inverse.resize(model.n_spins);
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        identity.forward[i] = i;
        identity.inverse[i] = i;
    }
    switch (engine) {
        case EngineKind::reference:
        case EngineKind::basic:
            return {model, std::move(identity)};
        case EngineKind::vector4: {
            SpinPermutation perm = vector4_permutation(model);
            return {apply_permutation(model, perm), std::move(perm)};
        }
        case EngineKind::coalesced: {
            if (!model.layered) throw Error("prepare_model_for_engine: coalesced needs a layered model");
            if (model.layered->layers % 2 != 0) {
                throw Error("prepare_model_for_engine: coalesced needs an even layer count");
            }
            SpinPermutation perm = coalesce_permutation(model, model.layered->layers / 2);
            return {apply_permutation(model, perm), std::move(perm)};
        }
    }
    throw Error("prepare_model_for_engine: unknown engine");
}

uint64_t state_checksum(std::span<const float> spins, const SpinPermutation* perm) {
    uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](uint8_t b) {
        h ^= b;
        h *= 1099511628211ull;
    };
    for (size_t i = 0; i < spins.size(); ++i) {
        const size_t at = perm ? perm->forward[i] : i;
        mix(spins[at] > 0.0f ? 1 : 0);
    }
    return h;
}

int64_t ulp_distance(float a, float b) {
    const auto key = [](float v) {
        const int32_t bits = std::bit_cast<int32_t>(v);
        return bits < 0 ? int64_t(0x80000000ll) - bits : int64_t(bits);
    };
    return key(a) >= key(b) ? key(a) - key(b) : key(b) - key(a);
}

uint64_t field_coherence_ulp(const SweepState& state, const SpinModel& model) {
    const auto fields = recompute_fields(model, state.spins);
    uint64_t worst = 0;
    for (uint32_t i = 0; i < state.n_spins; ++i) {
        worst = std::max<uint64_t>(worst, ulp_distance(state.h_eff_space[i], fields.first[i]));
        worst = std::max<uint64_t>(worst, ulp_distance(state.h_eff_tau[i], fields.second[i]));
    }
    return worst;
}

void accumulate_group_flags(FlipStats& stats, std::span<const uint8_t> flags,
                            std::span<const uint32_t> widths) {
    const size_t n = flags.size();
    for (uint32_t w : widths) {
        if (w == 0 || n % w != 0) {
            throw Error("accumulate_group_flags: width " + std::to_string(w) +
                        " must divide the flag count");
        }
        GroupCounter& c = stats.group_wait[w];
        for (size_t g = 0; g < n; g += w) {
            uint8_t any = 0;
            for (size_t i = g; i < g + w; ++i) any |= flags[i];
            ++c.groups;
            c.with_flip += any;
        }
    }
}

namespace detail {

void refill_scalar_batch(SweepState& st) {
    st.scalar_rng->fill(st.raw_batch);
    // Plain per-value conversion: the basic tier only gets what the compiler
    // makes of ordinary code; the fused wide conversion stays with the
    // interlaced engines.
    for (size_t i = 0; i < st.raw_batch.size(); ++i) {
        st.uniform_batch[i] = u32_to_unit(st.raw_batch[i]);
    }
    st.batch_pos = 0;
    st.batch_end = st.uniform_batch.size();
}

void accumulate_group_stats(SweepState& st) {
    if (st.stats_widths.empty()) {
        if (!st.flip_flags.empty() && st.engine == EngineKind::coalesced) {
            std::fill(st.flip_flags.begin(), st.flip_flags.end(), 0);
        }
        return;
    }
    accumulate_group_flags(st.stats, st.flip_flags, st.stats_widths);
    std::fill(st.flip_flags.begin(), st.flip_flags.end(), 0);
}

}  // namespace detail

}  // namespace isingmc
