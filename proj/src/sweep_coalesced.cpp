#include <barrier>
#include <thread>

#include "sweep_kernels.hpp"

namespace isingmc {

namespace {

// W-way interlaced schedule mirroring a warp per model: lane t owns layers
// 2t (even region, new indices [0, W*P)) and 2t+1 (odd region). Each sweep
// runs four phases with a barrier between them:
//   1. even-layer flips, updating space edges and the tau edge to the layer
//      below (the previous lane's odd layer),
//   2. deferred tau updates from even flips to the layer above (own odd layer),
//   3. odd-layer flips, updating space edges and the tau edge below (own even
//      layer),
//   4. deferred tau updates from odd flips to the layer above (next lane's
//      even layer).
// Within any phase every lane writes only locations no other lane touches, so
// the result is bit-identical for every worker count. Tau edge slots are
// [degree-2] = next layer, [degree-1] = previous layer (checked at init).

struct Ranges {
    uint32_t begin;
    uint32_t end;
};

Ranges lane_range(uint32_t lanes, uint32_t workers, uint32_t worker) {
    const uint32_t base = lanes / workers;
    const uint32_t extra = lanes % workers;
    const uint32_t begin = worker * base + std::min(worker, extra);
    return {begin, begin + base + (worker < extra ? 1 : 0)};
}

void pregen_uniforms(SweepState& st) {
    st.lane_rng->fill_unit_floats(st.uniform_batch);
    st.batch_pos = 0;
    st.batch_end = st.uniform_batch.size();
}

// Flip attempts over one region (even: base 0, odd: base W*P), lanes [t0,t1).
// Applies space updates plus the tau slot `immediate_slot_from_end` and flags
// flipped spins so the deferred pass can finish the other tau edge.
void flip_phase(SweepState& st, uint32_t region_base, uint32_t t0, uint32_t t1,
                uint64_t& flips) {
    const uint32_t W = st.meta.lane_width;
    const uint32_t P = st.meta.per_layer;
    const float beta = st.params.beta;
    const float gamma = st.params.tau_scale;
    const ExpKind kind = st.params.exp_kind;
    float* spins = st.spins.data();
    float* h_space = st.h_eff_space.data();
    float* h_tau = st.h_eff_tau.data();
    const uint32_t* offsets = st.flat.offsets.data();
    const uint32_t* targets = st.flat.targets.data();
    const float* couplings = st.flat.couplings.data();

    for (uint32_t p = 0; p < P; ++p) {
        for (uint32_t t = t0; t < t1; ++t) {
            const uint32_t i = region_base + W * p + t;
            const float u = st.uniform_batch[i];
            const float s = spins[i];
            const float x = detail::flip_exponent(beta, gamma, s, h_space[i], h_tau[i]);
            const float prob = detail::eval_exp_dyn(kind, x);
            if (u < prob) {
                const float two_s = 2.0f * s;
                const uint32_t end = offsets[i + 1];
                for (uint32_t e = offsets[i]; e < end - 2; ++e) {
                    h_space[targets[e]] -= two_s * couplings[e];
                }
                // tau edge to the previous layer; the next-layer edge waits
                h_tau[targets[end - 1]] -= two_s * couplings[end - 1];
                spins[i] = -s;
                st.flip_flags[i] = 1;
                ++flips;
            }
        }
    }
}

// Deferred pass: the tau edge toward the next layer for every spin flipped in
// the matching flip phase.
void deferred_tau_phase(SweepState& st, uint32_t region_base, uint32_t t0, uint32_t t1) {
    const uint32_t W = st.meta.lane_width;
    const uint32_t P = st.meta.per_layer;
    float* spins = st.spins.data();
    float* h_tau = st.h_eff_tau.data();
    const uint32_t* offsets = st.flat.offsets.data();
    const uint32_t* targets = st.flat.targets.data();
    const float* couplings = st.flat.couplings.data();

    for (uint32_t p = 0; p < P; ++p) {
        for (uint32_t t = t0; t < t1; ++t) {
            const uint32_t i = region_base + W * p + t;
            if (!st.flip_flags[i]) continue;
            const float two_s = -2.0f * spins[i];  // equals 2 * pre-flip spin
            const uint32_t up = offsets[i + 1] - 2;
            h_tau[targets[up]] -= two_s * couplings[up];
        }
    }
}

void finish_sweep(SweepState& st, uint64_t flips) {
    st.stats.flips += flips;
    st.stats.attempts += st.n_spins;
    st.batch_pos = st.batch_end;  // the whole per-sweep uniform buffer is consumed
    detail::accumulate_group_stats(st);
    if (st.stats_widths.empty()) {
        std::fill(st.flip_flags.begin(), st.flip_flags.end(), 0);
    }
}

void sweep_coalesced_sequential(SweepState& st) {
    const uint32_t W = st.meta.lane_width;
    const uint32_t odd_base = W * st.meta.per_layer;
    uint64_t flips = 0;
    pregen_uniforms(st);
    flip_phase(st, 0, 0, W, flips);
    deferred_tau_phase(st, 0, 0, W);
    flip_phase(st, odd_base, 0, W, flips);
    deferred_tau_phase(st, odd_base, 0, W);
    finish_sweep(st, flips);
}

void check_coalesced(const SweepState& st, const SpinModel& m, uint32_t workers) {
    if (st.engine != EngineKind::coalesced) {
        throw Error("sweep_coalesced: state built for another engine");
    }
    if (m.n_spins != st.n_spins) throw Error("sweep_coalesced: model/state size mismatch");
    if (workers < 1 || workers > st.meta.lane_width) {
        throw Error("sweep_coalesced: workers must be in [1, " +
                    std::to_string(st.meta.lane_width) + "]");
    }
}

}  // namespace

void run_sweeps_coalesced(SweepState& st, const SpinModel& m, uint64_t sweeps, uint32_t workers) {
    check_coalesced(st, m, workers);
    if (workers == 1) {
        for (uint64_t s = 0; s < sweeps; ++s) sweep_coalesced_sequential(st);
        return;
    }

    const uint32_t W = st.meta.lane_width;
    const uint32_t odd_base = W * st.meta.per_layer;
    st.worker_flips.assign(workers, 0);
    std::barrier sync(workers);

    const auto worker_loop = [&](uint32_t w) {
        const Ranges r = lane_range(W, workers, w);
        for (uint64_t s = 0; s < sweeps; ++s) {
            if (w == 0) pregen_uniforms(st);
            sync.arrive_and_wait();
            flip_phase(st, 0, r.begin, r.end, st.worker_flips[w]);
            sync.arrive_and_wait();
            deferred_tau_phase(st, 0, r.begin, r.end);
            sync.arrive_and_wait();
            flip_phase(st, odd_base, r.begin, r.end, st.worker_flips[w]);
            sync.arrive_and_wait();
            deferred_tau_phase(st, odd_base, r.begin, r.end);
            sync.arrive_and_wait();
            if (w == 0) {
                uint64_t flips = 0;
                for (uint64_t f : st.worker_flips) flips += f;
                std::fill(st.worker_flips.begin(), st.worker_flips.end(), 0);
                finish_sweep(st, flips);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (uint32_t w = 1; w < workers; ++w) pool.emplace_back(worker_loop, w);
    worker_loop(0);
    for (std::thread& t : pool) t.join();
}

void sweep_coalesced(SweepState& st, const SpinModel& m, uint32_t workers) {
    run_sweeps_coalesced(st, m, 1, workers);
}

}  // namespace isingmc
