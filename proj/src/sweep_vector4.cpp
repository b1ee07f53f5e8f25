#include <bit>

#include "sweep_kernels.hpp"

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace isingmc {

namespace {

void refill_lane_batch(SweepState& st) {
    st.lane_rng->fill_unit_floats(st.uniform_batch);
    st.batch_pos = 0;
    st.batch_end = st.uniform_batch.size();
}

inline void scalar_update(const uint32_t* offsets, const uint32_t* targets,
                          const float* couplings, float* h_space, float* h_tau, uint32_t i,
                          float s_pre) {
    const float two_s = 2.0f * s_pre;
    const uint32_t end = offsets[i + 1];
    const uint32_t space_end = end - 2;  // layered models carry 2 tau edges
    uint32_t e = offsets[i];
    for (; e < space_end; ++e) h_space[targets[e]] -= two_s * couplings[e];
    for (; e < end; ++e) h_tau[targets[e]] -= two_s * couplings[e];
}

// Quadruplets are processed in index order: the four lanes of quadruplet q
// are spins 4q..4q+3, one RNG lane each. Flip decisions for the four lanes
// are made together from the fields as they stand before the quadruplet;
// the quadruplet layout guarantees no member can influence another, so this
// equals the sequential per-spin dynamics. With lane_parallel_updates the
// neighbour updates of interior rows become masked 4-wide operations on the
// aligned target quadruplets; rows touching layers 0 and L-1 wrap across
// sections and always take the per-lane path.
template <ExpKind K, bool GroupUpdates>
void sweep_vector4_impl(SweepState& st) {
    const uint32_t n = st.n_spins;
    const uint32_t quads = n / 4;
    const uint32_t per_layer = st.meta.per_layer;
    const uint32_t section = st.meta.layers / 4;
    const float beta = st.params.beta;
    const float gamma = st.params.tau_scale;

    float* __restrict spins = st.spins.data();
    float* __restrict h_space = st.h_eff_space.data();
    float* __restrict h_tau = st.h_eff_tau.data();
    const uint32_t* __restrict offsets = st.flat.offsets.data();
    const uint32_t* __restrict targets = st.flat.targets.data();
    const float* __restrict couplings = st.flat.couplings.data();
    const float* __restrict uniforms = st.uniform_batch.data();

    uint64_t flips = 0;
    size_t batch_pos = st.batch_pos;

#if defined(__SSE2__)
    const __m128 neg_beta = _mm_set1_ps(-beta);
    const __m128 gamma4 = _mm_set1_ps(gamma);
    const __m128 two4 = _mm_set1_ps(2.0f);
    const __m128 sign4 = _mm_set1_ps(-0.0f);
    const __m128 scale23 = _mm_set1_ps(kLog2eP23);
    const __m128 image_lo = _mm_set1_ps(kImageLo);
    const __m128 image_hi = _mm_set1_ps(kImageHi);
    const __m128 two_ln2sq = _mm_set1_ps(kTwoLnSquared2);
    const __m128i bias = _mm_set1_epi32(0x3F800000);

    for (uint32_t q = 0; q < quads; ++q) {
        if (batch_pos == st.batch_end) {
            st.batch_pos = batch_pos;
            refill_lane_batch(st);
            batch_pos = st.batch_pos;
        }
        const __m128 u = _mm_loadu_ps(uniforms + batch_pos);
        batch_pos += 4;

        const uint32_t i0 = 4 * q;
        const __m128 s = _mm_loadu_ps(spins + i0);
        const __m128 hs = _mm_loadu_ps(h_space + i0);
        const __m128 ht = _mm_loadu_ps(h_tau + i0);
        const __m128 x =
            _mm_mul_ps(neg_beta, _mm_mul_ps(_mm_mul_ps(two4, s), _mm_add_ps(hs, _mm_mul_ps(gamma4, ht))));

        __m128 p;
        if constexpr (K == ExpKind::fast) {
            __m128 t = _mm_mul_ps(x, scale23);
            t = _mm_min_ps(_mm_max_ps(t, image_lo), image_hi);
            const __m128i img = _mm_add_epi32(_mm_cvtps_epi32(t), bias);
            p = _mm_mul_ps(_mm_castsi128_ps(img), two_ln2sq);
        } else {
            alignas(16) float xs[4];
            alignas(16) float ps[4];
            _mm_store_ps(xs, x);
            for (int k = 0; k < 4; ++k) ps[k] = detail::eval_exp<K>(xs[k]);
            p = _mm_load_ps(ps);
        }

        const __m128 mask = _mm_cmplt_ps(u, p);
        const int mbits = _mm_movemask_ps(mask);
        if (mbits == 0) continue;
        flips += std::popcount(unsigned(mbits));

        alignas(16) float s_pre[4];
        _mm_store_ps(s_pre, s);
        _mm_storeu_ps(spins + i0, _mm_xor_ps(s, _mm_and_ps(mask, sign4)));
        if (st.record_flags) {
            for (int k = 0; k < 4; ++k) st.flip_flags[i0 + k] = uint8_t((mbits >> k) & 1);
        }

        const uint32_t row = q / per_layer;
        if (GroupUpdates && row != 0 && row != section - 1) {
            const __m128 masked_two_s = _mm_and_ps(mask, _mm_mul_ps(two4, s));
            const uint32_t begin = offsets[i0];
            const uint32_t end = offsets[i0 + 1];
            const uint32_t space_end = end - 2;
            for (uint32_t e = begin; e < space_end; ++e) {
                const uint32_t base = targets[e];
                const __m128 j4 = _mm_set1_ps(couplings[e]);
                __m128 hv = _mm_loadu_ps(h_space + base);
                hv = _mm_sub_ps(hv, _mm_mul_ps(masked_two_s, j4));
                _mm_storeu_ps(h_space + base, hv);
            }
            for (uint32_t e = space_end; e < end; ++e) {
                const uint32_t base = targets[e];
                const __m128 j4 = _mm_set1_ps(couplings[e]);
                __m128 hv = _mm_loadu_ps(h_tau + base);
                hv = _mm_sub_ps(hv, _mm_mul_ps(masked_two_s, j4));
                _mm_storeu_ps(h_tau + base, hv);
            }
        } else {
            for (int k = 0; k < 4; ++k) {
                if ((mbits >> k) & 1) scalar_update(offsets, targets, couplings, h_space, h_tau, i0 + k, s_pre[k]);
            }
        }
    }
    st.batch_pos = batch_pos;
#else
    for (uint32_t q = 0; q < quads; ++q) {
        if (batch_pos == st.batch_end) {
            st.batch_pos = batch_pos;
            refill_lane_batch(st);
            batch_pos = st.batch_pos;
        }
        const float* u4 = uniforms + batch_pos;
        batch_pos += 4;

        const uint32_t i0 = 4 * q;
        float s_pre[4];
        int mbits = 0;
        for (int k = 0; k < 4; ++k) {
            const uint32_t i = i0 + k;
            s_pre[k] = spins[i];
            const float x = detail::flip_exponent(beta, gamma, s_pre[k], h_space[i], h_tau[i]);
            if (u4[k] < detail::eval_exp<K>(x)) mbits |= 1 << k;
        }
        if (mbits == 0) continue;
        flips += std::popcount(unsigned(mbits));
        for (int k = 0; k < 4; ++k) {
            if ((mbits >> k) & 1) {
                spins[i0 + k] = -s_pre[k];
                if (st.record_flags) st.flip_flags[i0 + k] = 1;
            }
        }
        const uint32_t row = q / per_layer;
        if (GroupUpdates && row != 0 && row != section - 1) {
            // Same 4-wide masked walk as the SSE path, expressed per lane.
            const uint32_t begin = offsets[i0];
            const uint32_t end = offsets[i0 + 1];
            const uint32_t space_end = end - 2;
            for (uint32_t e = begin; e < space_end; ++e) {
                const uint32_t base = targets[e];
                for (int k = 0; k < 4; ++k) {
                    if ((mbits >> k) & 1) h_space[base + k] -= (2.0f * s_pre[k]) * couplings[e];
                }
            }
            for (uint32_t e = space_end; e < end; ++e) {
                const uint32_t base = targets[e];
                for (int k = 0; k < 4; ++k) {
                    if ((mbits >> k) & 1) h_tau[base + k] -= (2.0f * s_pre[k]) * couplings[e];
                }
            }
        } else {
            for (int k = 0; k < 4; ++k) {
                if ((mbits >> k) & 1) scalar_update(offsets, targets, couplings, h_space, h_tau, i0 + k, s_pre[k]);
            }
        }
    }
    st.batch_pos = batch_pos;
#endif

    st.stats.flips += flips;
    st.stats.attempts += n;
    detail::accumulate_group_stats(st);
}

template <ExpKind K>
void dispatch_group(SweepState& st, bool group_updates) {
    if (group_updates) {
        sweep_vector4_impl<K, true>(st);
    } else {
        sweep_vector4_impl<K, false>(st);
    }
}

}  // namespace

void sweep_vector4(SweepState& st, const SpinModel& m, bool lane_parallel_updates) {
    if (st.engine != EngineKind::vector4) throw Error("sweep_vector4: state built for another engine");
    if (m.n_spins != st.n_spins) throw Error("sweep_vector4: model/state size mismatch");
    switch (st.params.exp_kind) {
        case ExpKind::exact: dispatch_group<ExpKind::exact>(st, lane_parallel_updates); break;
        case ExpKind::fast: dispatch_group<ExpKind::fast>(st, lane_parallel_updates); break;
        case ExpKind::accurate: dispatch_group<ExpKind::accurate>(st, lane_parallel_updates); break;
    }
}

}  // namespace isingmc
