#include "sweep_kernels.hpp"

namespace isingmc {

namespace {

// Branch-eliminated tier on the flattened edge arrays: uniforms pulled from a
// block-sized batch, the doubled spin multiplier hoisted out of the update
// loop, space edges swept in one run with the two tau edges peeled off the
// end. Must follow the reference trajectory bit-for-bit under a pinned
// exp_kind, so the decision arithmetic is shared with sweep_reference.
template <ExpKind K>
void sweep_basic_impl(SweepState& st, uint32_t n) {
    const float beta = st.params.beta;
    const float gamma = st.params.tau_scale;
    float* __restrict spins = st.spins.data();
    float* __restrict h_space = st.h_eff_space.data();
    float* __restrict h_tau = st.h_eff_tau.data();
    const uint32_t* __restrict offsets = st.flat.offsets.data();
    const uint32_t* __restrict targets = st.flat.targets.data();
    const float* __restrict couplings = st.flat.couplings.data();
    const uint8_t* __restrict tau_counts = st.flat.tau_counts.data();
    const float* __restrict uniforms = st.uniform_batch.data();

    uint64_t flips = 0;
    size_t batch_pos = st.batch_pos;
    for (uint32_t i = 0; i < n; ++i) {
        if (batch_pos == st.batch_end) {
            st.batch_pos = batch_pos;
            detail::refill_scalar_batch(st);
            batch_pos = st.batch_pos;
        }
        const float u = uniforms[batch_pos++];
        const float s = spins[i];
        const float x = detail::flip_exponent(beta, gamma, s, h_space[i], h_tau[i]);
        const float p = detail::eval_exp<K>(x);
        if (u < p) {
            const float two_s = 2.0f * s;
            const uint32_t end = offsets[i + 1];
            const uint32_t space_end = end - tau_counts[i];
            for (uint32_t e = offsets[i]; e < space_end; ++e) {
                h_space[targets[e]] -= two_s * couplings[e];
            }
            for (uint32_t e = space_end; e < end; ++e) {
                h_tau[targets[e]] -= two_s * couplings[e];
            }
            spins[i] = -s;
            ++flips;
            if (st.record_flags) st.flip_flags[i] = 1;
        }
    }
    st.batch_pos = batch_pos;
    st.stats.flips += flips;
    st.stats.attempts += n;
    detail::accumulate_group_stats(st);
}

}  // namespace

void sweep_basic(SweepState& st, const SpinModel& m) {
    switch (st.params.exp_kind) {
        case ExpKind::exact: sweep_basic_impl<ExpKind::exact>(st, m.n_spins); break;
        case ExpKind::fast: sweep_basic_impl<ExpKind::fast>(st, m.n_spins); break;
        case ExpKind::accurate: sweep_basic_impl<ExpKind::accurate>(st, m.n_spins); break;
    }
}

}  // namespace isingmc
