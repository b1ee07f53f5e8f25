#include "sweep_kernels.hpp"

namespace isingmc {

// Unoptimized tier: one uniform drawn at a time, the library exponential by
// default, and neighbour updates through the original graph layout: per-spin
// incident-edge indices into a global endpoint table, with the neighbour
// chosen by comparing endpoint 0 against the current spin and the tau/space
// array picked by a per-edge classification lookup. The spin multiplier is
// re-doubled on every edge.
void sweep_reference(SweepState& st, const SpinModel& m) {
    if (st.engine != EngineKind::reference) {
        throw Error("sweep_reference: state built for another engine");
    }
    const uint32_t n = m.n_spins;
    const float beta = st.params.beta;
    const float gamma = st.params.tau_scale;
    const ExpKind kind = st.params.exp_kind;
    const LegacyGraph& g = st.legacy;

    for (uint32_t i = 0; i < n; ++i) {
        const float u = u32_to_unit(st.scalar_rng->next_u32());
        const float s_mul = st.spins[i];
        const float x = detail::flip_exponent(beta, gamma, s_mul, st.h_eff_space[i], st.h_eff_tau[i]);
        const float p = detail::eval_exp_dyn(kind, x);
        if (u < p) {
            for (uint32_t k = g.incident_offsets[i]; k < g.incident_offsets[i + 1]; ++k) {
                const uint32_t edge = g.incident_edges[k];
                uint32_t neighbour;
                if (g.endpoints[2 * edge] == i) {
                    neighbour = g.endpoints[2 * edge + 1];
                } else {
                    neighbour = g.endpoints[2 * edge];
                }
                if (g.is_tau_edge[edge]) {
                    st.h_eff_tau[neighbour] -= 2.0f * s_mul * g.couplings[edge];
                } else {
                    st.h_eff_space[neighbour] -= 2.0f * s_mul * g.couplings[edge];
                }
            }
            st.spins[i] = -s_mul;
            ++st.stats.flips;
            if (st.record_flags) st.flip_flags[i] = 1;
        }
    }
    st.stats.attempts += n;
    detail::accumulate_group_stats(st);
}

}  // namespace isingmc
