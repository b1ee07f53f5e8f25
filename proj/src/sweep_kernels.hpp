#pragma once

// Internal helpers shared by the sweep engines. The flip exponent and the
// uniform mapping must stay byte-for-byte identical across engines: the
// trajectory-equivalence contracts compare full spin states bit-exactly.

#include <cmath>

#include "isingmc/fastexp.hpp"
#include "isingmc/sweep.hpp"

namespace isingmc::detail {

inline float flip_exponent(float beta, float tau_scale, float s, float hs, float ht) {
    return -beta * (2.0f * s * (hs + tau_scale * ht));
}

// "exact" is the double-precision library exponential rounded once to float.
template <ExpKind K>
inline float eval_exp(float x) {
    if constexpr (K == ExpKind::exact) {
        return static_cast<float>(std::exp(double(x)));
    } else if constexpr (K == ExpKind::fast) {
        return exp_fast(x);
    } else {
        return exp_accurate(x);
    }
}

inline float eval_exp_dyn(ExpKind k, float x) {
    switch (k) {
        case ExpKind::exact: return static_cast<float>(std::exp(double(x)));
        case ExpKind::fast: return exp_fast(x);
        case ExpKind::accurate: return exp_accurate(x);
    }
    return 0.0f;
}

/// Refills the scalar uniform batch (whole generator blocks at a time).
void refill_scalar_batch(SweepState& st);

inline float next_uniform_batched(SweepState& st) {
    if (st.batch_pos == st.batch_end) refill_scalar_batch(st);
    return st.uniform_batch[st.batch_pos++];
}

/// Folds this sweep's flip flags into the per-width group counters and
/// clears the flags. No-op when no widths are recorded (flags stay zero).
void accumulate_group_stats(SweepState& st);

}  // namespace isingmc::detail
