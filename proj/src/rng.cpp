#include "isingmc/rng.hpp"

#include <algorithm>
#include <stdexcept>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif
#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace isingmc {

namespace {

constexpr uint32_t kMatrixA = 0x9908b0dfu;
constexpr uint32_t kUpperMask = 0x80000000u;
constexpr uint32_t kLowerMask = 0x7fffffffu;
constexpr uint32_t kTwistOffset = 397;

inline uint32_t recurrence(uint32_t curr, uint32_t next, uint32_t far) {
    const uint32_t y = (curr & kUpperMask) | (next & kLowerMask);
    return far ^ (y >> 1) ^ ((0u - (y & 1u)) & kMatrixA);
}

inline uint32_t temper_one(uint32_t y) {
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c5680u;
    y ^= (y << 15) & 0xefc60000u;
    y ^= y >> 18;
    return y;
}

}  // namespace

void Mt19937::reseed(uint32_t seed) {
    words_[0] = seed;
    for (uint32_t i = 1; i < kMtStateSize; ++i) {
        words_[i] = 1812433253u * (words_[i - 1] ^ (words_[i - 1] >> 30)) + i;
    }
    cursor_ = kMtStateSize;
    blocks_ = 0;
}

namespace {

#if defined(__SSE2__)
// Four consecutive state words per step; the untwisted loop only reads
// forward of the store window (i+1, i+far), so unaligned loads see the same
// values the scalar loop would.
inline void twist_range_sse(uint32_t* w, uint32_t begin, uint32_t end, int64_t far_delta) {
    const __m128i upper = _mm_set1_epi32(int32_t(kUpperMask));
    const __m128i lower = _mm_set1_epi32(int32_t(kLowerMask));
    const __m128i matrix = _mm_set1_epi32(int32_t(kMatrixA));
    const __m128i one = _mm_set1_epi32(1);
    uint32_t i = begin;
    for (; i + 4 <= end; i += 4) {
        const __m128i c = _mm_loadu_si128(reinterpret_cast<const __m128i*>(w + i));
        const __m128i n = _mm_loadu_si128(reinterpret_cast<const __m128i*>(w + i + 1));
        const __m128i f =
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(w + int64_t(i) + far_delta));
        const __m128i y = _mm_or_si128(_mm_and_si128(c, upper), _mm_and_si128(n, lower));
        const __m128i odd = _mm_cmpeq_epi32(_mm_and_si128(y, one), one);
        __m128i v = _mm_xor_si128(f, _mm_srli_epi32(y, 1));
        v = _mm_xor_si128(v, _mm_and_si128(odd, matrix));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(w + i), v);
    }
    for (; i < end; ++i) w[i] = recurrence(w[i], w[i + 1], w[int64_t(i) + far_delta]);
}
#endif

}  // namespace

void Mt19937::twist() {
    constexpr uint32_t N = kMtStateSize;
    constexpr uint32_t M = kTwistOffset;
    uint32_t* w = words_.data();
#if defined(__SSE2__)
    if (impl_ == TwistImpl::blockwise) {
        twist_range_sse(w, 0, N - M, int64_t(M));
        twist_range_sse(w, N - M, N - 1, int64_t(M) - int64_t(N));
        w[N - 1] = recurrence(w[N - 1], w[0], w[M - 1]);
        cursor_ = 0;
        ++blocks_;
        return;
    }
#endif
    // Classic table-selected generation loop, one state word per step.
    static const uint32_t mag01[2] = {0u, kMatrixA};
    for (uint32_t i = 0; i < N; ++i) {
        const uint32_t y = (w[i] & kUpperMask) | (w[(i + 1) % N] & kLowerMask);
        w[i] = w[(i + M) % N] ^ (y >> 1) ^ mag01[y & 1u];
    }
    cursor_ = 0;
    ++blocks_;
}

uint32_t Mt19937::next_u32() {
    if (cursor_ == kMtStateSize) twist();
    return temper_one(words_[cursor_++]);
}

void Mt19937::fill(std::span<uint32_t> out) {
    size_t done = 0;
    while (done < out.size()) {
        if (cursor_ == kMtStateSize) twist();
        const size_t take = std::min(out.size() - done, size_t(kMtStateSize - cursor_));
        const uint32_t* src = words_.data() + cursor_;
        uint32_t* dst = out.data() + done;
        size_t k = 0;
#if defined(__SSE2__)
        const __m128i m1 = _mm_set1_epi32(int32_t(0x9d2c5680u));
        const __m128i m2 = _mm_set1_epi32(int32_t(0xefc60000u));
        for (; k + 4 <= take; k += 4) {
            __m128i y = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + k));
            y = _mm_xor_si128(y, _mm_srli_epi32(y, 11));
            y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 7), m1));
            y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 15), m2));
            y = _mm_xor_si128(y, _mm_srli_epi32(y, 18));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + k), y);
        }
#endif
        for (; k < take; ++k) dst[k] = temper_one(src[k]);
        cursor_ += static_cast<uint32_t>(take);
        done += take;
    }
}

InterlacedMt::InterlacedMt(std::span<const uint32_t> seeds)
    : lanes_(static_cast<uint32_t>(seeds.size())),
      words_(size_t(kMtStateSize) * seeds.size()) {
    if (seeds.empty()) throw std::invalid_argument("InterlacedMt: lane count must be positive");
    for (uint32_t k = 0; k < lanes_; ++k) {
        uint32_t prev = seeds[k];
        words_[k] = prev;
        for (uint32_t w = 1; w < kMtStateSize; ++w) {
            prev = 1812433253u * (prev ^ (prev >> 30)) + w;
            words_[size_t(w) * lanes_ + k] = prev;
        }
    }
}

InterlacedMt InterlacedMt::with_base_seed(uint32_t base_seed, uint32_t lanes) {
    std::vector<uint32_t> seeds(lanes);
    for (uint32_t k = 0; k < lanes; ++k) seeds[k] = base_seed + k;
    return InterlacedMt(seeds);
}

void InterlacedMt::twist() {
    constexpr uint32_t N = kMtStateSize;
    constexpr uint32_t M = kTwistOffset;
    const uint32_t K = lanes_;
    uint32_t* __restrict w = words_.data();

#if defined(__SSE2__)
    if (K % 4 == 0) {
        const __m128i upper = _mm_set1_epi32(int32_t(kUpperMask));
        const __m128i lower = _mm_set1_epi32(int32_t(kLowerMask));
        const __m128i matrix = _mm_set1_epi32(int32_t(kMatrixA));
        const __m128i one = _mm_set1_epi32(1);
        const auto vec_step = [&](uint32_t* curr, const uint32_t* next, const uint32_t* far) {
            const __m128i c = _mm_loadu_si128(reinterpret_cast<const __m128i*>(curr));
            const __m128i n = _mm_loadu_si128(reinterpret_cast<const __m128i*>(next));
            const __m128i f = _mm_loadu_si128(reinterpret_cast<const __m128i*>(far));
            const __m128i y = _mm_or_si128(_mm_and_si128(c, upper), _mm_and_si128(n, lower));
            // mask-select of kMatrixA, the vector form of (y & 1) ? A : 0
            const __m128i odd = _mm_cmpeq_epi32(_mm_and_si128(y, one), one);
            __m128i v = _mm_xor_si128(f, _mm_srli_epi32(y, 1));
            v = _mm_xor_si128(v, _mm_and_si128(odd, matrix));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(curr), v);
        };
        if (K == 4) {
#if defined(__AVX2__)
            // Two rows per step. All three operands are loaded before the
            // store, so the row shared between "curr" and "next" is read
            // untouched, exactly as in the one-row walk.
            const __m256i upper2 = _mm256_set1_epi32(int32_t(kUpperMask));
            const __m256i lower2 = _mm256_set1_epi32(int32_t(kLowerMask));
            const __m256i matrix2 = _mm256_set1_epi32(int32_t(kMatrixA));
            const __m256i one2 = _mm256_set1_epi32(1);
            const auto vec_step2 = [&](uint32_t* curr, const uint32_t* next, const uint32_t* far) {
                const __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(curr));
                const __m256i n = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(next));
                const __m256i f = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(far));
                const __m256i y =
                    _mm256_or_si256(_mm256_and_si256(c, upper2), _mm256_and_si256(n, lower2));
                const __m256i odd = _mm256_cmpeq_epi32(_mm256_and_si256(y, one2), one2);
                __m256i v = _mm256_xor_si256(f, _mm256_srli_epi32(y, 1));
                v = _mm256_xor_si256(v, _mm256_and_si256(odd, matrix2));
                _mm256_storeu_si256(reinterpret_cast<__m256i*>(curr), v);
            };
            uint32_t* p = w;
            uint32_t i = 0;
            for (; i + 2 <= N - M; i += 2, p += 8) vec_step2(p, p + 4, p + 4 * M);
            for (; i < N - M; ++i, p += 4) vec_step(p, p + 4, p + 4 * M);
            for (; i + 2 <= N - 1; i += 2, p += 8) vec_step2(p, p + 4, p - 4 * int64_t(N - M));
            for (; i < N - 1; ++i, p += 4) vec_step(p, p + 4, p - 4 * int64_t(N - M));
            vec_step(p, w, p - 4 * int64_t(N - M));
#else
            uint32_t* p = w;
            for (uint32_t i = 0; i < N - M; ++i, p += 4) vec_step(p, p + 4, p + 4 * M);
            for (uint32_t i = N - M; i < N - 1; ++i, p += 4) {
                vec_step(p, p + 4, p - 4 * int64_t(N - M));
            }
            vec_step(p, w, p - 4 * int64_t(N - M));
#endif
        } else {
            const auto row_block = [&](uint32_t row0, uint32_t rows, int64_t far_delta) {
                // far_delta in rows; every lane group of 4 advances independently
                for (uint32_t i = row0; i < row0 + rows; ++i) {
                    uint32_t* curr = w + size_t(i) * K;
                    for (uint32_t k = 0; k < K; k += 4) {
                        vec_step(curr + k, curr + K + k, curr + far_delta * int64_t(K) + k);
                    }
                }
            };
            row_block(0, N - M, int64_t(M));
            row_block(N - M, M - 1, int64_t(M) - int64_t(N));
            // last row wraps to row 0 for "next" and back M-1 rows for "far"
            uint32_t* curr = w + size_t(N - 1) * K;
            for (uint32_t k = 0; k < K; k += 4) {
                vec_step(curr + k, w + k, curr - int64_t(N - M) * int64_t(K) + k);
            }
        }
        cursor_ = 0;
        ++twists_;
        return;
    }
#endif
    const auto row_step = [&](uint32_t i, uint32_t next_row, uint32_t far_row) {
        uint32_t* curr = w + size_t(i) * K;
        const uint32_t* next = w + size_t(next_row) * K;
        const uint32_t* far = w + size_t(far_row) * K;
        for (uint32_t k = 0; k < K; ++k) curr[k] = recurrence(curr[k], next[k], far[k]);
    };
    for (uint32_t i = 0; i < N - M; ++i) row_step(i, i + 1, i + M);
    for (uint32_t i = N - M; i < N - 1; ++i) row_step(i, i + 1, i + M - N);
    row_step(N - 1, 0, M - 1);
    cursor_ = 0;
    ++twists_;
}

void InterlacedMt::next_block(std::span<uint32_t> out) {
    if (out.size() != lanes_) throw std::invalid_argument("InterlacedMt: block size != lane count");
    if (cursor_ == kMtStateSize) twist();
    const uint32_t* row = words_.data() + size_t(cursor_) * lanes_;
#if defined(__SSE2__)
    if (lanes_ % 4 == 0) {
        const __m128i m1 = _mm_set1_epi32(int32_t(0x9d2c5680u));
        const __m128i m2 = _mm_set1_epi32(int32_t(0xefc60000u));
        for (uint32_t k = 0; k < lanes_; k += 4) {
            __m128i y = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row + k));
            y = _mm_xor_si128(y, _mm_srli_epi32(y, 11));
            y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 7), m1));
            y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 15), m2));
            y = _mm_xor_si128(y, _mm_srli_epi32(y, 18));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + k), y);
        }
        ++cursor_;
        return;
    }
#endif
    for (uint32_t k = 0; k < lanes_; ++k) out[k] = temper_one(row[k]);
    ++cursor_;
}

void InterlacedMt::fill_blocks(std::span<uint32_t> out) {
    if (out.size() % lanes_ != 0) {
        throw std::invalid_argument("InterlacedMt: fill size must be a multiple of lane count");
    }
    size_t done = 0;
    const size_t total_rows = out.size() / lanes_;
    size_t rows_left = total_rows;
    while (rows_left > 0) {
        if (cursor_ == kMtStateSize) twist();
        const size_t take = std::min(rows_left, size_t(kMtStateSize - cursor_));
        const uint32_t* src = words_.data() + size_t(cursor_) * lanes_;
        uint32_t* dst = out.data() + done;
        const size_t count = take * lanes_;
        size_t k = 0;
#if defined(__SSE2__)
        const __m128i m1 = _mm_set1_epi32(int32_t(0x9d2c5680u));
        const __m128i m2 = _mm_set1_epi32(int32_t(0xefc60000u));
        for (; k + 4 <= count; k += 4) {
            __m128i y = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + k));
            y = _mm_xor_si128(y, _mm_srli_epi32(y, 11));
            y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 7), m1));
            y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 15), m2));
            y = _mm_xor_si128(y, _mm_srli_epi32(y, 18));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + k), y);
        }
#endif
        for (; k < count; ++k) {
            uint32_t y = src[k];
            y ^= y >> 11;
            y ^= (y << 7) & 0x9d2c5680u;
            y ^= (y << 15) & 0xefc60000u;
            y ^= y >> 18;
            dst[k] = y;
        }
        cursor_ += static_cast<uint32_t>(take);
        done += count;
        rows_left -= take;
    }
}

namespace {

#if defined(__SSE2__)
struct RoundTowardZeroScope {
    unsigned saved;
    RoundTowardZeroScope() : saved(_mm_getcsr()) { _mm_setcsr((saved & ~0x6000u) | 0x6000u); }
    ~RoundTowardZeroScope() { _mm_setcsr(saved); }
};

// Tempered output word to unit float, four lanes at a time; requires the
// round-toward-zero scope to be active. Matches u32_to_unit(temper_one(x)).
inline __m128 temper_to_unit_sse(__m128i y, __m128i m1, __m128i m2, __m128i flip, __m128d dbias,
                                 __m128 scale) {
    y = _mm_xor_si128(y, _mm_srli_epi32(y, 11));
    y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 7), m1));
    y = _mm_xor_si128(y, _mm_and_si128(_mm_slli_epi32(y, 15), m2));
    y = _mm_xor_si128(y, _mm_srli_epi32(y, 18));
    const __m128i ys = _mm_xor_si128(y, flip);
    const __m128d lo = _mm_add_pd(_mm_cvtepi32_pd(ys), dbias);
    const __m128d hi = _mm_add_pd(_mm_cvtepi32_pd(_mm_srli_si128(ys, 8)), dbias);
    const __m128 f = _mm_movelh_ps(_mm_cvtpd_ps(lo), _mm_cvtpd_ps(hi));
    return _mm_mul_ps(f, scale);
}
#endif

}  // namespace

void InterlacedMt::fill_unit_floats(std::span<float> out) {
    if (out.size() % lanes_ != 0) {
        throw std::invalid_argument("InterlacedMt: fill size must be a multiple of lane count");
    }
    size_t done = 0;
    size_t rows_left = out.size() / lanes_;
    while (rows_left > 0) {
        if (cursor_ == kMtStateSize) twist();
        const size_t take = std::min(rows_left, size_t(kMtStateSize - cursor_));
        const uint32_t* src = words_.data() + size_t(cursor_) * lanes_;
        float* dst = out.data() + done;
        const size_t count = take * lanes_;
        size_t k = 0;
#if defined(__SSE2__)
        if (count >= 4) {
            RoundTowardZeroScope rz;
#if defined(__AVX2__)
            const __m256i m1w = _mm256_set1_epi32(int32_t(0x9d2c5680u));
            const __m256i m2w = _mm256_set1_epi32(int32_t(0xefc60000u));
            const __m256i flipw = _mm256_set1_epi32(int32_t(0x80000000u));
            const __m256d dbiasw = _mm256_set1_pd(2147483648.0);
            const __m256 scalew = _mm256_set1_ps(0x1p-32f);
            for (; k + 8 <= count; k += 8) {
                __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + k));
                y = _mm256_xor_si256(y, _mm256_srli_epi32(y, 11));
                y = _mm256_xor_si256(y, _mm256_and_si256(_mm256_slli_epi32(y, 7), m1w));
                y = _mm256_xor_si256(y, _mm256_and_si256(_mm256_slli_epi32(y, 15), m2w));
                y = _mm256_xor_si256(y, _mm256_srli_epi32(y, 18));
                const __m256i ys = _mm256_xor_si256(y, flipw);
                const __m256d lo =
                    _mm256_add_pd(_mm256_cvtepi32_pd(_mm256_castsi256_si128(ys)), dbiasw);
                const __m256d hi =
                    _mm256_add_pd(_mm256_cvtepi32_pd(_mm256_extracti128_si256(ys, 1)), dbiasw);
                const __m256 f =
                    _mm256_insertf128_ps(_mm256_castps128_ps256(_mm256_cvtpd_ps(lo)),
                                         _mm256_cvtpd_ps(hi), 1);
                _mm256_storeu_ps(dst + k, _mm256_mul_ps(f, scalew));
            }
#endif
            const __m128i m1 = _mm_set1_epi32(int32_t(0x9d2c5680u));
            const __m128i m2 = _mm_set1_epi32(int32_t(0xefc60000u));
            const __m128i flip = _mm_set1_epi32(int32_t(0x80000000u));
            const __m128d dbias = _mm_set1_pd(2147483648.0);
            const __m128 scale = _mm_set1_ps(0x1p-32f);
            for (; k + 4 <= count; k += 4) {
                const __m128i y = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + k));
                _mm_storeu_ps(dst + k, temper_to_unit_sse(y, m1, m2, flip, dbias, scale));
            }
        }
#endif
        for (; k < count; ++k) {
            uint32_t y = src[k];
            y ^= y >> 11;
            y ^= (y << 7) & 0x9d2c5680u;
            y ^= (y << 15) & 0xefc60000u;
            y ^= y >> 18;
            dst[k] = u32_to_unit(y);
        }
        cursor_ += static_cast<uint32_t>(take);
        done += count;
        rows_left -= take;
    }
}

void convert_unit_floats(std::span<const uint32_t> in, std::span<float> out) {
    if (in.size() != out.size()) throw std::invalid_argument("convert_unit_floats: size mismatch");
    size_t i = 0;
#if defined(__SSE2__)
    if (in.size() >= 8) {
        // Exact double image of x, then a round-toward-zero conversion to
        // float; equals the scalar truncation in u32_to_unit bit-for-bit.
        const unsigned old_csr = _mm_getcsr();
        _mm_setcsr((old_csr & ~0x6000u) | 0x6000u);  // MXCSR RC = toward zero
        const __m128i flip = _mm_set1_epi32(int32_t(0x80000000u));
        const __m128d bias = _mm_set1_pd(2147483648.0);
        const __m128 scale = _mm_set1_ps(0x1p-32f);
        for (; i + 4 <= in.size(); i += 4) {
            const __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(in.data() + i));
            const __m128i xs = _mm_xor_si128(x, flip);  // x - 2^31 as signed
            const __m128d lo = _mm_add_pd(_mm_cvtepi32_pd(xs), bias);
            const __m128d hi = _mm_add_pd(_mm_cvtepi32_pd(_mm_srli_si128(xs, 8)), bias);
            const __m128 f = _mm_movelh_ps(_mm_cvtpd_ps(lo), _mm_cvtpd_ps(hi));
            _mm_storeu_ps(out.data() + i, _mm_mul_ps(f, scale));
        }
        _mm_setcsr(old_csr);
    }
#endif
    for (; i < in.size(); ++i) out[i] = u32_to_unit(in[i]);
}

}  // namespace isingmc
