#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace isingmc {

// A positive IEEE-754 binary32 with exponent field x and mantissa m has
// integer image i = 2^23*x + m, so f is (piecewise-linearly) exponential in i.
// exp_fast builds i = round(2^23*(log2(e)*x + 127)) directly and reinterprets;
// the 2 ln^2 2 factor centers the relative error of the interpolation at zero.

inline constexpr float kTwoLnSquared2 = 0.9609060278364028f;  // 2 ln^2 2
inline constexpr float kLog2eP23 = 12102203.161561485f;       // 2^23 * log2(e)
inline constexpr float kLog2eP25 = 48408812.64624594f;        // 2^25 * log2(e)
inline constexpr float kAccurateCutoff = -21.834136187592387f;  // -31.5 ln 2

// Integer-image clamps: keep the biased exponent inside (0, 255) so the
// reinterpreted value is a positive finite normal for any input.
inline constexpr float kImageLo = -1056964608.0f;  // -126 * 2^23
inline constexpr float kImageHi = 1073741760.0f;   // largest float < 2^30

/// Rough e^x: ~2% relative error band, mean error per octave ~0.
/// Valid domain (-126 ln 2) <= x < (128 ln 2); clamped outside.
inline float exp_fast(float x) {
    float t = x * kLog2eP23;
    t = std::min(std::max(t, kImageLo), kImageHi);
    const int32_t i = static_cast<int32_t>(std::lrintf(t)) + 0x3F800000;
    return std::bit_cast<float>(i) * kTwoLnSquared2;
}

/// The interpolation of exp_fast on a 4x finer grid plus a 4th root;
/// relative error roughly within (-0.01, 0.005) for
/// (-31.5 ln 2) <= x < (32 ln 2). No Metropolis masking.
inline float exp_accurate_core(float x) {
    float t = x * kLog2eP25;
    t = std::min(std::max(t, kImageLo), kImageHi);
    const int32_t i = static_cast<int32_t>(std::lrintf(t)) + 0x3F800000;
    const float f = std::bit_cast<float>(i) * kTwoLnSquared2;
    return std::sqrt(std::sqrt(f));
}

/// exp_accurate_core with the acceptance-test masking: exactly 1.0 for
/// x >= 0 and exactly 0.0 below -31.5 ln 2, as the Metropolis comparison needs.
inline float exp_accurate(float x) {
    if (x >= 0.0f) return 1.0f;
    if (x < kAccurateCutoff) return 0.0f;
    return exp_accurate_core(x);
}

/// Bulk exp_fast over an array, 4 lanes at a time where SSE is available;
/// bit-identical to calling exp_fast per element.
void exp_fast_map(const float* in, float* out, size_t count);

enum class ExpVariant : uint8_t { fast, accurate };

struct ErrorScanReport {
    double lo = 0.0;
    double hi = 0.0;
    long long samples = 0;
    double min_rel = 0.0;
    double max_rel = 0.0;
    double mean_rel = 0.0;
};

/// Relative error (approx - exp(x)) / exp(x) against the double-precision
/// exponential at `samples` evenly spaced points of [lo, hi]. The accurate
/// variant scans exp_accurate_core. Throws if [lo, hi] leaves the variant's
/// valid domain or samples < 1.
ErrorScanReport error_scan(ExpVariant variant, double lo, double hi, long long samples);

/// error_scan that also streams up to max_rows "x,relative_error" CSV rows
/// (evenly thinned) plus a summary row to `csv_path`.
ErrorScanReport error_scan_csv(ExpVariant variant, double lo, double hi, long long samples,
                               const char* csv_path, long long max_rows);

}  // namespace isingmc
