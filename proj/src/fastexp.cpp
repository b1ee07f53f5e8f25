#include "isingmc/fastexp.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace isingmc {

void exp_fast_map(const float* in, float* out, size_t count) {
    size_t i = 0;
#if defined(__SSE2__)
    const __m128 scale23 = _mm_set1_ps(kLog2eP23);
    const __m128 image_lo = _mm_set1_ps(kImageLo);
    const __m128 image_hi = _mm_set1_ps(kImageHi);
    const __m128 two_ln2sq = _mm_set1_ps(kTwoLnSquared2);
    const __m128i bias = _mm_set1_epi32(0x3F800000);
    for (; i + 4 <= count; i += 4) {
        __m128 t = _mm_mul_ps(_mm_loadu_ps(in + i), scale23);
        t = _mm_min_ps(_mm_max_ps(t, image_lo), image_hi);
        const __m128i img = _mm_add_epi32(_mm_cvtps_epi32(t), bias);
        _mm_storeu_ps(out + i, _mm_mul_ps(_mm_castsi128_ps(img), two_ln2sq));
    }
#endif
    for (; i < count; ++i) out[i] = exp_fast(in[i]);
}

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_domain(ExpVariant variant, double lo, double hi) {
    const double dlo = variant == ExpVariant::fast ? -126.0 * kLn2 : -31.5 * kLn2;
    const double dhi = variant == ExpVariant::fast ? 128.0 * kLn2 : 32.0 * kLn2;
    if (lo < dlo || hi >= dhi) {
        throw std::invalid_argument("error_scan: [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "] outside valid domain [" +
                                    std::to_string(dlo) + ", " + std::to_string(dhi) + ")");
    }
}

}  // namespace

ErrorScanReport error_scan_csv(ExpVariant variant, double lo, double hi, long long samples,
                               const char* csv_path, long long max_rows) {
    if (samples < 1) throw std::invalid_argument("error_scan: samples must be >= 1");
    if (lo > hi) throw std::invalid_argument("error_scan: lo > hi");
    check_domain(variant, lo, hi);

    std::FILE* csv = nullptr;
    if (csv_path != nullptr) {
        csv = std::fopen(csv_path, "w");
        if (csv == nullptr) throw std::runtime_error(std::string("error_scan: cannot open ") + csv_path);
        std::fputs("x,relative_error\n", csv);
    }
    const long long emit_every =
        (csv != nullptr && max_rows > 0) ? std::max(1ll, samples / max_rows) : 0;

    ErrorScanReport rep;
    rep.lo = lo;
    rep.hi = hi;
    rep.samples = samples;
    const double step = samples > 1 ? (hi - lo) / double(samples - 1) : 0.0;
    double min_rel = 0.0, max_rel = 0.0;
    double mean_acc = 0.0;
    for (long long s = 0; s < samples; ++s) {
        const float x = static_cast<float>(lo + step * double(s));
        const float approx =
            variant == ExpVariant::fast ? exp_fast(x) : exp_accurate_core(x);
        const double rel = (double(approx) - std::exp(double(x))) / std::exp(double(x));
        if (s == 0 || rel < min_rel) min_rel = rel;
        if (s == 0 || rel > max_rel) max_rel = rel;
        mean_acc += rel;
        if (csv != nullptr && emit_every > 0 && s % emit_every == 0) {
            std::fprintf(csv, "%.9g,%.9g\n", double(x), rel);
        }
    }
    rep.min_rel = min_rel;
    rep.max_rel = max_rel;
    rep.mean_rel = mean_acc / double(samples);
    if (csv != nullptr) {
        std::fprintf(csv, "summary,min=%.9g,max=%.9g,mean=%.9g\n", rep.min_rel, rep.max_rel,
                     rep.mean_rel);
        std::fclose(csv);
    }
    return rep;
}

ErrorScanReport error_scan(ExpVariant variant, double lo, double hi, long long samples) {
    return error_scan_csv(variant, lo, hi, samples, nullptr, 0);
}

}  // namespace isingmc
