#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "isingmc/fastexp.hpp"

using namespace isingmc;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("exp_fast at the grid anchors") {
    // x = 0 lands exactly on the integer image of 1.0f.
    CHECK(exp_fast(0.0f) == doctest::Approx(0.9609060278364028).epsilon(1e-6));
    // One octave up: the image of 2.0f.
    CHECK(exp_fast(float(kLn2)) == doctest::Approx(2.0 * 0.9609060278364028).epsilon(1e-5));
}

TEST_CASE("exp_fast stays inside the derived error band") {
    const ErrorScanReport r = error_scan(ExpVariant::fast, -80.0, 80.0, 2000000);
    CHECK(r.max_rel <= 0.0205);
    CHECK(r.min_rel >= -0.0395);
}

TEST_CASE("exp_fast mean relative error per octave is centred") {
    for (int k : {-40, -10, -1, 0, 9, 39}) {
        const ErrorScanReport r =
            error_scan(ExpVariant::fast, k * kLn2, (k + 1) * kLn2, 400000);
        CHECK(std::abs(r.mean_rel) <= 0.002);
    }
}

TEST_CASE("exp_fast is monotone nondecreasing") {
    float prev = exp_fast(-87.0f);
    for (int i = -870000; i <= 880000; i += 7) {
        const float x = float(i) * 1e-4f;
        const float v = exp_fast(x);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("adding 2^23 to the integer image doubles the value") {
    for (int32_t e = 1; e < 254; ++e) {
        const float f = std::bit_cast<float>(e << 23);
        if (e + 1 < 255) {
            CHECK(std::bit_cast<float>((e + 1) << 23) == 2.0f * f);
        }
    }
    // And through the full pipeline: one octave apart stays a factor ~2.
    for (float x : {-20.0f, -5.0f, -1.0f, 0.5f, 10.0f}) {
        const float ratio = exp_fast(x + float(kLn2)) / exp_fast(x);
        CHECK(ratio == doctest::Approx(2.0).epsilon(5e-5));
    }
}

TEST_CASE("exp_fast out-of-range inputs are clamped, not garbage") {
    CHECK(std::isfinite(exp_fast(1000.0f)));
    CHECK(std::isfinite(exp_fast(-1000.0f)));
    CHECK(exp_fast(-1000.0f) > 0.0f);
    CHECK(exp_fast(1000.0f) == exp_fast(10000.0f));
}

TEST_CASE("exp_accurate_core hand anchors") {
    // Exact 4th root of 2 ln^2 2 at x = 0.
    CHECK(exp_accurate_core(0.0f) == doctest::Approx(0.9900840667).epsilon(3e-3));
    // Paper-quoted ~1% band deep in the valid range (y = -30, x = -30 ln 2).
    const float deep = float(-30.0 * kLn2);
    const double rel30 =
        (double(exp_accurate_core(deep)) - std::exp(double(deep))) / std::exp(double(deep));
    CHECK(std::abs(rel30) <= 0.011);
    // Grid point x = -25 ln 2 maps to 2^-25 exactly before the root.
    const float x = float(-25.0 * kLn2);
    const double rel = (double(exp_accurate_core(x)) - std::exp(double(x))) / std::exp(double(x));
    CHECK(rel <= 0.0055);
    CHECK(rel >= -0.011);
}

TEST_CASE("exp_accurate masking contract") {
    CHECK(exp_accurate(0.0f) == 1.0f);
    CHECK(exp_accurate(1e-20f) == 1.0f);
    CHECK(exp_accurate(0.3f) == 1.0f);
    CHECK(exp_accurate(1000.0f) == 1.0f);
    CHECK(exp_accurate(float(-31.6 * kLn2)) == 0.0f);
    CHECK(exp_accurate(-1000.0f) == 0.0f);
    CHECK(exp_accurate(float(-31.4 * kLn2)) > 0.0f);
    CHECK(exp_accurate(-1.0f) > 0.0f);
}

TEST_CASE("exp_accurate_core stays inside the widened paper band") {
    const ErrorScanReport r = error_scan(ExpVariant::accurate, -21.8, 22.1, 2000000);
    CHECK(r.max_rel <= 0.0055);
    CHECK(r.min_rel >= -0.011);
}

TEST_CASE("error_scan degenerate single point") {
    const ErrorScanReport r = error_scan(ExpVariant::fast, -3.0, -3.0, 1);
    CHECK(r.min_rel == r.max_rel);
    CHECK(r.mean_rel == r.min_rel);
}

TEST_CASE("error_scan rejects out-of-domain requests") {
    CHECK_THROWS(error_scan(ExpVariant::fast, -200.0, 0.0, 100));
    CHECK_THROWS(error_scan(ExpVariant::accurate, -30.0, 0.0, 100));
    CHECK_THROWS(error_scan(ExpVariant::accurate, 0.0, 23.0, 100));
    CHECK_THROWS(error_scan(ExpVariant::fast, 1.0, -1.0, 100));
    CHECK_THROWS(error_scan(ExpVariant::fast, 0.0, 1.0, 0));
}

TEST_CASE("both variants are pure functions of the input bits") {
    for (float x : {-17.25f, -0.125f, 3.5f}) {
        CHECK(std::bit_cast<uint32_t>(exp_fast(x)) == std::bit_cast<uint32_t>(exp_fast(x)));
        CHECK(std::bit_cast<uint32_t>(exp_accurate(x)) ==
              std::bit_cast<uint32_t>(exp_accurate(x)));
    }
}
