#include <doctest.h>

#include <cmath>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/mic_array.hpp"
#include "acsim/rng.hpp"
#include "acsim/verify.hpp"
#include "helpers.hpp"

using namespace acsim;

namespace {

ImpulseResponse los_base(double delay_s = 0.002, double amp = 10.0) {
    PathSpec p;
    p.kind = PathKind::kLos;
    p.delay_s = delay_s;
    p.amplitude = amp;
    return compose_cir({p}, std::nullopt, 0);
}

}  // namespace

TEST_SUITE_BEGIN("mic-array");

TEST_CASE("broadside arrival has no time difference") {
    ArraySpec spec;
    spec.d_m = 0.1;
    spec.theta_deg = 90.0;
    CHECK(std::fabs(tdoa_from_doa(spec)) < 1e-15);
}

TEST_CASE("endfire arrival spans the full inter-mic delay") {
    ArraySpec spec;
    spec.d_m = 0.1;
    spec.theta_deg = 0.0;
    const double tau = tdoa_from_doa(spec);
    CHECK(tau == doctest::Approx(2.9155e-4).epsilon(1e-4));
    CHECK(tau * kSampleRate == doctest::Approx(4.664).epsilon(1e-3));

    spec.theta_deg = 180.0;
    CHECK(tdoa_from_doa(spec) == doctest::Approx(-2.9155e-4).epsilon(1e-4));
}

TEST_CASE("time difference is bounded by the geometry") {
    RngStream rng(5150);
    for (int i = 0; i < 200; ++i) {
        ArraySpec spec;
        spec.d_m = rng.uniform(kMicDistMin, kMicDistMax);
        spec.theta_deg = rng.uniform(0.0, 180.0);
        CHECK(std::fabs(tdoa_from_doa(spec)) <= spec.d_m / kSoundSpeed + 1e-15);
    }
}

TEST_CASE("time difference decreases monotonically with angle") {
    ArraySpec spec;
    spec.d_m = 0.12;
    double last = 1e9;
    for (double th = 0.0; th <= 180.0; th += 7.5) {
        spec.theta_deg = th;
        const double tau = tdoa_from_doa(spec);
        CHECK(tau < last);
        last = tau;
    }
}

TEST_CASE("zero time difference gives identical binaural channels") {
    ArraySpec spec;
    spec.d_m = 0.1;
    spec.theta_deg = 90.0;
    const ImpulseResponse base = los_base();
    const auto [l, r] = binaural_cirs(base, spec);
    CHECK(l.samples.samples == r.samples.samples);
}

TEST_CASE("endfire arrival delays the right channel by five samples") {
    ArraySpec spec;
    spec.d_m = 0.1;
    spec.theta_deg = 0.0;  // round(4.664) = 5
    const ImpulseResponse base = los_base();
    const auto [l, r] = binaural_cirs(base, spec);
    REQUIRE(r.samples.size() == l.samples.size() + 5);
    for (std::size_t i = 0; i < l.samples.size(); ++i)
        CHECK(r.samples.samples[i + 5] == l.samples.samples[i]);
    CHECK(r.component_log[0].delay_samples ==
          l.component_log[0].delay_samples + 5);
}

TEST_CASE("binaural channels need a direct path") {
    PathSpec echo;
    echo.kind = PathKind::kEarlyReflection;
    echo.delay_s = 0.002;
    echo.amplitude = 0.3;
    const ImpulseResponse base = compose_cir({echo}, std::nullopt, 0);
    ArraySpec spec;
    CHECK_THROWS_AS(binaural_cirs(base, spec), SpecError);
}

TEST_CASE("planted integer lags are recovered exactly by cross-correlation") {
    const Signal src = gaussian_noise(16000, 808);
    for (int lag = -7; lag <= 7; ++lag) {
        // Build L and R as shifted copies over a common buffer.
        const std::size_t n = src.size() + 16;
        Signal left, right;
        left.samples.assign(n, 0.0);
        right.samples.assign(n, 0.0);
        for (std::size_t i = 0; i < src.size(); ++i) {
            left.samples[i + 8] = src.samples[i];
            right.samples[i + 8 + lag] = src.samples[i];
        }
        CHECK(estimate_tdoa_xcorr(left, right, 10) == lag);
    }
}

TEST_SUITE_END();
