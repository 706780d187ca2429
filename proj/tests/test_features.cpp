#include <doctest.h>

#include <cmath>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/features.hpp"
#include "acsim/rng.hpp"
#include "helpers.hpp"

using namespace acsim;

TEST_SUITE_BEGIN("features");

TEST_CASE("ten seconds of audio maps to 3 x 1000 x 128") {
    const Signal x = gaussian_noise(160000, 9);
    const auto f = extract_features(x);
    CHECK(f.frames == 1000);
    CHECK(f.log_magnitude.size() == 1000 * 128);
    CHECK(f.phase_sin.size() == 1000 * 128);
    CHECK(f.phase_cos.size() == 1000 * 128);
}

TEST_CASE("positive DC input has zero phase at bin zero") {
    Signal x;
    x.samples.assign(2000, 1.0);
    const auto f = extract_features(x);
    for (std::size_t t = 2; t + 2 < f.frames; ++t) {
        CHECK(f.cos_at(t, 0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.sin_at(t, 0) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("phase channels stay on the unit circle") {
    const Signal x = gaussian_noise(16000, 44);
    const auto f = extract_features(x);
    for (std::size_t i = 0; i < f.phase_sin.size(); ++i) {
        const double r2 =
            f.phase_sin[i] * f.phase_sin[i] + f.phase_cos[i] * f.phase_cos[i];
        CHECK(std::fabs(r2 - 1.0) < 1e-6);
    }
}

TEST_CASE("a one-hop delay shifts features by exactly one frame") {
    const Signal x = gaussian_noise(16000, 55);
    Signal delayed;
    delayed.samples.assign(kStftHop, 0.0);
    delayed.samples.insert(delayed.samples.end(), x.samples.begin(),
                           x.samples.end());
    const auto a = extract_features(x);
    const auto b = extract_features(delayed);
    REQUIRE(b.frames >= a.frames);
    for (std::size_t t = 2; t + 4 < a.frames; ++t) {
        for (std::size_t k = 0; k < SpectralFeatures::bins; ++k) {
            CHECK(std::fabs(a.mag_at(t, k) - b.mag_at(t + 1, k)) < 1e-6);
            CHECK(std::fabs(a.sin_at(t, k) - b.sin_at(t + 1, k)) < 1e-6);
            CHECK(std::fabs(a.cos_at(t, k) - b.cos_at(t + 1, k)) < 1e-6);
        }
    }
}

TEST_CASE("silence floors the log magnitude") {
    Signal x;
    x.samples.assign(1000, 0.0);
    const auto f = extract_features(x);
    const double floor = std::log(kLogMagFloor);
    for (double v : f.log_magnitude) CHECK(v == doctest::Approx(floor));
}

TEST_CASE("bins map linearly to frequency") {
    // A tone aligned with bin 32 (32 * 16000/254 Hz) lands exactly there.
    const double f_bin = 32.0 * 16000.0 / 254.0;
    const Signal x = test::make_tone(f_bin, 1.0);
    const auto f = extract_features(x);
    for (std::size_t t = 4; t + 4 < f.frames; t += 100) {
        std::size_t arg = 0;
        double best = -1e300;
        for (std::size_t k = 0; k < SpectralFeatures::bins; ++k)
            if (f.mag_at(t, k) > best) {
                best = f.mag_at(t, k);
                arg = k;
            }
        CHECK(arg == 32);
    }
}

TEST_CASE("too-short input is rejected") {
    Signal x;
    x.samples.assign(100, 0.1);
    CHECK_THROWS_AS(extract_features(x), EmptyInputError);
}

TEST_CASE("feature files round-trip through disk") {
    const Signal x = gaussian_noise(8000, 66);
    const auto f = extract_features(x);
    const auto dir = test::temp_dir("features");
    save_features(dir / "t.acsft", f);
    const auto g = load_features(dir / "t.acsft");
    REQUIRE(g.frames == f.frames);
    for (std::size_t i = 0; i < f.log_magnitude.size(); ++i) {
        // float32 storage
        CHECK(std::fabs(g.log_magnitude[i] - f.log_magnitude[i]) < 1e-5);
        CHECK(std::fabs(g.phase_sin[i] - f.phase_sin[i]) < 1e-6);
        CHECK(std::fabs(g.phase_cos[i] - f.phase_cos[i]) < 1e-6);
    }
}

TEST_SUITE_END();
