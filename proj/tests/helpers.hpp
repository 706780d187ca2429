#ifndef ACSIM_TESTS_HELPERS_HPP
#define ACSIM_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "acsim/rng.hpp"
#include "acsim/signal.hpp"
#include "acsim/wav.hpp"

namespace acsim::test {

inline Signal make_tone(double freq_hz, double duration_s,
                        double amplitude = 1.0, int fs = kSampleRate) {
    Signal s;
    s.sample_rate = fs;
    const auto n = static_cast<std::size_t>(duration_s * fs);
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.samples[i] =
            amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * i / fs);
    return s;
}

// Kolmogorov-Smirnov statistic of samples against U(lo, hi).
inline double ks_statistic_uniform(std::vector<double> xs, double lo,
                                   double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = (xs[i] - lo) / (hi - lo);
        d = std::max(d, std::fabs(cdf - (i + 1) / n));
        d = std::max(d, std::fabs(cdf - i / n));
    }
    return d;
}

// Asymptotic Kolmogorov p-value.
inline double ks_pvalue(double d, std::size_t n) {
    const double x = (std::sqrt(static_cast<double>(n)) + 0.12 +
                      0.11 / std::sqrt(static_cast<double>(n))) *
                     d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    return std::clamp(p, 0.0, 1.0);
}

// A small deterministic directory of varied broadband source clips, suitable
// as a stand-in ingestion corpus for tests.
inline std::filesystem::path make_test_sources(
    const std::filesystem::path& dir, int n_clips = 4,
    double duration_s = 3.0) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (int c = 0; c < n_clips; ++c) {
        RngStream rng = RngStream::derive(2024, "test-source", c);
        const auto n = static_cast<std::size_t>(duration_s * kSampleRate);
        std::vector<double> x(n);
        // Noise with a moving spectral tilt plus a few AM tones.
        double lp = 0.0;
        const double alpha = 0.1 + 0.2 * c;
        for (std::size_t i = 0; i < n; ++i) {
            lp = (1.0 - alpha) * lp + alpha * rng.normal();
            x[i] = lp;
        }
        for (int t = 0; t < 3; ++t) {
            const double f = 300.0 + 777.0 * t + 133.0 * c;
            const double am = 1.0 + 0.6 * t;
            for (std::size_t i = 0; i < n; ++i) {
                const double env =
                    0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * am * i /
                                         kSampleRate);
                x[i] += 0.4 * env *
                        std::sin(2.0 * std::numbers::pi * f * i / kSampleRate);
            }
        }
        double peak = 0.0;
        for (double v : x) peak = std::max(peak, std::fabs(v));
        for (double& v : x) v *= 0.7 / peak;
        wav_write(dir / ("clip" + std::to_string(c) + ".wav"), {x});
    }
    return dir;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("acsim-tests-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace acsim::test

#endif
