#include <doctest.h>

#include <cmath>
#include <fstream>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/rng.hpp"
#include "acsim/sources.hpp"
#include "acsim/verify.hpp"
#include "helpers.hpp"

using namespace acsim;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("sources");

TEST_CASE("ingest normalizes rate, channels, and peak") {
    const auto dir = test::temp_dir("ingest-norm");
    // A 10 s stereo clip at 44.1 kHz.
    const std::size_t n = 441000;
    std::vector<double> l(n), r(n);
    RngStream rng(12);
    for (std::size_t i = 0; i < n; ++i) {
        l[i] = 0.5 * rng.normal();
        r[i] = 0.5 * rng.normal();
    }
    wav_write(dir / "clip.wav", {l, r}, 44100);

    const SourcePool pool = SourcePool::ingest(dir);
    REQUIRE(pool.size() == 1);
    const auto& e = pool.at(0);
    CHECK(e.audio.sample_rate == 16000);
    CHECK(e.audio.size() == 160000);
    CHECK(e.audio.peak() == doctest::Approx(0.89).epsilon(1e-6));
}

TEST_CASE("ingest rejects an empty directory") {
    const auto dir = test::temp_dir("ingest-empty");
    CHECK_THROWS_AS(SourcePool::ingest(dir), IngestError);
}

TEST_CASE("ingest truncates clips to ten seconds and reports skips") {
    const auto dir = test::temp_dir("ingest-trunc");
    std::vector<double> x(12 * 16000, 0.1);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = 0.3 * std::sin(0.01 * static_cast<double>(i));
    wav_write(dir / "long.wav", {x}, 16000);
    {
        std::ofstream junk(dir / "notes.txt");
        junk << "not audio\n";
    }
    {
        std::ofstream bad(dir / "broken.wav");
        bad << "RIFFgarbage";
    }

    const SourcePool pool = SourcePool::ingest(dir);
    REQUIRE(pool.size() == 1);
    CHECK(pool.at(0).audio.size() == 160000);
    CHECK(pool.report().ingested == 1);
    CHECK(pool.report().skipped.size() == 2);
}

TEST_CASE("chirp endpoints follow the linear frequency law") {
    ChirpSpec spec;
    spec.f0_hz = 2000;
    spec.f1_hz = 6000;
    spec.duration_s = 0.05;
    const Signal x = gen_chirp(spec);

    // Instantaneous frequency from the analytic phase of the known form:
    // measure zero-crossing density over short windows at both ends.
    auto zc_freq = [&x](std::size_t from, std::size_t to) {
        int crossings = 0;
        for (std::size_t i = from + 1; i < to; ++i)
            if ((x.samples[i - 1] < 0.0) != (x.samples[i] < 0.0)) ++crossings;
        return 0.5 * crossings /
               (static_cast<double>(to - from) / kSampleRate);
    };
    const std::size_t n = x.size();
    const double f_start = zc_freq(0, n / 10);
    const double f_end = zc_freq(n - n / 10, n);
    // Mid-window sweep offsets: the window covers 10% of the sweep span.
    CHECK(f_start == doctest::Approx(2200.0).epsilon(0.1));
    CHECK(f_end == doctest::Approx(5800.0).epsilon(0.1));
}

TEST_CASE("chirp matched filter peaks at zero lag") {
    ChirpSpec spec;
    spec.f0_hz = 1500;
    spec.f1_hz = 5500;
    spec.duration_s = 0.03;
    const Signal x = gen_chirp(spec);
    // Full autocorrelation via convolution with the reversed chirp.
    Signal rev = x;
    std::reverse(rev.samples.begin(), rev.samples.end());
    const Signal ac = fft_convolve(x, rev);
    std::size_t arg = 0;
    double best = -1e300;
    for (std::size_t i = 0; i < ac.size(); ++i)
        if (ac.samples[i] > best) {
            best = ac.samples[i];
            arg = i;
        }
    CHECK(arg == x.size() - 1);  // zero lag
}

TEST_CASE("spectrogram ridge slope matches the sweep rate") {
    ChirpSpec spec;
    spec.f0_hz = 2000;
    spec.f1_hz = 6000;
    spec.duration_s = 0.02;
    const Signal x = gen_chirp(spec);

    // Fine STFT for ridge fitting.
    const auto sg = stft(x, 64, 8);
    std::vector<double> t_s, f_hz;
    for (std::size_t t = 1; t + 1 < sg.frames; ++t) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < sg.bins; ++k) {
            const double m = std::norm(sg.at(t, k));
            if (m > best) {
                best = m;
                arg = k;
            }
        }
        if (best <= 0.0) continue;
        t_s.push_back(static_cast<double>(t) * sg.hop_samples / kSampleRate);
        f_hz.push_back(static_cast<double>(arg) * sg.bin_hz);
    }
    REQUIRE(t_s.size() >= 10);
    // Least-squares slope.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(t_s.size());
    for (std::size_t i = 0; i < t_s.size(); ++i) {
        sx += t_s[i];
        sy += f_hz[i];
        sxx += t_s[i] * t_s[i];
        sxy += t_s[i] * f_hz[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(200000.0).epsilon(0.05));
}

TEST_CASE("wider chirp bandwidth sharpens the autocorrelation lobe") {
    auto lobe_width = [](double f1) {
        ChirpSpec spec;
        spec.f0_hz = 2000;
        spec.f1_hz = f1;
        spec.duration_s = 0.03;
        const Signal x = gen_chirp(spec);
        Signal rev = x;
        std::reverse(rev.samples.begin(), rev.samples.end());
        const Signal ac = fft_convolve(x, rev);
        const auto env = analytic_envelope(ac.samples);
        const std::size_t c = x.size() - 1;
        const double half = env[c] / 2.0;
        std::size_t w = 0;
        while (c + w < env.size() && env[c + w] > half) ++w;
        return w;
    };
    CHECK(lobe_width(6000.0) < lobe_width(3000.0));
}

TEST_CASE("chirp spec invariants") {
    ChirpSpec bad;
    bad.f0_hz = 5000;
    bad.f1_hz = 3000;  // inverted sweep
    CHECK_THROWS_AS(gen_chirp(bad), SpecError);
    ChirpSpec high;
    high.f0_hz = 4000;
    high.f1_hz = 9000;  // beyond Nyquist headroom
    CHECK_THROWS_AS(gen_chirp(high), SpecError);
    ChirpSpec slow;
    slow.f0_hz = 1000;
    slow.f1_hz = 2000;
    slow.duration_s = 0.2;  // outside the pulse range
    CHECK_THROWS_AS(gen_chirp(slow), SpecError);
}

TEST_SUITE_END();
