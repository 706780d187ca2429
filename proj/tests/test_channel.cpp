#include <doctest.h>

#include <cmath>

#include "acsim/channel.hpp"
#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/rng.hpp"
#include "acsim/verify.hpp"
#include "helpers.hpp"

using namespace acsim;

TEST_SUITE_BEGIN("channel");

TEST_CASE("damped sinusoid starts at unity") {
    const Signal z = damped_sinusoid(2000, 8000, 0.01);
    CHECK(z.samples[0] == 1.0);
}

TEST_CASE("damped sinusoid envelope decays to 1/e at the decay time") {
    // At n = fs/decay the closed form gives exactly e^-1; remove the phase by
    // dividing out the known cosine (freq chosen so it is nonzero there).
    const double decay = 8000.0;
    const Signal z = damped_sinusoid(1000, decay, 0.01);
    const int n = static_cast<int>(std::lround(16000.0 / decay));
    const double phase = std::cos(2.0 * std::numbers::pi * 1000.0 * n / 16000.0);
    const double env = z.samples[n] / phase;
    CHECK(env == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("damped sinusoid at the canonical parameters spans 160 samples") {
    const Signal z = damped_sinusoid(2000, 8000, 0.01, 16000);
    CHECK(z.size() == 160);
}

TEST_CASE("synth_path scales the kernel by the path amplitude") {
    PathSpec p;
    p.kind = PathKind::kLos;
    p.delay_s = 0.0;
    p.amplitude = 5.0;
    const auto [delay, kernel] = synth_path(p);
    CHECK(delay == 0);
    CHECK(kernel.samples[0] == 5.0);
}

TEST_CASE("synth_path frequency factor shifts the kernel resonance") {
    PathSpec p;
    p.kind = PathKind::kEarlyReflection;
    p.delay_s = 0.005;
    p.amplitude = 0.3;
    p.freq_factor = 1.2;
    p.decay_factor = 1.0;
    const auto [delay, kernel] = synth_path(p);
    CHECK(delay == 80);
    CHECK(dominant_frequency_hz(kernel) ==
          doctest::Approx(2400.0).epsilon(0.03));
}

TEST_CASE("synth_path rejects invariant violations") {
    PathSpec p;
    p.kind = PathKind::kLos;
    p.amplitude = 1.0;  // below the direct-path range
    CHECK_THROWS_AS(synth_path(p), SpecError);
    p.amplitude = 10.0;
    p.freq_factor = 1.1;  // direct path must keep factors at 1
    CHECK_THROWS_AS(synth_path(p), SpecError);
    PathSpec r;
    r.kind = PathKind::kEarlyReflection;
    r.amplitude = 0.7;  // above the reflection range
    CHECK_THROWS_AS(synth_path(r), SpecError);
}

TEST_CASE("uniform amplitude draws match their ranges (KS)") {
    RngStream rng(4242);
    std::vector<double> los, refl;
    for (int i = 0; i < 10000; ++i) {
        los.push_back(rng.uniform(kLosAmpMin, kLosAmpMax));
        refl.push_back(rng.uniform(kReflAmpMin, kReflAmpMax));
    }
    const double d1 = test::ks_statistic_uniform(los, kLosAmpMin, kLosAmpMax);
    const double d2 =
        test::ks_statistic_uniform(refl, kReflAmpMin, kReflAmpMax);
    CHECK(test::ks_pvalue(d1, los.size()) > 0.01);
    CHECK(test::ks_pvalue(d2, refl.size()) > 0.01);
}

TEST_CASE("reverb tail length and determinism") {
    ReverbSpec spec;
    spec.decay_rates.fill(10.0);
    const Signal a = synth_reverb(spec, 5);
    const Signal b = synth_reverb(spec, 5);
    CHECK(a.size() == 32000);
    CHECK(a.samples == b.samples);
    const Signal c = synth_reverb(spec, 6);
    CHECK(a.samples != c.samples);
}

TEST_CASE("fast decay rates shorten the reverberation time") {
    ReverbSpec spec;
    spec.decay_rates.fill(60.0);
    ImpulseResponse ir;
    ir.samples = synth_reverb(spec, 11);
    const double rt = estimate_rt60(ir);
    CHECK(rt == doctest::Approx(0.0576).epsilon(0.25));
}

TEST_CASE("slow decay rates stretch the reverberation time") {
    ReverbSpec spec;
    spec.decay_rates.fill(1.5);
    ImpulseResponse ir;
    ir.samples = synth_reverb(spec, 12);
    const double rt = estimate_rt60(ir);
    CHECK(rt > 1.5);
    CHECK(rt < 2.9);
}

TEST_CASE("reverb time is monotone in the decay rate") {
    double last = 1e9;
    for (double lambda : {3.0, 10.0, 30.0}) {
        ReverbSpec spec;
        spec.decay_rates.fill(lambda);
        ImpulseResponse ir;
        ir.samples = synth_reverb(spec, 21);
        const double rt = estimate_rt60(ir);
        CHECK(rt < last);
        last = rt;
    }
}

TEST_CASE("malformed reverb spec is rejected") {
    ReverbSpec spec;
    spec.decay_rates.fill(0.0);  // outside the lambda range
    CHECK_THROWS_AS(synth_reverb(spec, 1), SpecError);
    ReverbSpec bad_bands;
    bad_bands.decay_rates.fill(10.0);
    bad_bands.band_edges[0] = {10.0, 100.0};
    CHECK_THROWS_AS(synth_reverb(bad_bands, 1), SpecError);
}

TEST_CASE("single direct path composes to a scaled kernel") {
    PathSpec p;
    p.kind = PathKind::kLos;
    p.delay_s = 0.0;
    p.amplitude = 7.5;
    const ImpulseResponse ir = compose_cir({p}, std::nullopt, 0);
    const Signal z = damped_sinusoid(2000, 8000, 0.01);
    REQUIRE(ir.samples.size() == z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        CHECK(ir.samples.samples[i] == doctest::Approx(7.5 * z.samples[i]));
    REQUIRE(ir.component_log.size() == 1);
    CHECK(ir.component_log[0].kind == ComponentKind::kLos);
}

TEST_CASE("direct plus echo keeps the amplitude separation") {
    PathSpec los;
    los.kind = PathKind::kLos;
    los.delay_s = 10.0 / 16000.0;
    los.amplitude = 5.0;
    PathSpec echo;
    echo.kind = PathKind::kEarlyReflection;
    echo.delay_s = 100.0 / 16000.0;
    echo.amplitude = 0.5;
    const ImpulseResponse ir = compose_cir({los, echo}, std::nullopt, 0);

    REQUIRE(ir.component_log.size() == 2);
    CHECK(ir.component_log[0].delay_samples == 10);
    CHECK(ir.component_log[1].delay_samples == 100);

    double tail_peak = 0.0;
    for (std::size_t i = 100; i < ir.samples.size(); ++i)
        tail_peak = std::max(tail_peak, std::fabs(ir.samples.samples[i]));
    CHECK(std::fabs(ir.samples.samples[10]) / tail_peak >= 10.0);
}

TEST_CASE("empty channel is rejected") {
    CHECK_THROWS_AS(compose_cir({}, std::nullopt, 0), SpecError);
}

TEST_CASE("impulse responses are causal") {
    RngStream rng(31337);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<PathSpec> paths;
        PathSpec los;
        los.kind = PathKind::kLos;
        los.delay_s = rng.uniform(0.001, 0.03);
        los.amplitude = rng.uniform(kLosAmpMin, kLosAmpMax);
        paths.push_back(los);
        const int n_refl = static_cast<int>(rng.uniform_int(4));
        for (int i = 0; i < n_refl; ++i) {
            PathSpec r;
            r.kind = PathKind::kEarlyReflection;
            r.delay_s = los.delay_s + rng.uniform(0.001, 0.05);
            r.amplitude = rng.uniform(kReflAmpMin, kReflAmpMax);
            r.freq_factor = rng.uniform(kReflFreqFactorMin, kReflFreqFactorMax);
            r.decay_factor =
                rng.uniform(kReflDecayFactorMin, kReflDecayFactorMax);
            paths.push_back(r);
        }
        std::optional<ReverbSpec> reverb;
        if (rng.coin()) {
            ReverbSpec spec;
            for (auto& l : spec.decay_rates)
                l = rng.uniform(kReverbLambdaMin, kReverbLambdaMax);
            reverb = spec;
        }
        const ImpulseResponse ir = compose_cir(paths, reverb, rng.next_u64());

        int earliest = 1 << 30;
        for (const auto& c : ir.component_log)
            earliest = std::min(earliest, c.delay_samples);
        for (int i = 0; i < earliest; ++i)
            CHECK(std::fabs(ir.samples.samples[i]) < 1e-9);
    }
}

TEST_CASE("direct path dominates the early window when present") {
    RngStream rng(999);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<PathSpec> paths;
        PathSpec los;
        los.kind = PathKind::kLos;
        los.delay_s = rng.uniform(0.001, 0.02);
        los.amplitude = rng.uniform(kLosAmpMin, kLosAmpMax);
        paths.push_back(los);
        for (int i = 0; i < 3; ++i) {
            PathSpec r;
            r.kind = PathKind::kEarlyReflection;
            r.delay_s = los.delay_s + rng.uniform(0.001, 0.05);
            r.amplitude = rng.uniform(kReflAmpMin, kReflAmpMax);
            r.freq_factor = rng.uniform(kReflFreqFactorMin, kReflFreqFactorMax);
            r.decay_factor =
                rng.uniform(kReflDecayFactorMin, kReflDecayFactorMax);
            paths.push_back(r);
        }
        const ImpulseResponse ir = compose_cir(paths, std::nullopt, 0);
        const int d = ir.component_log[0].delay_samples;
        std::size_t argmax = d;
        double best = 0.0;
        for (std::size_t i = d; i < std::min<std::size_t>(d + 160,
                                                          ir.samples.size());
             ++i) {
            if (std::fabs(ir.samples.samples[i]) > best) {
                best = std::fabs(ir.samples.samples[i]);
                argmax = i;
            }
        }
        CHECK(argmax == static_cast<std::size_t>(d));
    }
}

TEST_SUITE_END();
