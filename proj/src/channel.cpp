#include "acsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/rng.hpp"

namespace acsim {

void PathSpec::validate() const {
    if (delay_s < 0.0) throw SpecError("PathSpec: negative delay");
    if (kind == PathKind::kLos) {
        if (amplitude < kLosAmpMin || amplitude > kLosAmpMax)
            throw SpecError("PathSpec: LOS amplitude out of range");
        if (freq_factor != 1.0 || decay_factor != 1.0)
            throw SpecError("PathSpec: LOS factors must be 1.0");
    } else {
        if (amplitude < kReflAmpMin || amplitude > kReflAmpMax)
            throw SpecError("PathSpec: reflection amplitude out of range");
        if (freq_factor < kReflFreqFactorMin || freq_factor > kReflFreqFactorMax)
            throw SpecError("PathSpec: reflection freq factor out of range");
        if (decay_factor < kReflDecayFactorMin ||
            decay_factor > kReflDecayFactorMax)
            throw SpecError("PathSpec: reflection decay factor out of range");
    }
}

void ReverbSpec::validate() const {
    if (decay_rates.empty()) throw SpecError("ReverbSpec: no decay rates");
    for (double l : decay_rates)
        if (l < kReverbLambdaMin || l > kReverbLambdaMax)
            throw SpecError("ReverbSpec: lambda out of range");
    if (band_edges != kReverbBands)
        throw SpecError("ReverbSpec: band edges must be the six fixed bands");
    if (duration_s != kReverbDurationS)
        throw SpecError("ReverbSpec: duration must be 2.0 s");
    if (onset_s < 0.0) throw SpecError("ReverbSpec: negative onset");
}

double ReverbSpec::mean_lambda() const {
    double s = 0.0;
    for (double l : decay_rates) s += l;
    return s / static_cast<double>(decay_rates.size());
}

Signal damped_sinusoid(double freq_hz, double decay_hz, double duration_s,
                       int fs) {
    if (freq_hz <= 0.0 || decay_hz <= 0.0)
        throw ParamError("damped_sinusoid: freq and decay must be positive");
    if (duration_s <= 0.0) throw ParamError("damped_sinusoid: bad duration");
    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    Signal out;
    out.sample_rate = fs;
    out.samples.resize(n);
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    const double a = decay_hz / fs;
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = std::cos(w * i) * std::exp(-a * static_cast<double>(i));
    return out;
}

std::pair<int, Signal> synth_path(const PathSpec& spec) {
    spec.validate();
    Signal kernel = damped_sinusoid(kPathBaseFreqHz * spec.freq_factor,
                                    kPathBaseDecayHz * spec.decay_factor,
                                    kPathDurationS);
    for (double& v : kernel.samples) v *= spec.amplitude;
    const int delay = static_cast<int>(std::llround(spec.delay_s * kSampleRate));
    return {delay, std::move(kernel)};
}

Signal synth_reverb(const ReverbSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto n =
        static_cast<std::size_t>(std::llround(spec.duration_s * kSampleRate));
    Signal tail;
    tail.samples.assign(n, 0.0);

    for (std::size_t b = 0; b < spec.band_edges.size(); ++b) {
        RngStream stream = RngStream::derive(seed, "reverb-band", b);
        Signal noise = gaussian_noise(n, stream.state());
        auto coeffs = design_bandpass(4, spec.band_edges[b].first,
                                      spec.band_edges[b].second, kSampleRate);
        Signal sub = filter_apply(coeffs, noise);
        const double lambda = spec.decay_rates[b];
        for (std::size_t i = 0; i < n; ++i)
            tail.samples[i] +=
                sub.samples[i] * std::exp(-lambda * static_cast<double>(i) /
                                          kSampleRate);
    }
    return tail;
}

ImpulseResponse compose_cir(const std::vector<PathSpec>& paths,
                            const std::optional<ReverbSpec>& reverb,
                            std::uint64_t seed) {
    if (paths.empty() && !reverb)
        throw SpecError("compose_cir: channel has no components");

    struct Placed {
        ComponentKind kind;
        int delay;
        double amplitude;
        Signal kernel;
    };
    std::vector<Placed> placed;
    int earliest = 0;
    bool have_path = false;
    for (const auto& p : paths) {
        auto [delay, kernel] = synth_path(p);
        if (!have_path || delay < earliest) earliest = delay;
        have_path = true;
        placed.push_back({p.kind == PathKind::kLos
                              ? ComponentKind::kLos
                              : ComponentKind::kEarlyReflection,
                          delay, p.amplitude, std::move(kernel)});
    }

    std::optional<Signal> tail;
    int tail_onset = 0;
    if (reverb) {
        tail = synth_reverb(*reverb, seed);
        tail_onset = reverb->onset_s > 0.0
                         ? static_cast<int>(std::llround(reverb->onset_s *
                                                         kSampleRate))
                         : (have_path ? earliest : 0);
    }

    std::size_t total = 0;
    for (const auto& pl : placed)
        total = std::max(total, static_cast<std::size_t>(pl.delay) +
                                    pl.kernel.size());
    if (tail)
        total = std::max(total, static_cast<std::size_t>(tail_onset) +
                                    tail->size());

    ImpulseResponse ir;
    ir.samples.samples.assign(total, 0.0);
    for (const auto& pl : placed) {
        for (std::size_t i = 0; i < pl.kernel.size(); ++i)
            ir.samples.samples[pl.delay + i] += pl.kernel.samples[i];
        ir.component_log.push_back({pl.kind, pl.delay, pl.amplitude});
    }
    if (tail) {
        for (std::size_t i = 0; i < tail->size(); ++i)
            ir.samples.samples[tail_onset + i] += tail->samples[i];
        ir.component_log.push_back({ComponentKind::kReverbTail, tail_onset, 1.0});
    }
    return ir;
}

}  // namespace acsim
