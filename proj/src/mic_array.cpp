#include "acsim/mic_array.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acsim/errors.hpp"

namespace acsim {

void ArraySpec::validate() const {
    if (d_m < kMicDistMin || d_m > kMicDistMax)
        throw SpecError("ArraySpec: mic distance out of range");
    if (theta_deg < 0.0 || theta_deg > 180.0)
        throw SpecError("ArraySpec: DoA out of range");
    if (c != kSoundSpeed) throw SpecError("ArraySpec: c must be 343 m/s");
}

double tdoa_from_doa(const ArraySpec& spec) {
    spec.validate();
    return spec.d_m * std::cos(spec.theta_deg * std::numbers::pi / 180.0) /
           spec.c;
}

std::pair<ImpulseResponse, ImpulseResponse> binaural_cirs(
    const ImpulseResponse& base, const ArraySpec& spec) {
    const bool has_los =
        std::any_of(base.component_log.begin(), base.component_log.end(),
                    [](const IrComponent& c) {
                        return c.kind == ComponentKind::kLos;
                    });
    if (!has_los)
        throw SpecError("binaural_cirs: base channel has no LOS path");

    const double tau = tdoa_from_doa(spec);
    const int shift = static_cast<int>(std::llround(tau * kSampleRate));

    ImpulseResponse left = base;
    ImpulseResponse right;
    right.samples.sample_rate = base.samples.sample_rate;

    if (shift >= 0) {
        right.samples.samples.assign(base.samples.size() + shift, 0.0);
        std::copy(base.samples.samples.begin(), base.samples.samples.end(),
                  right.samples.samples.begin() + shift);
    } else {
        // Negative TDoA advances the right channel; the scenario sampler
        // guarantees enough leading headroom before the earliest component.
        int earliest = base.samples.size() ? 1 << 30 : 0;
        for (const auto& c : base.component_log)
            earliest = std::min(earliest, c.delay_samples);
        if (earliest + shift < 0)
            throw SpecError("binaural_cirs: not enough headroom to advance");
        right.samples.samples.assign(base.samples.samples.begin() - shift,
                                     base.samples.samples.end());
    }
    for (const auto& c : base.component_log)
        right.component_log.push_back(
            {c.kind, c.delay_samples + shift, c.amplitude});
    return {std::move(left), std::move(right)};
}

}  // namespace acsim
