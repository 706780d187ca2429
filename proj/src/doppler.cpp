#include "acsim/doppler.hpp"

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"

namespace acsim {

void DopplerSpec::validate() const {
    if (v_mps < kDopplerSpeedMin || v_mps > kDopplerSpeedMax)
        throw SpecError("DopplerSpec: speed out of range");
    if (d0_m < kDopplerDistMin || d0_m > kDopplerDistMax)
        throw SpecError("DopplerSpec: initial distance out of range");
    if (c != kSoundSpeed) throw SpecError("DopplerSpec: c must be 343 m/s");
}

Signal apply_doppler(const Signal& x, const DopplerSpec& spec) {
    spec.validate();
    const double scale = 1.0 - spec.v_mps / spec.c;
    const double offset = spec.d0_m / spec.c;
    return resample_time_map(x, scale, offset);
}

double doppler_shift_pct(const DopplerSpec& spec) {
    spec.validate();
    return 100.0 * (-spec.v_mps / spec.c);
}

}  // namespace acsim
