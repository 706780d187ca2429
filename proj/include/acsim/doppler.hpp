#ifndef ACSIM_DOPPLER_HPP
#define ACSIM_DOPPLER_HPP

#include "acsim/signal.hpp"

namespace acsim {

inline constexpr double kDopplerSpeedMin = -50.0, kDopplerSpeedMax = 50.0;
inline constexpr double kDopplerDistMin = 0.5, kDopplerDistMax = 100.0;

// Relative motion channel: d(t) = d0 + v*t, positive v = receding.
struct DopplerSpec {
    double v_mps = 0.0;
    double d0_m = 1.0;
    double c = kSoundSpeed;

    void validate() const;
};

// y(t) = x((1 - v/c) t - d0/c), realized as linear-interpolation resampling.
// A tone at f is observed at f * (1 - v/c); v = 0 reduces to a pure delay.
Signal apply_doppler(const Signal& x, const DopplerSpec& spec);

// Relative frequency change in percent: 100 * (-v/c). Positive = approaching.
double doppler_shift_pct(const DopplerSpec& spec);

}  // namespace acsim

#endif
