#ifndef ACSIM_MIC_ARRAY_HPP
#define ACSIM_MIC_ARRAY_HPP

#include <utility>

#include "acsim/channel.hpp"

namespace acsim {

inline constexpr double kMicDistMin = 0.08, kMicDistMax = 0.15;  // meters

// Far-field two-microphone geometry. Theta is measured from the array axis
// with the right microphone at 0 degrees; 90 degrees is broadside.
struct ArraySpec {
    double d_m = 0.1;
    double theta_deg = 90.0;
    double c = kSoundSpeed;

    void validate() const;
};

// tau = d cos(theta) / c, signed: positive means the right mic receives later.
double tdoa_from_doa(const ArraySpec& spec);

// Left CIR is the base channel; the right CIR is the base shifted by the
// quantized TDoA. Requires a LOS path in the base channel.
std::pair<ImpulseResponse, ImpulseResponse> binaural_cirs(
    const ImpulseResponse& base, const ArraySpec& spec);

}  // namespace acsim

#endif
