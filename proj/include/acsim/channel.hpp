#ifndef ACSIM_CHANNEL_HPP
#define ACSIM_CHANNEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acsim/signal.hpp"

namespace acsim {

// Canonical damped-sinusoid path parameters. The direct path always uses the
// base values; reflections scale them by their freq/decay factors.
inline constexpr double kPathBaseFreqHz = 2000.0;
inline constexpr double kPathBaseDecayHz = 8000.0;
inline constexpr double kPathDurationS = 0.01;

inline constexpr double kLosAmpMin = 5.0, kLosAmpMax = 20.0;
inline constexpr double kReflAmpMin = 0.1, kReflAmpMax = 0.5;
inline constexpr double kReflFreqFactorMin = 0.8, kReflFreqFactorMax = 1.2;
inline constexpr double kReflDecayFactorMin = 1.0, kReflDecayFactorMax = 1.5;

// The six fixed reverberation subbands (Hz).
inline constexpr std::array<std::pair<double, double>, 6> kReverbBands = {{
    {50.0, 200.0},
    {200.0, 500.0},
    {500.0, 1000.0},
    {1000.0, 2000.0},
    {2000.0, 4000.0},
    {4000.0, 8000.0},
}};
inline constexpr double kReverbDurationS = 2.0;
inline constexpr double kReverbLambdaMin = 1.5, kReverbLambdaMax = 60.0;

enum class PathKind { kLos, kEarlyReflection };

struct PathSpec {
    PathKind kind = PathKind::kLos;
    double delay_s = 0.0;
    double amplitude = 0.0;
    double freq_factor = 1.0;
    double decay_factor = 1.0;

    void validate() const;  // throws SpecError on invariant violation
};

struct ReverbSpec {
    std::array<double, 6> decay_rates{};  // lambda_i per subband
    std::array<std::pair<double, double>, 6> band_edges = kReverbBands;
    double duration_s = kReverbDurationS;
    double onset_s = 0.0;

    void validate() const;
    double mean_lambda() const;
};

enum class ComponentKind { kLos, kEarlyReflection, kReverbTail };

struct IrComponent {
    ComponentKind kind;
    int delay_samples;
    double amplitude;
};

// A sampled channel impulse response plus the bookkeeping needed to derive
// ground-truth labels from the synthesized components.
struct ImpulseResponse {
    Signal samples;
    std::vector<IrComponent> component_log;
};

// z(t) = cos(2 pi f t) exp(-a t), sampled at fs over duration_s.
Signal damped_sinusoid(double freq_hz, double decay_hz, double duration_s,
                       int fs = kSampleRate);

// Returns the integer-sample delay and the scaled kernel for a path.
std::pair<int, Signal> synth_path(const PathSpec& spec);

// Decaying band-filtered noise tail: sum over the six subbands of
// bandpass(noise) * exp(-lambda_i t). 32000 samples, deterministic per seed.
Signal synth_reverb(const ReverbSpec& spec, std::uint64_t seed);

// Sum of placed path kernels plus the optional reverb tail. The tail onset is
// the earliest path delay unless the spec pins one. Throws SpecError if both
// paths and reverb are absent.
ImpulseResponse compose_cir(const std::vector<PathSpec>& paths,
                            const std::optional<ReverbSpec>& reverb,
                            std::uint64_t seed);

}  // namespace acsim

#endif
