#ifndef ACSIM_FEATURES_HPP
#define ACSIM_FEATURES_HPP

#include <filesystem>
#include <vector>

#include "acsim/dsp.hpp"
#include "acsim/signal.hpp"

namespace acsim {

inline constexpr double kLogMagFloor = 1e-10;

// Three-channel time-frequency representation: log magnitude plus the sine
// and cosine of the STFT phase (avoids wraparound discontinuities).
struct SpectralFeatures {
    std::size_t frames = 0;
    static constexpr std::size_t bins = kStftBins;
    std::vector<double> log_magnitude;  // frames x bins, row-major
    std::vector<double> phase_sin;
    std::vector<double> phase_cos;

    double mag_at(std::size_t f, std::size_t b) const {
        return log_magnitude[f * bins + b];
    }
    double sin_at(std::size_t f, std::size_t b) const {
        return phase_sin[f * bins + b];
    }
    double cos_at(std::size_t f, std::size_t b) const {
        return phase_cos[f * bins + b];
    }
};

SpectralFeatures extract_features(const Signal& x);

// Flat float32 tensor with a JSON header line: shape [3, frames, 128],
// channel order [log_magnitude, phase_sin, phase_cos].
void save_features(const std::filesystem::path& path,
                   const SpectralFeatures& f);
SpectralFeatures load_features(const std::filesystem::path& path);

}  // namespace acsim

#endif
