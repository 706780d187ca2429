#ifndef ACSIM_SIGNAL_HPP
#define ACSIM_SIGNAL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace acsim {

inline constexpr int kSampleRate = 16000;     // Hz, fixed project-wide
inline constexpr double kSoundSpeed = 343.0;  // m/s

// A mono audio buffer. Samples are dimensionless amplitudes, nominally within
// +-1.0 full scale for rendered audio; impulse responses use physical path
// amplitudes and may exceed that.
struct Signal {
    std::vector<double> samples;
    int sample_rate = kSampleRate;

    Signal() = default;
    explicit Signal(std::vector<double> s, int fs = kSampleRate)
        : samples(std::move(s)), sample_rate(fs) {}

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }

    double peak() const {
        double p = 0.0;
        for (double v : samples) p = std::max(p, std::fabs(v));
        return p;
    }

    double rms() const {
        if (samples.empty()) return 0.0;
        double e = 0.0;
        for (double v : samples) e += v * v;
        return std::sqrt(e / samples.size());
    }

    bool all_finite() const {
        for (double v : samples)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace acsim

#endif
