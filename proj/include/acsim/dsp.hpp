#ifndef ACSIM_DSP_HPP
#define ACSIM_DSP_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "acsim/signal.hpp"

namespace acsim {

// STFT geometry shared by the feature extractor: 254-sample Hann window,
// 10 ms hop, 254/2 + 1 = 128 unique bins for real input.
inline constexpr int kStftWindow = 254;
inline constexpr int kStftHop = 160;
inline constexpr int kStftBins = kStftWindow / 2 + 1;

// n i.i.d. standard-normal samples, bit-reproducible per seed.
Signal gaussian_noise(std::size_t n, std::uint64_t seed);

struct BiquadSection {
    double b0, b1, b2;  // numerator
    double a1, a2;      // denominator (a0 == 1)
};

// Cascaded second-order sections. Construction verifies every section has its
// poles strictly inside the unit circle.
class FilterCoefficients {
  public:
    explicit FilterCoefficients(std::vector<BiquadSection> sections);
    const std::vector<BiquadSection>& sections() const { return sections_; }

    // |H(e^{j 2 pi f / fs})| evaluated analytically; the test oracle for the
    // designed response.
    double magnitude_at(double freq_hz, double fs) const;

  private:
    std::vector<BiquadSection> sections_;
};

// Butterworth bandpass, `order` = analog prototype order (so 2*order poles).
// The upper edge is clamped to 0.999 * Nyquist when it reaches fs/2.
FilterCoefficients design_bandpass(int order, double f_low, double f_high,
                                   double fs);

// Causal forward pass, zero initial state, same length as the input.
Signal filter_apply(const FilterCoefficients& coeffs, const Signal& x);

// Full linear convolution via FFT, length len(x) + len(h) - 1.
Signal fft_convolve(const Signal& x, const Signal& h);

// output[n] = x evaluated (linear interpolation) at time scale*n/fs - offset.
// Samples mapping outside the support of x are zero. Output length is
// ceil(len(x)/scale) + ceil(offset*fs). A tone at f comes out at f*scale.
Signal resample_time_map(const Signal& x, double scale, double offset_s);

struct ComplexSpectrogram {
    std::size_t frames = 0;
    std::size_t bins = 0;
    double bin_hz = 0.0;
    int hop_samples = 0;
    std::vector<std::complex<double>> data;  // frames x bins, row-major

    const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
        return data[frame * bins + bin];
    }
};

// Hann-windowed STFT with reflection padding of window/2 on both ends, so the
// frame count is ceil(len/hop). Requires len(x) >= window.
ComplexSpectrogram stft(const Signal& x, int window = kStftWindow,
                        int hop = kStftHop);

// --- FFT utilities shared by estimators and tests ---

// One-sided spectrum of a real signal, nfft/2 + 1 bins (nfft >= len(x),
// zero-padded).
std::vector<std::complex<double>> rfft(const std::vector<double>& x,
                                       std::size_t nfft);

std::vector<std::complex<double>> fft_complex(
    const std::vector<std::complex<double>>& x, bool inverse);

// Magnitude envelope of the analytic signal (Hilbert via FFT).
std::vector<double> analytic_envelope(const std::vector<double>& x);

// Frequency of the dominant spectral peak, refined with parabolic
// interpolation of log magnitude.
double dominant_frequency_hz(const Signal& x);

}  // namespace acsim

#endif
