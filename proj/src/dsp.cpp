#include "acsim/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "acsim/errors.hpp"
#include "acsim/rng.hpp"

namespace acsim {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW plan creation is not thread-safe; executions on distinct buffers are.
// Plans are cached per size and created with FFTW_ESTIMATE so results stay
// deterministic across runs.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan r2c_plan(std::size_t n, double* in, fftw_complex* out) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard lock(fftw_mutex());
    auto it = cache.find(n);
    if (it == cache.end()) {
        fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out,
                                           FFTW_ESTIMATE | FFTW_UNALIGNED);
        it = cache.emplace(n, p).first;
    }
    return it->second;
}

fftw_plan c2r_plan(std::size_t n, fftw_complex* in, double* out) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard lock(fftw_mutex());
    auto it = cache.find(n);
    if (it == cache.end()) {
        fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out,
                                           FFTW_ESTIMATE | FFTW_UNALIGNED);
        it = cache.emplace(n, p).first;
    }
    return it->second;
}

fftw_plan c2c_plan(std::size_t n, bool inverse, fftw_complex* in,
                   fftw_complex* out) {
    static std::map<std::pair<std::size_t, bool>, fftw_plan> cache;
    std::lock_guard lock(fftw_mutex());
    auto key = std::make_pair(n, inverse);
    auto it = cache.find(key);
    if (it == cache.end()) {
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out,
                                       inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        it = cache.emplace(key, p).first;
    }
    return it->second;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

Signal gaussian_noise(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw EmptyInputError("gaussian_noise: n must be positive");
    RngStream rng(seed);
    Signal out;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = rng.normal();
    return out;
}

FilterCoefficients::FilterCoefficients(std::vector<BiquadSection> sections)
    : sections_(std::move(sections)) {
    if (sections_.empty())
        throw ParamError("FilterCoefficients: no sections");
    for (const auto& s : sections_) {
        // Poles of z^2 + a1 z + a2: stable iff |a2| < 1 and |a1| < 1 + a2.
        if (!(std::fabs(s.a2) < 1.0 && std::fabs(s.a1) < 1.0 + s.a2))
            throw ParamError("FilterCoefficients: unstable section");
    }
}

double FilterCoefficients::magnitude_at(double freq_hz, double fs) const {
    const std::complex<double> z =
        std::polar(1.0, -2.0 * kPi * freq_hz / fs);  // z^-1
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : sections_) {
        std::complex<double> num = s.b0 + z * (s.b1 + z * s.b2);
        std::complex<double> den = 1.0 + z * (s.a1 + z * s.a2);
        h *= num / den;
    }
    return std::abs(h);
}

FilterCoefficients design_bandpass(int order, double f_low, double f_high,
                                   double fs) {
    if (order < 1 || order > 12) throw ParamError("design_bandpass: bad order");
    if (f_high >= fs / 2.0) f_high = 0.999 * fs / 2.0;  // top subband clamp
    if (!(0.0 < f_low && f_low < f_high && f_high < fs / 2.0))
        throw ParamError("design_bandpass: band edges out of range");

    // Analog prototype poles on the unit Butterworth circle, prewarped band
    // edges, lowpass->bandpass transform, then bilinear transform. Each
    // prototype pole maps to a conjugate quad; conjugate pairs are grouped
    // into biquads with zeros at z = +1 and z = -1.
    const double w1 = 2.0 * fs * std::tan(kPi * f_low / fs);
    const double w2 = 2.0 * fs * std::tan(kPi * f_high / fs);
    const double bw = w2 - w1;
    const double w0sq = w1 * w2;

    std::vector<std::complex<double>> poles;  // analog bandpass poles
    for (int k = 0; k < order; ++k) {
        const double ang = kPi * (2.0 * k + 1.0) / (2.0 * order) + kPi / 2.0;
        const std::complex<double> p(std::cos(ang), std::sin(ang));
        // s_lp = p  ->  s_bp solves s^2 - p*bw*s + w0^2 = 0
        const std::complex<double> half = 0.5 * p * bw;
        const std::complex<double> disc = std::sqrt(half * half - w0sq);
        poles.push_back(half + disc);
        poles.push_back(half - disc);
    }

    // Bilinear transform: z = (2fs + s) / (2fs - s).
    std::vector<std::complex<double>> zpoles;
    zpoles.reserve(poles.size());
    for (const auto& s : poles)
        zpoles.push_back((2.0 * fs + s) / (2.0 * fs - s));

    // Group into conjugate pairs: sort by imaginary part magnitude, pair each
    // pole with its conjugate partner.
    std::vector<std::complex<double>> upper;
    for (const auto& zp : zpoles)
        if (zp.imag() >= 0.0) upper.push_back(zp);
    std::sort(upper.begin(), upper.end(), [](auto a, auto b) {
        return a.real() < b.real();
    });

    std::vector<BiquadSection> sections;
    sections.reserve(upper.size());
    for (const auto& zp : upper) {
        BiquadSection s;
        s.a1 = -2.0 * zp.real();
        s.a2 = std::norm(zp);
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;  // zeros at +1 and -1
        sections.push_back(s);
    }

    FilterCoefficients coeffs(std::move(sections));

    // Normalize to unit gain at the band's geometric center.
    const double fc = std::sqrt(f_low * f_high);
    const double g = coeffs.magnitude_at(fc, fs);
    if (g <= 0.0) throw ParamError("design_bandpass: degenerate design");
    const double per_section = std::pow(1.0 / g, 1.0 / upper.size());
    std::vector<BiquadSection> scaled = coeffs.sections();
    for (auto& s : scaled) {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }
    return FilterCoefficients(std::move(scaled));
}

Signal filter_apply(const FilterCoefficients& coeffs, const Signal& x) {
    Signal out = x;
    for (const auto& s : coeffs.sections()) {
        // Direct form II transposed, zero initial state.
        double z1 = 0.0, z2 = 0.0;
        for (double& v : out.samples) {
            const double in = v;
            const double y = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * y + z2;
            z2 = s.b2 * in - s.a2 * y;
            v = y;
        }
    }
    if (!out.all_finite()) throw ParamError("filter_apply: non-finite output");
    return out;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x,
                                       std::size_t nfft) {
    if (x.empty()) throw EmptyInputError("rfft: empty input");
    if (nfft < x.size()) throw ParamError("rfft: nfft smaller than input");
    std::vector<double> in(nfft, 0.0);
    std::copy(x.begin(), x.end(), in.begin());
    std::vector<std::complex<double>> out(nfft / 2 + 1);
    fftw_plan plan = r2c_plan(nfft, in.data(),
                              reinterpret_cast<fftw_complex*>(out.data()));
    fftw_execute_dft_r2c(plan, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<std::complex<double>> fft_complex(
    const std::vector<std::complex<double>>& x, bool inverse) {
    if (x.empty()) throw EmptyInputError("fft_complex: empty input");
    std::vector<std::complex<double>> in = x;
    std::vector<std::complex<double>> out(x.size());
    fftw_plan plan = c2c_plan(x.size(), inverse,
                              reinterpret_cast<fftw_complex*>(in.data()),
                              reinterpret_cast<fftw_complex*>(out.data()));
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(x.size());
        for (auto& v : out) v *= inv_n;
    }
    return out;
}

Signal fft_convolve(const Signal& x, const Signal& h) {
    if (x.empty() || h.empty())
        throw EmptyInputError("fft_convolve: empty operand");
    if (x.sample_rate != h.sample_rate)
        throw ParamError("fft_convolve: sample rate mismatch");

    const std::size_t out_len = x.size() + h.size() - 1;
    const std::size_t nfft = next_pow2(out_len);

    std::vector<double> a(nfft, 0.0), b(nfft, 0.0);
    std::copy(x.samples.begin(), x.samples.end(), a.begin());
    std::copy(h.samples.begin(), h.samples.end(), b.begin());

    std::vector<std::complex<double>> fa(nfft / 2 + 1), fb(nfft / 2 + 1);
    fftw_plan fwd = r2c_plan(nfft, a.data(),
                             reinterpret_cast<fftw_complex*>(fa.data()));
    fftw_execute_dft_r2c(fwd, a.data(),
                         reinterpret_cast<fftw_complex*>(fa.data()));
    fftw_execute_dft_r2c(fwd, b.data(),
                         reinterpret_cast<fftw_complex*>(fb.data()));

    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];

    std::vector<double> prod(nfft, 0.0);
    fftw_plan bwd = c2r_plan(nfft, reinterpret_cast<fftw_complex*>(fa.data()),
                             prod.data());
    fftw_execute_dft_c2r(bwd, reinterpret_cast<fftw_complex*>(fa.data()),
                         prod.data());

    Signal out;
    out.sample_rate = x.sample_rate;
    out.samples.resize(out_len);
    const double inv_n = 1.0 / static_cast<double>(nfft);
    for (std::size_t i = 0; i < out_len; ++i) out.samples[i] = prod[i] * inv_n;
    return out;
}

Signal resample_time_map(const Signal& x, double scale, double offset_s) {
    if (!(scale > 0.0)) throw ParamError("resample_time_map: scale <= 0");
    if (x.empty()) throw EmptyInputError("resample_time_map: empty input");

    const double fs = x.sample_rate;
    const double offset_samples = offset_s * fs;
    const std::size_t out_len =
        static_cast<std::size_t>(
            std::ceil(static_cast<double>(x.size()) / scale - 1e-12)) +
        static_cast<std::size_t>(std::ceil(offset_samples - 1e-12));

    Signal out;
    out.sample_rate = x.sample_rate;
    out.samples.resize(out_len, 0.0);
    const auto& src = x.samples;
    const double last = static_cast<double>(src.size() - 1);
    for (std::size_t n = 0; n < out_len; ++n) {
        const double pos = scale * static_cast<double>(n) - offset_samples;
        if (pos < 0.0 || pos > last) continue;
        const std::size_t i0 = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i0);
        if (frac == 0.0) {
            out.samples[n] = src[i0];
        } else {
            out.samples[n] = src[i0] * (1.0 - frac) + src[i0 + 1] * frac;
        }
    }
    return out;
}

ComplexSpectrogram stft(const Signal& x, int window, int hop) {
    if (window < 2 || hop < 1) throw ParamError("stft: bad window/hop");
    if (x.size() < static_cast<std::size_t>(window))
        throw EmptyInputError("stft: input shorter than one window");

    const std::size_t len = x.size();
    const std::size_t n_frames = (len + hop - 1) / hop;
    const int pad = window / 2;

    // Reflection padding (edge excluded), torch-style 'reflect'.
    std::vector<double> padded(len + 2 * pad);
    for (int i = 0; i < pad; ++i) padded[i] = x.samples[pad - i];
    std::copy(x.samples.begin(), x.samples.end(), padded.begin() + pad);
    for (int i = 0; i < pad; ++i)
        padded[pad + len + i] = x.samples[len - 2 - i];

    // Periodic Hann.
    std::vector<double> win(window);
    for (int n = 0; n < window; ++n)
        win[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / window);

    ComplexSpectrogram spec;
    spec.frames = n_frames;
    spec.bins = static_cast<std::size_t>(window / 2 + 1);
    spec.bin_hz = static_cast<double>(x.sample_rate) / window;
    spec.hop_samples = hop;
    spec.data.resize(spec.frames * spec.bins);

    std::vector<double> frame(window);
    std::vector<std::complex<double>> out(spec.bins);
    fftw_plan plan = r2c_plan(window, frame.data(),
                              reinterpret_cast<fftw_complex*>(out.data()));
    for (std::size_t t = 0; t < n_frames; ++t) {
        const std::size_t off = t * hop;
        for (int n = 0; n < window; ++n) frame[n] = padded[off + n] * win[n];
        fftw_execute_dft_r2c(plan, frame.data(),
                             reinterpret_cast<fftw_complex*>(out.data()));
        std::copy(out.begin(), out.end(), spec.data.begin() + t * spec.bins);
    }
    return spec;
}

std::vector<double> analytic_envelope(const std::vector<double>& x) {
    if (x.empty()) throw EmptyInputError("analytic_envelope: empty input");
    const std::size_t n = x.size();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
    auto spec = fft_complex(buf, false);
    // Zero negative frequencies, double positive ones.
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) spec[k] = 0.0;
    auto analytic = fft_complex(spec, true);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
    return env;
}

double dominant_frequency_hz(const Signal& x) {
    if (x.empty()) throw EmptyInputError("dominant_frequency_hz: empty input");
    const std::size_t nfft = next_pow2(x.size());
    auto spec = rfft(x.samples, nfft);
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double m = std::abs(spec[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    double refined = static_cast<double>(best);
    if (best > 0 && best + 1 < spec.size() && best_mag > 0.0) {
        const double l = std::log(std::abs(spec[best - 1]) + 1e-300);
        const double c = std::log(best_mag + 1e-300);
        const double r = std::log(std::abs(spec[best + 1]) + 1e-300);
        const double denom = l - 2.0 * c + r;
        if (std::fabs(denom) > 1e-12) refined += 0.5 * (l - r) / denom;
    }
    return refined * x.sample_rate / static_cast<double>(nfft);
}

}  // namespace acsim
