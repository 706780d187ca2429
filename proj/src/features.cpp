#include "acsim/features.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include <nlohmann/json.hpp>

#include "acsim/errors.hpp"

namespace acsim {

SpectralFeatures extract_features(const Signal& x) {
    if (x.size() < static_cast<std::size_t>(kStftWindow))
        throw EmptyInputError("extract_features: input shorter than one window");
    const ComplexSpectrogram spec = stft(x);

    SpectralFeatures f;
    f.frames = spec.frames;
    const std::size_t n = spec.frames * spec.bins;
    f.log_magnitude.resize(n);
    f.phase_sin.resize(n);
    f.phase_cos.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double>& v = spec.data[i];
        const double mag = std::abs(v);
        f.log_magnitude[i] = std::log(mag + kLogMagFloor);
        if (mag > 0.0) {
            f.phase_sin[i] = v.imag() / mag;
            f.phase_cos[i] = v.real() / mag;
        } else {
            f.phase_sin[i] = 0.0;
            f.phase_cos[i] = 1.0;  // zero phase for exact-zero bins
        }
    }
    return f;
}

void save_features(const std::filesystem::path& path,
                   const SpectralFeatures& f) {
    nlohmann::json header;
    header["shape"] = {3, f.frames, SpectralFeatures::bins};
    header["dtype"] = "float32";
    header["channels"] = {"log_magnitude", "phase_sin", "phase_cos"};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("save_features: cannot open " + path.string());
    out << header.dump() << '\n';
    auto dump_plane = [&out](const std::vector<double>& plane) {
        for (double v : plane) {
            const float fv = static_cast<float>(v);
            out.write(reinterpret_cast<const char*>(&fv), 4);
        }
    };
    dump_plane(f.log_magnitude);
    dump_plane(f.phase_sin);
    dump_plane(f.phase_cos);
    if (!out) throw IngestError("save_features: write failed: " + path.string());
}

SpectralFeatures load_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("load_features: cannot open " + path.string());
    std::string header_line;
    std::getline(in, header_line);
    const auto header = nlohmann::json::parse(header_line);
    const auto shape = header.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3 || shape[0] != 3 ||
        shape[2] != SpectralFeatures::bins)
        throw IngestError("load_features: unexpected shape in " + path.string());

    SpectralFeatures f;
    f.frames = shape[1];
    const std::size_t n = f.frames * SpectralFeatures::bins;
    auto read_plane = [&in, n, &path]() {
        std::vector<double> plane(n);
        for (std::size_t i = 0; i < n; ++i) {
            float v;
            in.read(reinterpret_cast<char*>(&v), 4);
            plane[i] = v;
        }
        if (!in)
            throw IngestError("load_features: truncated file: " + path.string());
        return plane;
    };
    f.log_magnitude = read_plane();
    f.phase_sin = read_plane();
    f.phase_cos = read_plane();
    return f;
}

}  // namespace acsim
