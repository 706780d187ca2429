#include "acsim/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/wav.hpp"

namespace acsim {

namespace fs = std::filesystem;

std::string PoolReport::to_json() const {
    nlohmann::json j;
    j["ingested"] = ingested;
    j["skipped"] = skipped;
    j["truncation_policy"] = truncation_policy;
    return j.dump(2);
}

SourcePool SourcePool::ingest(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw IngestError("ingest: not a directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());  // deterministic order

    SourcePool pool;
    for (const auto& p : files) {
        std::string ext = p.extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext != ".wav") {
            pool.report_.skipped.push_back(p.filename().string() +
                                           ": unsupported format");
            continue;
        }
        WavData wav;
        try {
            wav = wav_read(p);
        } catch (const IngestError& e) {
            pool.report_.skipped.push_back(p.filename().string() + ": " +
                                           e.what());
            continue;
        }
        if (wav.channels.empty() || wav.channels[0].empty()) {
            pool.report_.skipped.push_back(p.filename().string() + ": empty");
            continue;
        }

        // Downmix to mono.
        std::vector<double> mono = wav.channels[0];
        for (std::size_t c = 1; c < wav.channels.size(); ++c)
            for (std::size_t i = 0; i < mono.size(); ++i)
                mono[i] = mono[i] + wav.channels[c][i];
        if (wav.channels.size() > 1)
            for (double& v : mono) v /= static_cast<double>(wav.channels.size());

        Signal sig(std::move(mono), wav.sample_rate);
        if (wav.sample_rate != kSampleRate) {
            const double scale =
                static_cast<double>(wav.sample_rate) / kSampleRate;
            sig = resample_time_map(sig, scale, 0.0);
            sig.sample_rate = kSampleRate;
        }

        const auto max_len =
            static_cast<std::size_t>(kMaxClipSeconds * kSampleRate);
        if (sig.size() > max_len) sig.samples.resize(max_len);
        if (sig.size() < static_cast<std::size_t>(kStftWindow)) {
            pool.report_.skipped.push_back(p.filename().string() +
                                           ": too short");
            continue;
        }

        const double peak = sig.peak();
        if (peak <= 0.0) {
            pool.report_.skipped.push_back(p.filename().string() + ": silent");
            continue;
        }
        const double g = kIngestPeak / peak;
        for (double& v : sig.samples) v *= g;

        SourceEntry entry;
        entry.name = p.filename().string();
        entry.duration_s = sig.duration_s();
        entry.audio = std::move(sig);
        pool.entries_.push_back(std::move(entry));
    }
    pool.report_.ingested = pool.entries_.size();
    if (pool.entries_.empty())
        throw IngestError("ingest: no decodable audio in " + dir.string());
    return pool;
}

void ChirpSpec::validate() const {
    if (!(0.0 < f0_hz && f0_hz < f1_hz && f1_hz < kChirpFreqMax))
        throw SpecError("ChirpSpec: frequencies must satisfy 0 < f0 < f1 < 8000");
    if (duration_s < kChirpDurMin || duration_s > kChirpDurMax)
        throw SpecError("ChirpSpec: duration out of range");
    if (amplitude <= 0.0 || amplitude > 1.0)
        throw SpecError("ChirpSpec: bad amplitude");
}

Signal gen_chirp(const ChirpSpec& spec) {
    spec.validate();
    const auto n =
        static_cast<std::size_t>(std::llround(spec.duration_s * kSampleRate));
    Signal out;
    out.samples.resize(n);
    const double rate = (spec.f1_hz - spec.f0_hz) / (2.0 * spec.duration_s);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / kSampleRate;
        out.samples[i] =
            spec.amplitude *
            std::sin(2.0 * std::numbers::pi * (spec.f0_hz * t + rate * t * t));
    }
    return out;
}

Signal chirp_pulse(const ChirpSpec& spec) {
    Signal chirp = gen_chirp(spec);
    const auto lead =
        static_cast<std::size_t>(std::llround(kChirpLeadSilenceS * kSampleRate));
    Signal out;
    out.samples.assign(lead, 0.0);
    out.samples.insert(out.samples.end(), chirp.samples.begin(),
                       chirp.samples.end());
    return out;
}

}  // namespace acsim
