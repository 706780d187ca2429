#ifndef ACSIM_WAV_HPP
#define ACSIM_WAV_HPP

#include <filesystem>
#include <vector>

#include "acsim/signal.hpp"

namespace acsim {

struct WavData {
    int sample_rate = 0;
    std::vector<std::vector<double>> channels;
};

// Reads 16-bit PCM or 32-bit float RIFF/WAVE files. Throws IngestError on
// anything it cannot decode.
WavData wav_read(const std::filesystem::path& path);

// Writes 32-bit float PCM. All channels must have equal length.
void wav_write(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& channels,
               int sample_rate = kSampleRate);

inline void wav_write_mono(const std::filesystem::path& path, const Signal& s) {
    wav_write(path, {s.samples}, s.sample_rate);
}

}  // namespace acsim

#endif
