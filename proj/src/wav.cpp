#include "acsim/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "acsim/errors.hpp"

namespace acsim {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0]) |
           (static_cast<std::uint16_t>(p[1]) << 8);
}

void wr_u32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    f.write(reinterpret_cast<char*>(b), 4);
}

void wr_u16(std::ofstream& f, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff)};
    f.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

WavData wav_read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IngestError("wav_read: cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw IngestError("wav_read: not a RIFF/WAVE file: " + path.string());

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t data_off = 0, data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const char* id = reinterpret_cast<const char*>(buf.data() + pos);
        const std::uint32_t len = rd_u32(buf.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0 && body + 16 <= buf.size()) {
            format = rd_u16(buf.data() + body);
            channels = rd_u16(buf.data() + body + 2);
            rate = rd_u32(buf.data() + body + 4);
            bits = rd_u16(buf.data() + body + 14);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = std::min<std::size_t>(len, buf.size() - body);
        }
        pos = body + len + (len & 1);
    }
    if (channels == 0 || rate == 0 || data_off == 0)
        throw IngestError("wav_read: missing fmt/data chunk: " + path.string());

    const bool pcm16 = (format == 1 && bits == 16);
    const bool f32 = (format == 3 && bits == 32);
    if (!pcm16 && !f32)
        throw IngestError("wav_read: unsupported encoding (" +
                          std::to_string(format) + "/" + std::to_string(bits) +
                          " bit): " + path.string());

    const std::size_t bytes_per = bits / 8;
    const std::size_t n_frames = data_len / (bytes_per * channels);
    WavData out;
    out.sample_rate = static_cast<int>(rate);
    out.channels.assign(channels, std::vector<double>(n_frames));
    const unsigned char* p = buf.data() + data_off;
    for (std::size_t i = 0; i < n_frames; ++i) {
        for (std::uint16_t c = 0; c < channels; ++c) {
            if (pcm16) {
                std::int16_t v =
                    static_cast<std::int16_t>(rd_u16(p));
                out.channels[c][i] = static_cast<double>(v) / 32768.0;
                p += 2;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                out.channels[c][i] = static_cast<double>(v);
                p += 4;
            }
        }
    }
    return out;
}

void wav_write(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& channels,
               int sample_rate) {
    if (channels.empty()) throw ParamError("wav_write: no channels");
    const std::size_t n = channels[0].size();
    for (const auto& c : channels)
        if (c.size() != n) throw ParamError("wav_write: channel length mismatch");

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IngestError("wav_write: cannot open " + path.string());

    const auto n_ch = static_cast<std::uint16_t>(channels.size());
    const std::uint32_t data_bytes =
        static_cast<std::uint32_t>(n * n_ch * 4);
    f.write("RIFF", 4);
    wr_u32(f, 36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    wr_u32(f, 16);
    wr_u16(f, 3);  // IEEE float
    wr_u16(f, n_ch);
    wr_u32(f, static_cast<std::uint32_t>(sample_rate));
    wr_u32(f, static_cast<std::uint32_t>(sample_rate) * n_ch * 4);
    wr_u16(f, static_cast<std::uint16_t>(n_ch * 4));
    wr_u16(f, 32);
    f.write("data", 4);
    wr_u32(f, data_bytes);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint16_t c = 0; c < n_ch; ++c) {
            const float v = static_cast<float>(channels[c][i]);
            f.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
    if (!f) throw IngestError("wav_write: write failed: " + path.string());
}

}  // namespace acsim
