#ifndef ACSIM_SOURCES_HPP
#define ACSIM_SOURCES_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "acsim/signal.hpp"

namespace acsim {

inline constexpr double kMaxClipSeconds = 10.0;
inline constexpr double kIngestPeak = 0.89;

inline constexpr double kChirpFreqMax = 8000.0;
inline constexpr double kChirpDurMin = 0.005, kChirpDurMax = 0.05;
inline constexpr double kChirpAmplitude = 0.5;
inline constexpr double kChirpLeadSilenceS = 0.1;

struct SourceEntry {
    std::string name;
    double duration_s = 0.0;
    std::vector<std::string> tags;
    Signal audio;  // mono, 16 kHz, peak-normalized
};

struct PoolReport {
    std::size_t ingested = 0;
    std::vector<std::string> skipped;       // "file: reason"
    std::string truncation_policy =
        "clips longer than 10 s are truncated; no padding applied";
    std::string to_json() const;
};

// Immutable once built; safe to share read-only across workers.
class SourcePool {
  public:
    static SourcePool ingest(const std::filesystem::path& dir);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const SourceEntry& at(std::size_t i) const { return entries_.at(i); }
    const PoolReport& report() const { return report_; }

  private:
    std::vector<SourceEntry> entries_;
    PoolReport report_;
};

// Linear FMCW pulse spec: instantaneous frequency sweeps f0 -> f1 over
// duration_s.
struct ChirpSpec {
    double f0_hz = 2000.0;
    double f1_hz = 6000.0;
    double duration_s = 0.02;
    double amplitude = kChirpAmplitude;

    void validate() const;
};

// x(t) = A sin(2 pi (f0 t + (f1 - f0) / (2 T) t^2)).
Signal gen_chirp(const ChirpSpec& spec);

// The transmitted ranging pulse: lead-in silence followed by the chirp.
Signal chirp_pulse(const ChirpSpec& spec);

}  // namespace acsim

#endif
