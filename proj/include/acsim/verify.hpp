#ifndef ACSIM_VERIFY_HPP
#define ACSIM_VERIFY_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acsim/channel.hpp"
#include "acsim/dataset.hpp"
#include "acsim/signal.hpp"

namespace acsim {

// Argmax of the cross-correlation over lags in [-max_lag, max_lag].
// Positive lag = right channel arrives later.
int estimate_tdoa_xcorr(const Signal& left, const Signal& right, int max_lag);

// Time-scale grid search matched to the resampling channel; returns the
// frequency-shift percentage under the same sign convention as
// doppler_shift_pct (positive = approaching).
double estimate_doppler_pct(const Signal& source, const Signal& received);

// Schroeder backward integration; fits the -5..-25 dB stretch of
// 20*log10(EDC/EDC(0)) and extrapolates to -60 dB.
double estimate_rt60(const ImpulseResponse& ir);

// Matched filter with a Hann-tapered replica of the pulse; returns the
// sample separation between the direct arrival and the strongest echo.
int estimate_tof_matched(const Signal& received, const Signal& pulse);

// First-arrival strength test on the impulse response: fits the canonical
// direct-path kernel at the estimated onset and thresholds the fitted
// amplitude (direct paths are 5-20, reflections at most 0.5).
bool estimate_los_present(const ImpulseResponse& ir);
double los_first_arrival_strength(const ImpulseResponse& ir);
inline constexpr double kLosStrengthThreshold = 3.0;

// theta = arccos(tau c / d) in degrees, signed ratio.
double doa_from_tdoa(double tdoa_s, double d_m, double c = kSoundSpeed);

// One-way distance from a round-trip time of flight.
double distance_from_tof(double tof_ms, double c = kSoundSpeed);

struct Prediction {
    std::string id;
    std::string answer_text;
};

struct TaskScore {
    std::size_t n = 0;
    std::size_t parsed = 0;
    std::size_t aux_n = 0;        // categorical variants of numeric tasks
    std::size_t aux_correct = 0;
    double metric = 0.0;
};

struct MetricReport {
    double bca = 0.0;    // LOS detection accuracy
    double tca = 0.0;    // multipath class accuracy
    double mae_f = 0.0;  // Doppler shift MAE, percentage points
    double mae_t = 0.0;  // TDoA MAE, samples
    double rep = 0.0;    // range relative error, percent of max distance
    std::map<std::string, TaskScore> per_task;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

// Scores per-datapoint answers against the manifest's canonical answers.
// Unparseable numeric answers contribute the task's random-baseline error;
// unparseable categorical answers count as wrong.
MetricReport score_predictions(const std::vector<Datapoint>& manifest,
                               const std::vector<Prediction>& predictions);

std::vector<Prediction> load_predictions(const std::filesystem::path& path);

// Oracle-closure over a generated manifest: re-derives channels from the
// stored seeds, runs the matching estimator per datapoint, and reports
// per-task pass rates.
struct ClosureResult {
    std::map<std::string, double> pass_rate;  // task slug -> fraction
    std::map<std::string, std::size_t> counts;
    std::vector<std::string> failures;        // "<id>: reason"
    bool all_passed(const std::map<std::string, double>& thresholds) const;
};

ClosureResult run_closure(const std::vector<Datapoint>& manifest,
                          const std::filesystem::path& manifest_dir);

}  // namespace acsim

#endif
