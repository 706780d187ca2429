#ifndef ACSIM_SCENARIO_HPP
#define ACSIM_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "acsim/channel.hpp"
#include "acsim/doppler.hpp"
#include "acsim/mic_array.hpp"
#include "acsim/sources.hpp"

namespace acsim {

enum class Task {
    kLosDetection,
    kDopplerEstimation,
    kDoaEstimation,
    kMultipathAnalysis,
    kRangeEstimation,
};

inline constexpr Task kAllTasks[] = {
    Task::kLosDetection, Task::kDopplerEstimation, Task::kDoaEstimation,
    Task::kMultipathAnalysis, Task::kRangeEstimation};

std::string task_name(Task t);  // e.g. "LOSDetection"
std::string task_slug(Task t);  // e.g. "los"
Task parse_task(const std::string& name);

enum class MultipathClass { kRich, kModerate, kNegligible };
std::string multipath_class_name(MultipathClass c);
MultipathClass parse_multipath_class(const std::string& name);

// Mean-lambda boundaries between Rich/Moderate and Moderate/Negligible.
inline constexpr double kMultipathRichMax = 6.0;
inline constexpr double kMultipathModerateMax = 20.0;

// Range-task geometry: one-way target distance (meters).
inline constexpr double kRangeDistMin = 1.5, kRangeDistMax = 25.0;

struct SnrPolicy {
    enum class Mode { kOff, kFixed, kRandom };
    Mode mode = Mode::kRandom;
    double fixed_db = 20.0;
    double low_db = 0.0, high_db = 40.0;

    static SnrPolicy off() { return {Mode::kOff, 0, 0, 0}; }
    static SnrPolicy fixed(double db) { return {Mode::kFixed, db, 0, 0}; }
    static SnrPolicy random(double lo = 0.0, double hi = 40.0) {
        return {Mode::kRandom, 0, lo, hi};
    }
};

// Task-discriminated ground truth; exactly the variant matching `task` is set.
struct GroundTruth {
    Task task = Task::kLosDetection;

    std::optional<bool> los_present;

    std::optional<double> shift_pct;
    std::optional<double> v_mps;

    std::optional<double> tdoa_samples;  // real-valued tau * fs
    std::optional<int> tdoa_quantized;
    std::optional<double> theta_deg;
    std::optional<double> mic_dist_m;

    std::optional<MultipathClass> multipath_class;
    std::optional<double> mean_lambda;

    std::optional<double> tof_ms;
    std::optional<double> distance_m;

    nlohmann::json to_json() const;
    static GroundTruth from_json(const nlohmann::json& j);
};

struct ChannelComponents {
    std::vector<PathSpec> paths;           // LOS first when present
    bool has_los = false;
    bool has_reflections = false;
    std::optional<ReverbSpec> reverb;
    std::optional<DopplerSpec> doppler;
    std::optional<ArraySpec> array;
};

// One fully sampled task configuration. Everything needed to rebuild the
// channel (and the ranging pulse) derives from `seed` alone; the source pool
// is consulted only to pick a clip index.
struct ScenarioInstance {
    Task task = Task::kLosDetection;
    std::uint64_t seed = 0;
    ChannelComponents components;
    std::optional<double> snr_db;                  // nullopt = noiseless
    std::variant<std::size_t, ChirpSpec> source_ref;
    std::uint64_t reverb_seed = 0;
    int target_tof_samples = 0;  // range task only
};

// Per-item seed derivation: fully determined by (master_seed, task, index).
std::uint64_t scenario_item_seed(std::uint64_t master_seed, Task task,
                                 std::uint64_t index);

// Samples an instance from its item seed; pool_size only bounds the clip
// index (the range task uses a chirp and accepts pool_size == 0).
ScenarioInstance sample_scenario_seeded(Task task, std::uint64_t item_seed,
                                        std::size_t pool_size,
                                        const SnrPolicy& snr);

ScenarioInstance sample_scenario(Task task, std::uint64_t master_seed,
                                 std::uint64_t index, const SourcePool& pool,
                                 const SnrPolicy& snr = SnrPolicy::random());

// Channel/pulse reconstruction used by both rendering and verification.
ImpulseResponse build_cir(const ScenarioInstance& inst);
Signal build_source(const ScenarioInstance& inst, const SourcePool* pool);

struct Rendered {
    std::vector<Signal> channels;  // 1, or 2 for the DoA task (L, R)
    GroundTruth ground_truth;
    ImpulseResponse ir;            // left/base channel IR
    Signal transmitted;            // source after Doppler (what propagates)
    Signal source;                 // original source clip / pulse
};

// source -> (doppler) -> CIR convolution (per channel) -> additive noise at
// the instance SNR -> joint peak normalization to 0.89.
Rendered render(const ScenarioInstance& inst, const SourcePool* pool);

GroundTruth derive_ground_truth(const ScenarioInstance& inst);

// Additive white Gaussian noise at the requested SNR, measured over the
// signal's active span. nullopt SNR returns the input unchanged.
Signal add_noise_at_snr(const Signal& x, std::optional<double> snr_db,
                        std::uint64_t seed);

MultipathClass classify_multipath(const ReverbSpec& reverb);

inline constexpr double kRenderPeak = 0.89;

}  // namespace acsim

#endif
