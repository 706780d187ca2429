#ifndef ACSIM_DATASET_HPP
#define ACSIM_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acsim/qa.hpp"
#include "acsim/scenario.hpp"

namespace acsim {

// One manifest record / SFT datapoint.
struct Datapoint {
    std::string id;
    Task task = Task::kLosDetection;
    std::vector<std::string> audio_paths;  // relative to the manifest dir
    QAPair qa;
    GroundTruth ground_truth;
    std::uint64_t scenario_seed = 0;
    std::optional<double> snr_db;
    std::string prompt_text;
    bool open_form_failed = false;
};

// Chat prompt with one audio placeholder block per audio path.
std::string format_prompt(const Datapoint& dp);
std::string format_prompt(std::size_t n_audio, const std::string& question,
                          const std::string& answer);

nlohmann::json datapoint_to_json(const Datapoint& dp);
Datapoint datapoint_from_json(const nlohmann::json& j);

std::vector<Datapoint> load_manifest(const std::filesystem::path& path);

struct GenConfig {
    std::vector<Task> tasks{kAllTasks, kAllTasks + 5};
    std::size_t n_closed_per_task = 1000;
    std::size_t n_open_per_task = 0;
    std::uint64_t master_seed = 0;
    std::filesystem::path out_dir;
    std::filesystem::path source_dir;
    SnrPolicy snr = SnrPolicy::random();
    unsigned workers = 0;  // 0 = hardware concurrency
    bool resume = true;
};

struct GenSummary {
    std::map<std::string, std::size_t> per_task;
    std::size_t total = 0;
    std::size_t open_failed = 0;
    double elapsed_s = 0.0;
    std::uint64_t master_seed = 0;
    std::filesystem::path manifest_path;
};

struct LLMClientConfig {
    std::string endpoint;  // e.g. http://host:port/v1/chat/completions
    std::string token;
    std::string model = "gpt-4";
    double timeout_s = 30.0;
    int max_retries = 3;
    int max_inflight = 4;
};

// Reads ACSIM_LLM_ENDPOINT / ACSIM_LLM_TOKEN / ACSIM_LLM_MODEL.
std::optional<LLMClientConfig> llm_config_from_env();

// Asks an external chat-completion service for an open-form QA pair grounded
// in the datapoint's labels. The reply is accepted only when it contains the
// ground-truth number within 1% relative tolerance; throws ContractError on
// validation failure after retries.
QAPair request_open_qa(const Datapoint& dp, const LLMClientConfig& client);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Writes WAVs under out_dir/audio and one JSONL manifest line per datapoint.
// Deterministic for a fixed master seed; a partial manifest resumes from its
// tail. Set `llm` to also emit open-form datapoints.
GenSummary write_dataset(const GenConfig& config, const SourcePool& pool,
                         const LLMClientConfig* llm = nullptr,
                         const ProgressFn& progress = nullptr);

}  // namespace acsim

#endif
