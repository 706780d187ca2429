#include "acsim/dataset.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "acsim/errors.hpp"
#include "acsim/rng.hpp"
#include "acsim/wav.hpp"

namespace acsim {

namespace fs = std::filesystem;

namespace {

const char* kPromptHeader =
    "<|im_start|>system\n"
    "You are a helpful assistant.\n"
    "<|im_end|>\n"
    "<|im_start|>user\n";

const char* kAudioLinePrefix = "Audio ";
const char* kAudioLineSuffix = ": <|audio_bos|><|AUDIO|><|audio_eos|>\n";

}  // namespace

std::string format_prompt(std::size_t n_audio, const std::string& question,
                          const std::string& answer) {
    if (n_audio < 1 || n_audio > 2)
        throw ContractError("format_prompt: need 1 or 2 audio inputs");
    std::string out = kPromptHeader;
    for (std::size_t i = 1; i <= n_audio; ++i)
        out += kAudioLinePrefix + std::to_string(i) + kAudioLineSuffix;
    out += question;
    out += "\n<|im_end|>\n<|im_start|>assistant\n";
    out += answer;
    out += "\n<|im_end|>";
    return out;
}

std::string format_prompt(const Datapoint& dp) {
    return format_prompt(dp.audio_paths.size(), dp.qa.question, dp.qa.answer);
}

nlohmann::json datapoint_to_json(const Datapoint& dp) {
    nlohmann::json j;
    j["id"] = dp.id;
    j["task"] = task_name(dp.task);
    j["audio"] = dp.audio_paths;
    j["form"] = dp.qa.form == QAPair::Form::kClosed ? "closed" : "open";
    j["question"] = dp.qa.question;
    j["answer"] = dp.qa.answer;
    j["ground_truth"] = dp.ground_truth.to_json();
    j["ground_truth"]["template_id"] = dp.qa.template_id;
    // 64-bit seeds do not round-trip through JSON doubles; keep them textual.
    j["scenario_seed"] = std::to_string(dp.scenario_seed);
    if (dp.snr_db)
        j["snr_db"] = *dp.snr_db;
    else
        j["snr_db"] = nullptr;
    if (dp.open_form_failed) j["open_form_failed"] = true;
    return j;
}

Datapoint datapoint_from_json(const nlohmann::json& j) {
    Datapoint dp;
    dp.id = j.at("id").get<std::string>();
    dp.task = parse_task(j.at("task").get<std::string>());
    dp.audio_paths = j.at("audio").get<std::vector<std::string>>();
    dp.qa.form = j.at("form").get<std::string>() == "closed"
                     ? QAPair::Form::kClosed
                     : QAPair::Form::kOpen;
    dp.qa.question = j.at("question").get<std::string>();
    dp.qa.answer = j.at("answer").get<std::string>();
    dp.ground_truth = GroundTruth::from_json(j.at("ground_truth"));
    if (j.at("ground_truth").contains("template_id"))
        dp.qa.template_id =
            j.at("ground_truth").at("template_id").get<std::string>();
    dp.scenario_seed =
        std::stoull(j.at("scenario_seed").get<std::string>());
    if (!j.at("snr_db").is_null()) dp.snr_db = j.at("snr_db").get<double>();
    if (j.contains("open_form_failed"))
        dp.open_form_failed = j.at("open_form_failed").get<bool>();
    dp.prompt_text = format_prompt(dp);
    return dp;
}

std::vector<Datapoint> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("load_manifest: cannot open " + path.string());
    std::vector<Datapoint> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(datapoint_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw IngestError("load_manifest: line " + std::to_string(lineno) +
                              ": " + e.what());
        }
    }
    return out;
}

std::optional<LLMClientConfig> llm_config_from_env() {
    const char* endpoint = std::getenv("ACSIM_LLM_ENDPOINT");
    if (endpoint == nullptr || *endpoint == '\0') return std::nullopt;
    LLMClientConfig cfg;
    cfg.endpoint = endpoint;
    if (const char* tok = std::getenv("ACSIM_LLM_TOKEN")) cfg.token = tok;
    if (const char* model = std::getenv("ACSIM_LLM_MODEL")) cfg.model = model;
    return cfg;
}

namespace {

// Splits "http://host:port/path" into (scheme://host:port, /path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ParamError("LLM endpoint must include scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// The facts handed to the LLM for open-form QA generation.
std::string ground_truth_facts(const Datapoint& dp) {
    std::ostringstream os;
    os << "Task: " << task_name(dp.task) << "\n";
    os << "Ground truth: " << dp.ground_truth.to_json().dump() << "\n";
    os << "Closed-form answer: " << dp.qa.answer << "\n";
    return os.str();
}

// The numeric value the reply must contain (within 1% relative), if any.
std::optional<double> validation_number(const GroundTruth& gt) {
    switch (gt.task) {
        case Task::kLosDetection: return std::nullopt;
        case Task::kDopplerEstimation: return gt.shift_pct;
        case Task::kDoaEstimation:
            return gt.tdoa_quantized
                       ? std::optional<double>(*gt.tdoa_quantized)
                       : std::nullopt;
        case Task::kMultipathAnalysis: return std::nullopt;
        case Task::kRangeEstimation: return gt.tof_ms;
    }
    return std::nullopt;
}

bool reply_contains_number(const std::string& text, double target) {
    const double tol =
        std::max(0.01 * std::fabs(target), 0.051);  // 1% or formatting slack
    const char* p = text.c_str();
    while (*p) {
        if (std::isdigit(static_cast<unsigned char>(*p)) ||
            ((*p == '-' || *p == '+') &&
             std::isdigit(static_cast<unsigned char>(p[1])))) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end != p) {
                if (std::fabs(v - target) <= tol) return true;
                p = end;
                continue;
            }
        }
        ++p;
    }
    return false;
}

}  // namespace

QAPair request_open_qa(const Datapoint& dp, const LLMClientConfig& client) {
    const auto [host, path] = split_url(client.endpoint);
    httplib::Client http(host);
    http.set_connection_timeout(static_cast<int>(client.timeout_s));
    http.set_read_timeout(static_cast<int>(client.timeout_s));

    nlohmann::json req;
    req["model"] = client.model;
    req["messages"] = nlohmann::json::array({
        {{"role", "system"},
         {"content",
          "You write one question and one answer about a physical phenomenon "
          "audible in an audio recording. The answer must explain the "
          "reasoning and must state the ground-truth value exactly. Reply as "
          "JSON: {\"question\": ..., \"answer\": ...}."}},
        {{"role", "user"}, {"content", ground_truth_facts(dp)}},
    });

    httplib::Headers headers;
    if (!client.token.empty())
        headers.emplace("Authorization", "Bearer " + client.token);

    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < client.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(200 << attempt));
        auto res = http.Post(path, headers, req.dump(), "application/json");
        if (!res || res->status != 200) {
            last_error = res ? "HTTP " + std::to_string(res->status)
                             : "connection failed";
            continue;
        }
        try {
            const auto body = nlohmann::json::parse(res->body);
            const std::string content =
                body.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            std::string question, answer;
            try {
                const auto qa = nlohmann::json::parse(content);
                question = qa.at("question").get<std::string>();
                answer = qa.at("answer").get<std::string>();
            } catch (const std::exception&) {
                question = dp.qa.question;
                answer = content;
            }
            if (const auto target = validation_number(dp.ground_truth)) {
                if (!reply_contains_number(answer, *target)) {
                    last_error = "reply missing ground-truth value";
                    continue;
                }
            }
            QAPair qa;
            qa.question = question;
            qa.answer = answer;
            qa.form = QAPair::Form::kOpen;
            qa.template_id = "open";
            return qa;
        } catch (const std::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
        }
    }
    throw ContractError("request_open_qa: " + last_error);
}

namespace {

struct WorkItem {
    Task task;
    std::size_t index;   // per-task datapoint index
    bool open_form;
    std::size_t order;   // global manifest position
};

Datapoint make_datapoint(const WorkItem& item, const GenConfig& config,
                         const SourcePool& pool, const LLMClientConfig* llm) {
    const std::uint64_t item_seed =
        scenario_item_seed(config.master_seed, item.task, item.index);
    ScenarioInstance inst =
        sample_scenario_seeded(item.task, item_seed, pool.size(), config.snr);
    Rendered rendered = render(inst, &pool);

    Datapoint dp;
    dp.task = item.task;
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%06zu", item.index);
    dp.id = task_slug(item.task) + "-" + idx;
    dp.scenario_seed = item_seed;
    dp.snr_db = inst.snr_db;
    dp.ground_truth = rendered.ground_truth;

    const fs::path audio_dir = config.out_dir / "audio";
    if (item.task == Task::kDopplerEstimation) {
        // Original source first, received audio second.
        const std::string src_rel = "audio/" + dp.id + "-src.wav";
        const std::string rcv_rel = "audio/" + dp.id + "-rcv.wav";
        wav_write_mono(config.out_dir / src_rel, rendered.source);
        wav_write_mono(config.out_dir / rcv_rel, rendered.channels.at(0));
        dp.audio_paths = {src_rel, rcv_rel};
    } else if (item.task == Task::kDoaEstimation) {
        const std::string rel = "audio/" + dp.id + ".wav";
        wav_write(config.out_dir / rel,
                  {rendered.channels.at(0).samples,
                   rendered.channels.at(1).samples});
        dp.audio_paths = {rel};
    } else {
        const std::string rel = "audio/" + dp.id + ".wav";
        wav_write_mono(config.out_dir / rel, rendered.channels.at(0));
        dp.audio_paths = {rel};
    }

    dp.qa = make_closed_qa(item.task, dp.ground_truth, item_seed);
    if (item.open_form) {
        if (llm == nullptr) {
            dp.open_form_failed = true;  // no client configured
        } else {
            try {
                dp.qa = request_open_qa(dp, *llm);
            } catch (const ContractError&) {
                dp.open_form_failed = true;
            }
        }
    }
    dp.prompt_text = format_prompt(dp);
    return dp;
}

}  // namespace

GenSummary write_dataset(const GenConfig& config, const SourcePool& pool,
                         const LLMClientConfig* llm,
                         const ProgressFn& progress) {
    const auto t_start = std::chrono::steady_clock::now();
    fs::create_directories(config.out_dir / "audio");
    const fs::path manifest_path = config.out_dir / "manifest.jsonl";

    std::vector<WorkItem> items;
    for (Task t : config.tasks) {
        for (std::size_t i = 0; i < config.n_closed_per_task; ++i)
            items.push_back({t, i, false, 0});
        for (std::size_t i = 0; i < config.n_open_per_task; ++i)
            items.push_back({t, config.n_closed_per_task + i, true, 0});
    }
    for (std::size_t i = 0; i < items.size(); ++i) items[i].order = i;

    // Resume: skip the records already present in the manifest.
    std::size_t already = 0;
    if (config.resume && fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++already;
    }
    if (already > items.size())
        throw IngestError("write_dataset: manifest longer than the request");

    std::ofstream manifest(manifest_path, already > 0 ? std::ios::app
                                                      : std::ios::trunc);
    if (!manifest)
        throw IngestError("write_dataset: cannot open " +
                          manifest_path.string());

    GenSummary summary;
    summary.master_seed = config.master_seed;
    summary.manifest_path = manifest_path;
    for (std::size_t i = 0; i < already; ++i) {
        summary.per_task[task_slug(items[i].task)]++;
        summary.total++;
    }

    const std::size_t remaining = items.size() - already;
    unsigned workers = config.workers;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, std::max<std::size_t>(remaining, 1)));

    // Workers render datapoints in parallel; a single appender writes manifest
    // lines strictly in item order so output is deterministic.
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::size_t, Datapoint> ready;
    std::atomic<std::size_t> next_index{already};
    std::exception_ptr failure;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next_index.fetch_add(1);
            if (i >= items.size()) return;
            try {
                Datapoint dp = make_datapoint(items[i], config, pool, llm);
                std::lock_guard lock(mu);
                ready.emplace(i, std::move(dp));
                cv.notify_all();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                cv.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);

    std::size_t written = already;
    {
        std::unique_lock lock(mu);
        while (written < items.size()) {
            cv.wait(lock, [&] {
                return failure || ready.count(written) > 0;
            });
            if (failure && ready.count(written) == 0) break;
            auto node = ready.extract(written);
            const Datapoint& dp = node.mapped();
            manifest << datapoint_to_json(dp).dump() << '\n';
            manifest.flush();
            summary.per_task[task_slug(dp.task)]++;
            summary.total++;
            if (dp.open_form_failed) summary.open_failed++;
            ++written;
            if (progress) progress(written, items.size());
        }
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    summary.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return summary;
}

}  // namespace acsim
