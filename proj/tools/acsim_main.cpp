// acsim - physics-based acoustic channel simulator and QA dataset toolkit.
//
// Subcommands: gen, verify, features, score, render-one.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "acsim/dataset.hpp"
#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/features.hpp"
#include "acsim/qa.hpp"
#include "acsim/scenario.hpp"
#include "acsim/verify.hpp"
#include "acsim/wav.hpp"

namespace fs = std::filesystem;
using namespace acsim;

namespace {

SnrPolicy parse_snr(const std::string& text) {
    if (text == "off") return SnrPolicy::off();
    if (text == "random") return SnrPolicy::random();
    const auto colon = text.find(':');
    if (text.rfind("random:", 0) == 0 && colon != std::string::npos) {
        const auto dash = text.find('-', colon);
        if (dash == std::string::npos)
            throw CLI::ValidationError("--snr", "expected random:<lo>-<hi>");
        return SnrPolicy::random(std::stod(text.substr(colon + 1,
                                                       dash - colon - 1)),
                                 std::stod(text.substr(dash + 1)));
    }
    try {
        return SnrPolicy::fixed(std::stod(text));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--snr",
                                   "expected off | random | random:lo-hi | <dB>");
    }
}

std::vector<Task> parse_tasks(const std::string& text) {
    if (text == "all") return {kAllTasks, kAllTasks + 5};
    std::vector<Task> tasks;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ','))
        if (!item.empty()) tasks.push_back(parse_task(item));
    if (tasks.empty()) throw CLI::ValidationError("--tasks", "no tasks given");
    return tasks;
}

nlohmann::json instance_to_json(const ScenarioInstance& inst) {
    nlohmann::json j;
    j["task"] = task_name(inst.task);
    j["seed"] = std::to_string(inst.seed);
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& p : inst.components.paths) {
        paths.push_back({{"kind", p.kind == PathKind::kLos ? "los"
                                                           : "reflection"},
                         {"delay_s", p.delay_s},
                         {"amplitude", p.amplitude},
                         {"freq_factor", p.freq_factor},
                         {"decay_factor", p.decay_factor}});
    }
    j["paths"] = paths;
    if (inst.components.reverb) {
        j["reverb"]["decay_rates"] = inst.components.reverb->decay_rates;
        j["reverb"]["mean_lambda"] = inst.components.reverb->mean_lambda();
    }
    if (inst.components.doppler) {
        j["doppler"]["v_mps"] = inst.components.doppler->v_mps;
        j["doppler"]["d0_m"] = inst.components.doppler->d0_m;
    }
    if (inst.components.array) {
        j["array"]["d_m"] = inst.components.array->d_m;
        j["array"]["theta_deg"] = inst.components.array->theta_deg;
        j["array"]["tdoa_s"] = tdoa_from_doa(*inst.components.array);
    }
    if (std::holds_alternative<ChirpSpec>(inst.source_ref)) {
        const auto& c = std::get<ChirpSpec>(inst.source_ref);
        j["chirp"] = {{"f0_hz", c.f0_hz},
                      {"f1_hz", c.f1_hz},
                      {"duration_s", c.duration_s}};
    } else {
        j["source_index"] = std::get<std::size_t>(inst.source_ref);
    }
    if (inst.snr_db)
        j["snr_db"] = *inst.snr_db;
    else
        j["snr_db"] = nullptr;
    return j;
}

struct GenCli {
    std::string tasks = "all";
    std::size_t n = 0;
    std::size_t open_n = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string sources;
    std::string snr = "random";
    unsigned workers = 0;
    std::string config_path;
    bool summary_json = false;
};

int run_gen(const GenCli& cli_args, const CLI::App& sub) {
    GenConfig cfg;
    // Precedence: explicit flags > config file > built-in defaults.
    nlohmann::json fileCfg;
    if (!cli_args.config_path.empty()) {
        std::ifstream in(cli_args.config_path);
        if (!in) {
            std::cerr << "gen: cannot open config " << cli_args.config_path
                      << "\n";
            return 2;
        }
        in >> fileCfg;
    }
    auto flag_given = [&sub](const std::string& name) {
        return sub.count(name) > 0;
    };

    std::string tasks = cli_args.tasks;
    if (!flag_given("--tasks") && fileCfg.contains("tasks"))
        tasks = fileCfg["tasks"].get<std::string>();
    cfg.tasks = parse_tasks(tasks);

    cfg.n_closed_per_task = cli_args.n;
    if (!flag_given("--n") && fileCfg.contains("n"))
        cfg.n_closed_per_task = fileCfg["n"].get<std::size_t>();

    cfg.n_open_per_task = cli_args.open_n;
    if (!flag_given("--open-n") && fileCfg.contains("open_n"))
        cfg.n_open_per_task = fileCfg["open_n"].get<std::size_t>();

    cfg.master_seed = cli_args.seed;
    cfg.out_dir = cli_args.out;
    if (!flag_given("--out") && fileCfg.contains("out"))
        cfg.out_dir = fileCfg["out"].get<std::string>();

    std::string sources = cli_args.sources;
    if (!flag_given("--sources") && fileCfg.contains("sources"))
        sources = fileCfg["sources"].get<std::string>();

    std::string snr = cli_args.snr;
    if (!flag_given("--snr") && fileCfg.contains("snr"))
        snr = fileCfg["snr"].get<std::string>();
    cfg.snr = parse_snr(snr);

    cfg.workers = cli_args.workers;
    if (!flag_given("--workers") && fileCfg.contains("workers"))
        cfg.workers = fileCfg["workers"].get<unsigned>();

    if (cfg.out_dir.empty()) {
        std::cerr << "gen: --out is required\n";
        return 2;
    }
    const bool needs_pool = std::any_of(
        cfg.tasks.begin(), cfg.tasks.end(),
        [](Task t) { return t != Task::kRangeEstimation; });
    if (needs_pool && sources.empty()) {
        std::cerr << "gen: --sources is required for the requested tasks\n";
        return 2;
    }

    SourcePool pool;
    if (!sources.empty()) {
        pool = SourcePool::ingest(sources);
        std::ofstream report(cfg.out_dir.empty()
                                 ? fs::path("pool_report.json")
                                 : (fs::create_directories(cfg.out_dir),
                                    cfg.out_dir / "pool_report.json"));
        report << pool.report().to_json() << "\n";
        if (!pool.report().skipped.empty())
            std::cerr << "gen: skipped " << pool.report().skipped.size()
                      << " file(s) during ingestion\n";
    }

    auto llm = llm_config_from_env();
    if (cfg.n_open_per_task > 0 && !llm) {
        std::cerr << "gen: open-form requested but ACSIM_LLM_ENDPOINT is not "
                     "set; open items will be flagged open_form_failed\n";
    }

    const std::size_t total =
        cfg.tasks.size() * (cfg.n_closed_per_task + cfg.n_open_per_task);
    GenSummary summary = write_dataset(
        cfg, pool, llm ? &*llm : nullptr,
        [total](std::size_t done, std::size_t) {
            if (done % 50 == 0 || done == total)
                std::cerr << "gen: " << done << "/" << total << "\r";
        });
    std::cerr << "\n";

    std::cerr << "gen: wrote " << summary.total << " datapoints in "
              << summary.elapsed_s << " s (seed " << summary.master_seed
              << ")\n";
    for (const auto& [slug, n] : summary.per_task)
        std::cerr << "  " << slug << ": " << n << "\n";
    if (summary.open_failed > 0)
        std::cerr << "  open-form failures: " << summary.open_failed << "\n";

    if (cli_args.summary_json) {
        nlohmann::json j;
        j["total"] = summary.total;
        j["per_task"] = summary.per_task;
        j["open_failed"] = summary.open_failed;
        j["elapsed_s"] = summary.elapsed_s;
        j["seed"] = std::to_string(summary.master_seed);
        j["manifest"] = summary.manifest_path.string();
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

int run_verify(const std::string& manifest_path) {
    const fs::path mpath(manifest_path);
    auto manifest = load_manifest(mpath);
    if (manifest.empty()) {
        std::cerr << "verify: manifest is empty, nothing to do\n";
        return 0;
    }
    ClosureResult res = run_closure(manifest, mpath.parent_path());
    for (const auto& [slug, rate] : res.pass_rate)
        std::printf("%-10s %5zu items  pass rate %.4f\n", slug.c_str(),
                    res.counts[slug], rate);
    const std::map<std::string, double> thresholds = {
        {"los", 0.99}, {"doppler", 0.95}, {"doa", 0.99},
        {"multipath", 0.95}, {"range", 0.99}};
    if (!res.failures.empty()) {
        std::cerr << "verify: " << res.failures.size() << " failure(s):\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(res.failures.size(),
                                                          20);
             ++i)
            std::cerr << "  " << res.failures[i] << "\n";
    }
    if (!res.all_passed(thresholds)) {
        std::cerr << "verify: below threshold\n";
        return 1;
    }
    return 0;
}

int run_features(const std::string& wav_in, const std::string& tensor_out) {
    const WavData wav = wav_read(wav_in);
    const SpectralFeatures f = extract_features(Signal(wav.channels.at(0),
                                                       wav.sample_rate));
    save_features(tensor_out, f);
    std::cerr << "features: wrote [3, " << f.frames << ", "
              << SpectralFeatures::bins << "] to " << tensor_out << "\n";
    return 0;
}

int run_score(const std::string& manifest_path,
              const std::string& predictions_path, bool as_json) {
    const auto manifest = load_manifest(manifest_path);
    const auto preds = load_predictions(predictions_path);
    const MetricReport report = score_predictions(manifest, preds);
    if (as_json)
        std::cout << report.to_json().dump(2) << "\n";
    else
        std::cout << report.to_table();
    return 0;
}

int run_render_one(const std::string& task_str, std::uint64_t seed,
                   std::uint64_t index, const std::string& out_dir,
                   const std::string& sources) {
    const Task task = parse_task(task_str);
    fs::create_directories(out_dir);

    SourcePool pool;
    std::size_t pool_size = 0;
    if (!sources.empty()) {
        pool = SourcePool::ingest(sources);
        pool_size = pool.size();
    }
    if (task != Task::kRangeEstimation && pool_size == 0) {
        std::cerr << "render-one: --sources required for this task\n";
        return 2;
    }

    const std::uint64_t item_seed = scenario_item_seed(seed, task, index);
    ScenarioInstance inst = sample_scenario_seeded(task, item_seed, pool_size,
                                                   SnrPolicy::random());
    Rendered r = render(inst, pool_size ? &pool : nullptr);

    const fs::path out(out_dir);
    const std::string stem = task_slug(task) + "-" + std::to_string(index);
    if (r.channels.size() == 2) {
        wav_write(out / (stem + ".wav"),
                  {r.channels[0].samples, r.channels[1].samples});
    } else {
        wav_write_mono(out / (stem + ".wav"), r.channels[0]);
    }
    if (!r.ir.samples.empty())
        wav_write_mono(out / (stem + "-cir.wav"), r.ir.samples);

    nlohmann::json params = instance_to_json(inst);
    params["ground_truth"] = r.ground_truth.to_json();
    std::ofstream pj(out / (stem + "-params.json"));
    pj << params.dump(2) << "\n";

    std::cerr << "render-one: wrote " << (out / (stem + ".wav")).string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acsim - acoustic channel simulator & QA dataset toolkit"};
    app.require_subcommand(1);

    GenCli gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a dataset");
    gen->add_option("--tasks", gen_args.tasks, "all or comma list");
    gen->add_option("--n", gen_args.n, "closed-form datapoints per task");
    gen->add_option("--open-n", gen_args.open_n, "open-form datapoints per task");
    gen->add_option("--seed", gen_args.seed, "master seed")->required();
    gen->add_option("--out", gen_args.out, "output directory");
    gen->add_option("--sources", gen_args.sources, "source audio directory");
    gen->add_option("--snr", gen_args.snr, "off | random | random:lo-hi | <dB>");
    gen->add_option("--workers", gen_args.workers, "worker threads");
    gen->add_option("--config", gen_args.config_path, "JSON config file");
    gen->add_flag("--summary-json", gen_args.summary_json,
                  "machine-readable summary on stdout");

    std::string verify_manifest;
    auto* verify = app.add_subcommand("verify", "Oracle-closure over a manifest");
    verify->add_option("--manifest", verify_manifest)->required();

    std::string feat_in, feat_out;
    auto* features = app.add_subcommand("features", "WAV to spectral tensor");
    features->add_option("--in", feat_in)->required();
    features->add_option("--out", feat_out)->required();

    std::string score_manifest, score_preds;
    bool score_json = false;
    auto* score = app.add_subcommand("score", "Score predictions");
    score->add_option("--manifest", score_manifest)->required();
    score->add_option("--predictions", score_preds)->required();
    score->add_flag("--json", score_json);

    std::string ro_task, ro_out, ro_sources;
    std::uint64_t ro_seed = 0, ro_index = 0;
    auto* render_one = app.add_subcommand("render-one",
                                          "Render a single scenario");
    render_one->add_option("--task", ro_task)->required();
    render_one->add_option("--seed", ro_seed)->required();
    render_one->add_option("--index", ro_index);
    render_one->add_option("--out", ro_out)->required();
    render_one->add_option("--sources", ro_sources);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_gen(gen_args, *gen);
        if (verify->parsed()) return run_verify(verify_manifest);
        if (features->parsed()) return run_features(feat_in, feat_out);
        if (score->parsed())
            return run_score(score_manifest, score_preds, score_json);
        if (render_one->parsed())
            return run_render_one(ro_task, ro_seed, ro_index, ro_out,
                                  ro_sources);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
