#include "acsim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/rng.hpp"

namespace acsim {

namespace {

// LOS (or reference) delay range for scenario sampling, seconds. The lower
// bound leaves headroom for negative binaural shifts.
constexpr double kLosDelayMin = 0.001, kLosDelayMax = 0.030;
// Reflection delays relative to the reference arrival, seconds.
constexpr double kReflDelayMin = 0.001, kReflDelayMax = 0.050;

// Range task tuning: the target echo must stay identifiable against nuisance
// reflections, so its amplitude range sits above theirs and nuisance delays
// keep out of a small exclusion zone around the target.
constexpr double kRangeEchoAmpMin = 0.35, kRangeEchoAmpMax = 0.5;
constexpr double kRangeNuisanceAmpMin = 0.1, kRangeNuisanceAmpMax = 0.15;
constexpr int kRangeEchoExclusion = 10;  // samples
constexpr double kRangeChirpDurMin = 0.02, kRangeChirpDurMax = 0.05;

PathSpec make_los(RngStream& rng, double delay_s) {
    PathSpec p;
    p.kind = PathKind::kLos;
    p.delay_s = delay_s;
    p.amplitude = rng.uniform(kLosAmpMin, kLosAmpMax);
    return p;
}

PathSpec make_reflection(RngStream& rng, double base_delay_s) {
    PathSpec p;
    p.kind = PathKind::kEarlyReflection;
    p.delay_s = base_delay_s + rng.uniform(kReflDelayMin, kReflDelayMax);
    p.amplitude = rng.uniform(kReflAmpMin, kReflAmpMax);
    p.freq_factor = rng.uniform(kReflFreqFactorMin, kReflFreqFactorMax);
    p.decay_factor = rng.uniform(kReflDecayFactorMin, kReflDecayFactorMax);
    return p;
}

ReverbSpec sample_reverb(RngStream& rng, std::optional<double> scalar_lambda) {
    ReverbSpec spec;
    for (auto& l : spec.decay_rates) {
        if (scalar_lambda) {
            // Shared scalar with a little per-band jitter.
            l = std::clamp(*scalar_lambda * rng.uniform(0.9, 1.1),
                           kReverbLambdaMin, kReverbLambdaMax);
        } else {
            l = rng.uniform(kReverbLambdaMin, kReverbLambdaMax);
        }
    }
    return spec;
}

DopplerSpec sample_doppler(RngStream& rng) {
    DopplerSpec d;
    d.v_mps = rng.uniform(kDopplerSpeedMin, kDopplerSpeedMax);
    d.d0_m = rng.uniform(kDopplerDistMin, kDopplerDistMax);
    return d;
}

}  // namespace

std::string task_name(Task t) {
    switch (t) {
        case Task::kLosDetection: return "LOSDetection";
        case Task::kDopplerEstimation: return "DopplerEstimation";
        case Task::kDoaEstimation: return "DoAEstimation";
        case Task::kMultipathAnalysis: return "MultipathAnalysis";
        case Task::kRangeEstimation: return "RangeEstimation";
    }
    throw ParamError("task_name: bad task");
}

std::string task_slug(Task t) {
    switch (t) {
        case Task::kLosDetection: return "los";
        case Task::kDopplerEstimation: return "doppler";
        case Task::kDoaEstimation: return "doa";
        case Task::kMultipathAnalysis: return "multipath";
        case Task::kRangeEstimation: return "range";
    }
    throw ParamError("task_slug: bad task");
}

Task parse_task(const std::string& name) {
    for (Task t : kAllTasks)
        if (name == task_name(t) || name == task_slug(t)) return t;
    throw ParamError("parse_task: unknown task '" + name + "'");
}

std::string multipath_class_name(MultipathClass c) {
    switch (c) {
        case MultipathClass::kRich: return "Rich";
        case MultipathClass::kModerate: return "Moderate";
        case MultipathClass::kNegligible: return "Negligible";
    }
    throw ParamError("multipath_class_name: bad class");
}

MultipathClass parse_multipath_class(const std::string& name) {
    if (name == "Rich") return MultipathClass::kRich;
    if (name == "Moderate") return MultipathClass::kModerate;
    if (name == "Negligible") return MultipathClass::kNegligible;
    throw ParamError("parse_multipath_class: '" + name + "'");
}

MultipathClass classify_multipath(const ReverbSpec& reverb) {
    const double m = reverb.mean_lambda();
    if (m < kMultipathRichMax) return MultipathClass::kRich;
    if (m < kMultipathModerateMax) return MultipathClass::kModerate;
    return MultipathClass::kNegligible;
}

std::uint64_t scenario_item_seed(std::uint64_t master_seed, Task task,
                                 std::uint64_t index) {
    return RngStream::derive(master_seed, task_name(task), index).state();
}

ScenarioInstance sample_scenario_seeded(Task task, std::uint64_t item_seed,
                                        std::size_t pool_size,
                                        const SnrPolicy& snr) {
    ScenarioInstance inst;
    inst.task = task;
    inst.seed = item_seed;
    inst.reverb_seed = RngStream::derive(item_seed, "reverb").state();

    RngStream rng = RngStream::derive(item_seed, "components");
    auto& c = inst.components;

    const double ref_delay = rng.uniform(kLosDelayMin, kLosDelayMax);

    switch (task) {
        case Task::kLosDetection: {
            c.has_los = rng.coin();  // controlled: balanced positives/negatives
            if (c.has_los) c.paths.push_back(make_los(rng, ref_delay));
            bool refl = rng.coin();
            if (!c.has_los) refl = true;  // keep negatives non-degenerate
            if (refl) {
                const int n = 1 + static_cast<int>(rng.uniform_int(5));
                for (int i = 0; i < n; ++i)
                    c.paths.push_back(make_reflection(rng, ref_delay));
                c.has_reflections = true;
            }
            if (rng.coin()) c.reverb = sample_reverb(rng, std::nullopt);
            if (rng.coin()) c.doppler = sample_doppler(rng);
            break;
        }
        case Task::kDopplerEstimation: {
            DopplerSpec d = sample_doppler(rng);  // controlled parameter
            if (rng.coin()) {
                c.has_los = true;
                c.paths.push_back(make_los(rng, ref_delay));
            }
            if (rng.coin()) {
                const int n = 1 + static_cast<int>(rng.uniform_int(5));
                for (int i = 0; i < n; ++i)
                    c.paths.push_back(make_reflection(rng, ref_delay));
                c.has_reflections = true;
            }
            if (rng.coin()) c.reverb = sample_reverb(rng, std::nullopt);
            c.doppler = d;
            break;
        }
        case Task::kDoaEstimation: {
            c.has_los = true;  // required for TDoA geometry
            c.paths.push_back(make_los(rng, ref_delay));
            if (rng.coin()) {
                const int n = 1 + static_cast<int>(rng.uniform_int(5));
                for (int i = 0; i < n; ++i)
                    c.paths.push_back(make_reflection(rng, ref_delay));
                c.has_reflections = true;
            }
            if (rng.coin()) c.reverb = sample_reverb(rng, std::nullopt);
            if (rng.coin()) c.doppler = sample_doppler(rng);
            ArraySpec a;  // controlled parameters
            a.d_m = rng.uniform(kMicDistMin, kMicDistMax);
            a.theta_deg = rng.uniform(0.0, 180.0);
            c.array = a;
            break;
        }
        case Task::kMultipathAnalysis: {
            const double lambda =
                rng.uniform(kReverbLambdaMin, kReverbLambdaMax);  // controlled
            c.reverb = sample_reverb(rng, lambda);
            if (rng.coin()) {
                c.has_los = true;
                c.paths.push_back(make_los(rng, ref_delay));
            }
            if (rng.coin()) {
                const int n = 1 + static_cast<int>(rng.uniform_int(5));
                for (int i = 0; i < n; ++i)
                    c.paths.push_back(make_reflection(rng, ref_delay));
                c.has_reflections = true;
            }
            if (rng.coin()) c.doppler = sample_doppler(rng);
            break;
        }
        case Task::kRangeEstimation: {
            c.has_los = true;
            c.paths.push_back(make_los(rng, ref_delay));

            // Controlled echo: canonical kernel on a longer, quantized path.
            const double dist = rng.uniform(kRangeDistMin, kRangeDistMax);
            const int tof =
                static_cast<int>(std::llround(2.0 * dist / kSoundSpeed *
                                              kSampleRate));
            inst.target_tof_samples = tof;
            PathSpec echo;
            echo.kind = PathKind::kEarlyReflection;
            echo.delay_s = ref_delay + static_cast<double>(tof) / kSampleRate;
            echo.amplitude = rng.uniform(kRangeEchoAmpMin, kRangeEchoAmpMax);
            c.paths.push_back(echo);

            if (rng.coin()) {
                const int n = 1 + static_cast<int>(rng.uniform_int(5));
                const int ref_samples =
                    static_cast<int>(std::llround(ref_delay * kSampleRate));
                for (int i = 0; i < n; ++i) {
                    PathSpec nuis = make_reflection(rng, ref_delay);
                    nuis.amplitude =
                        rng.uniform(kRangeNuisanceAmpMin, kRangeNuisanceAmpMax);
                    const int d = static_cast<int>(
                        std::llround(nuis.delay_s * kSampleRate));
                    if (std::abs(d - (ref_samples + tof)) <= kRangeEchoExclusion)
                        continue;  // keep the target echo unambiguous
                    c.paths.push_back(nuis);
                }
                c.has_reflections = true;
            }
            // Reverberation stays off: a unit-variance tail buries a <=0.5
            // amplitude echo beyond any matched-filter recovery.
            if (rng.coin()) c.doppler = sample_doppler(rng);
            break;
        }
    }

    // Source selection.
    if (task == Task::kRangeEstimation) {
        ChirpSpec chirp;
        chirp.f0_hz = rng.uniform(1000.0, 4000.0);
        chirp.f1_hz = rng.uniform(chirp.f0_hz + 2000.0, 7900.0);
        chirp.duration_s = rng.uniform(kRangeChirpDurMin, kRangeChirpDurMax);
        inst.source_ref = chirp;
    } else {
        if (pool_size == 0)
            throw ParamError("sample_scenario: empty source pool");
        inst.source_ref = static_cast<std::size_t>(rng.uniform_int(pool_size));
    }

    switch (snr.mode) {
        case SnrPolicy::Mode::kOff: break;
        case SnrPolicy::Mode::kFixed: inst.snr_db = snr.fixed_db; break;
        case SnrPolicy::Mode::kRandom:
            inst.snr_db = rng.uniform(snr.low_db, snr.high_db);
            break;
    }
    return inst;
}

ScenarioInstance sample_scenario(Task task, std::uint64_t master_seed,
                                 std::uint64_t index, const SourcePool& pool,
                                 const SnrPolicy& snr) {
    return sample_scenario_seeded(task, scenario_item_seed(master_seed, task,
                                                           index),
                                  pool.size(), snr);
}

ImpulseResponse build_cir(const ScenarioInstance& inst) {
    return compose_cir(inst.components.paths, inst.components.reverb,
                       inst.reverb_seed);
}

Signal build_source(const ScenarioInstance& inst, const SourcePool* pool) {
    if (std::holds_alternative<ChirpSpec>(inst.source_ref))
        return chirp_pulse(std::get<ChirpSpec>(inst.source_ref));
    if (pool == nullptr)
        throw ParamError("build_source: pool required for clip sources");
    return pool->at(std::get<std::size_t>(inst.source_ref)).audio;
}

GroundTruth derive_ground_truth(const ScenarioInstance& inst) {
    GroundTruth gt;
    gt.task = inst.task;
    switch (inst.task) {
        case Task::kLosDetection:
            gt.los_present = inst.components.has_los;
            break;
        case Task::kDopplerEstimation: {
            const auto& d = *inst.components.doppler;
            gt.v_mps = d.v_mps;
            gt.shift_pct = doppler_shift_pct(d);
            break;
        }
        case Task::kDoaEstimation: {
            const auto& a = *inst.components.array;
            const double tau = tdoa_from_doa(a);
            gt.tdoa_samples = tau * kSampleRate;
            gt.tdoa_quantized = static_cast<int>(std::llround(tau * kSampleRate));
            gt.theta_deg = a.theta_deg;
            gt.mic_dist_m = a.d_m;
            break;
        }
        case Task::kMultipathAnalysis: {
            const auto& r = *inst.components.reverb;
            gt.multipath_class = classify_multipath(r);
            gt.mean_lambda = r.mean_lambda();
            break;
        }
        case Task::kRangeEstimation: {
            const double tof_ms =
                1000.0 * inst.target_tof_samples / kSampleRate;
            gt.tof_ms = tof_ms;
            gt.distance_m = kSoundSpeed * (tof_ms / 1000.0) / 2.0;
            break;
        }
    }
    return gt;
}

Signal add_noise_at_snr(const Signal& x, std::optional<double> snr_db,
                        std::uint64_t seed) {
    if (!snr_db) return x;
    if (x.empty() || x.peak() <= 0.0)
        throw ParamError("add_noise_at_snr: silent input");

    // Signal power over the active span (between first and last samples above
    // a small fraction of peak), so lead-in silence does not dilute it.
    const double gate = 1e-3 * x.peak();
    std::size_t first = 0, last = x.size() - 1;
    while (first < x.size() && std::fabs(x.samples[first]) < gate) ++first;
    while (last > first && std::fabs(x.samples[last]) < gate) --last;
    double p_sig = 0.0;
    for (std::size_t i = first; i <= last; ++i)
        p_sig += x.samples[i] * x.samples[i];
    p_sig /= static_cast<double>(last - first + 1);

    const double p_noise = p_sig * std::pow(10.0, -(*snr_db) / 10.0);
    const double sigma = std::sqrt(p_noise);

    Signal noise = gaussian_noise(x.size(), seed);
    Signal out = x;
    for (std::size_t i = 0; i < x.size(); ++i)
        out.samples[i] += sigma * noise.samples[i];
    return out;
}

Rendered render(const ScenarioInstance& inst, const SourcePool* pool) {
    Rendered r;
    r.source = build_source(inst, pool);

    r.transmitted = inst.components.doppler
                        ? apply_doppler(r.source, *inst.components.doppler)
                        : r.source;

    const bool has_channel =
        !inst.components.paths.empty() || inst.components.reverb.has_value();

    std::vector<ImpulseResponse> irs;
    if (has_channel) {
        ImpulseResponse base = build_cir(inst);
        if (inst.components.array) {
            auto [l, rr] = binaural_cirs(base, *inst.components.array);
            irs.push_back(std::move(l));
            irs.push_back(std::move(rr));
        } else {
            irs.push_back(std::move(base));
        }
        r.ir = irs.front();
    }

    std::vector<Signal> chans;
    if (irs.empty()) {
        chans.push_back(r.transmitted);  // free-field pass-through
    } else {
        for (const auto& ir : irs)
            chans.push_back(fft_convolve(r.transmitted, ir.samples));
    }
    // Equalize channel lengths (binaural shift extends one of them).
    std::size_t max_len = 0;
    for (const auto& ch : chans) max_len = std::max(max_len, ch.size());
    for (auto& ch : chans) ch.samples.resize(max_len, 0.0);

    for (std::size_t i = 0; i < chans.size(); ++i)
        chans[i] = add_noise_at_snr(
            chans[i], inst.snr_db,
            RngStream::derive(inst.seed, "render-noise", i).state());

    double peak = 0.0;
    for (const auto& ch : chans) peak = std::max(peak, ch.peak());
    if (peak <= 0.0) throw RenderError("render: silent output");
    const double g = kRenderPeak / peak;
    for (auto& ch : chans)
        for (double& v : ch.samples) v *= g;

    r.channels = std::move(chans);
    r.ground_truth = derive_ground_truth(inst);
    return r;
}

nlohmann::json GroundTruth::to_json() const {
    nlohmann::json j;
    j["type"] = task_slug(task);
    switch (task) {
        case Task::kLosDetection:
            j["los_present"] = *los_present;
            break;
        case Task::kDopplerEstimation:
            j["shift_pct"] = *shift_pct;
            j["v_mps"] = *v_mps;
            break;
        case Task::kDoaEstimation:
            j["tdoa_samples"] = *tdoa_samples;
            j["tdoa_quantized"] = *tdoa_quantized;
            j["theta_deg"] = *theta_deg;
            j["mic_dist_m"] = *mic_dist_m;
            break;
        case Task::kMultipathAnalysis:
            j["class"] = multipath_class_name(*multipath_class);
            j["mean_lambda"] = *mean_lambda;
            break;
        case Task::kRangeEstimation:
            j["tof_ms"] = *tof_ms;
            j["distance_m"] = *distance_m;
            break;
    }
    return j;
}

GroundTruth GroundTruth::from_json(const nlohmann::json& j) {
    GroundTruth gt;
    gt.task = parse_task(j.at("type").get<std::string>());
    switch (gt.task) {
        case Task::kLosDetection:
            gt.los_present = j.at("los_present").get<bool>();
            break;
        case Task::kDopplerEstimation:
            gt.shift_pct = j.at("shift_pct").get<double>();
            gt.v_mps = j.at("v_mps").get<double>();
            break;
        case Task::kDoaEstimation:
            gt.tdoa_samples = j.at("tdoa_samples").get<double>();
            gt.tdoa_quantized = j.at("tdoa_quantized").get<int>();
            gt.theta_deg = j.at("theta_deg").get<double>();
            gt.mic_dist_m = j.at("mic_dist_m").get<double>();
            break;
        case Task::kMultipathAnalysis:
            gt.multipath_class =
                parse_multipath_class(j.at("class").get<std::string>());
            gt.mean_lambda = j.at("mean_lambda").get<double>();
            break;
        case Task::kRangeEstimation:
            gt.tof_ms = j.at("tof_ms").get<double>();
            gt.distance_m = j.at("distance_m").get<double>();
            break;
    }
    return gt;
}

}  // namespace acsim
