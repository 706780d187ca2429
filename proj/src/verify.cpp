#include "acsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "acsim/dsp.hpp"
#include "acsim/errors.hpp"
#include "acsim/qa.hpp"
#include "acsim/wav.hpp"

namespace acsim {

namespace {

constexpr double kDopplerBaselineMae = 10.0;   // random-guess MAE, pct points
constexpr double kDoaBaselineMae = 200.0 / 3;  // +-100 sample uniform guessing
constexpr double kRangeBaselineRep = 100.0 / 3;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Linear correlation of two real vectors via FFT; out[k] corresponds to
// sum_n a[n] * b[n + k - (len(b) - 1)] (full correlation).
std::vector<double> xcorr_full(const std::vector<double>& a,
                               const std::vector<double>& b) {
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t nfft = next_pow2(out_len);
    auto fa = rfft(a, nfft);
    std::vector<double> brev(b.rbegin(), b.rend());
    auto fb = rfft(brev, nfft);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    // Inverse real FFT via complex spectrum symmetry.
    std::vector<std::complex<double>> full(nfft);
    for (std::size_t i = 0; i < fa.size(); ++i) full[i] = fa[i];
    for (std::size_t i = 1; i + 1 < fa.size(); ++i)
        full[nfft - i] = std::conj(fa[i]);
    auto time = fft_complex(full, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = time[i].real();
    return out;
}

}  // namespace

int estimate_tdoa_xcorr(const Signal& left, const Signal& right, int max_lag) {
    if (left.size() != right.size())
        throw ParamError("estimate_tdoa_xcorr: length mismatch");
    if (left.rms() <= 0.0 || right.rms() <= 0.0)
        throw EstimatorError("estimate_tdoa_xcorr: silent input");
    if (max_lag < 1) throw ParamError("estimate_tdoa_xcorr: bad max_lag");

    const auto& l = left.samples;
    const auto& r = right.samples;
    const int n = static_cast<int>(l.size());
    int best_lag = 0;
    double best = -1e300;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        const int lo = std::max(0, -lag);
        const int hi = std::min(n, n - lag);
        for (int i = lo; i < hi; ++i) acc += l[i] * r[i + lag];
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    return best_lag;
}

double estimate_doppler_pct(const Signal& source, const Signal& received) {
    if (source.rms() <= 0.0 || received.rms() <= 0.0)
        throw EstimatorError("estimate_doppler_pct: silent input");

    // Probe segment from the early active part of the source. Its image in
    // the received signal sits near position p0/s + delay for time scale s.
    const auto& src = source.samples;
    const std::size_t seg_len =
        std::min<std::size_t>(4096, std::max<std::size_t>(512, src.size() / 4));
    std::size_t p0 = std::min<std::size_t>(src.size() / 8, 16000);
    if (p0 + seg_len * 2 > src.size())
        p0 = src.size() > seg_len * 2 ? src.size() - seg_len * 2 : 0;

    // Received window wide enough for every candidate alignment.
    const double s_min = 0.85, s_max = 1.15;
    const long align_lo = static_cast<long>(p0 / s_max) - 200;
    const long align_hi =
        static_cast<long>(p0 / s_min) + 7000;  // propagation delay headroom
    const long r_lo = std::max(0L, align_lo);
    const long r_hi = std::min<long>(static_cast<long>(received.size()),
                                     align_hi + static_cast<long>(seg_len));
    if (r_hi - r_lo < static_cast<long>(seg_len))
        throw EstimatorError("estimate_doppler_pct: received too short");
    const std::vector<double> region(received.samples.begin() + r_lo,
                                     received.samples.begin() + r_hi);

    // Prefix energies for local normalization.
    std::vector<double> energy(region.size() + 1, 0.0);
    for (std::size_t i = 0; i < region.size(); ++i)
        energy[i + 1] = energy[i] + region[i] * region[i];

    auto score_scale = [&](double s) -> double {
        // Template: source resampled by s around position p0/s.
        std::vector<double> tpl(seg_len);
        double tnorm = 0.0;
        const double start = std::floor(p0 / s);
        for (std::size_t k = 0; k < seg_len; ++k) {
            const double pos = s * (start + static_cast<double>(k));
            double v = 0.0;
            if (pos >= 0.0 && pos <= static_cast<double>(src.size() - 1)) {
                const auto i0 = static_cast<std::size_t>(pos);
                const double frac = pos - static_cast<double>(i0);
                v = frac == 0.0 ? src[i0]
                                : src[i0] * (1.0 - frac) + src[i0 + 1] * frac;
            }
            tpl[k] = v;
            tnorm += v * v;
        }
        if (tnorm <= 0.0) return 0.0;

        auto corr = xcorr_full(region, tpl);
        // corr index k: alignment of tpl at region offset k - (seg_len - 1).
        double best = 0.0;
        for (std::size_t k = seg_len - 1; k < corr.size(); ++k) {
            const std::size_t off = k - (seg_len - 1);
            if (off + seg_len > region.size()) break;
            const double local = energy[off + seg_len] - energy[off];
            if (local <= 0.0) continue;
            const double ncc = corr[k] / std::sqrt(tnorm * local);
            best = std::max(best, ncc);
        }
        return best;
    };

    double lo = s_min, hi = s_max;
    double best_s = 1.0, best_score = -1.0;
    for (int level = 0; level < 3; ++level) {
        const int n_pts = 41;
        double level_best_s = lo, level_best = -1.0;
        for (int i = 0; i < n_pts; ++i) {
            const double s = lo + (hi - lo) * i / (n_pts - 1);
            const double sc = score_scale(s);
            if (sc > level_best) {
                level_best = sc;
                level_best_s = s;
            }
        }
        best_s = level_best_s;
        best_score = level_best;
        const double step = (hi - lo) / (n_pts - 1);
        lo = std::max(s_min, best_s - 1.2 * step);
        hi = std::min(s_max, best_s + 1.2 * step);
    }
    if (best_score < 0.15)
        throw EstimatorError("estimate_doppler_pct: no correlation peak");

    // Parabolic refinement around the final best.
    const double h = (hi - lo) / 40.0;
    const double f_m = score_scale(best_s - h);
    const double f_0 = best_score;
    const double f_p = score_scale(best_s + h);
    double s_hat = best_s;
    const double denom = f_m - 2.0 * f_0 + f_p;
    if (std::fabs(denom) > 1e-15)
        s_hat += h * 0.5 * (f_m - f_p) / denom;

    return 100.0 * (s_hat - 1.0);
}

double estimate_rt60(const ImpulseResponse& ir) {
    const auto& h = ir.samples.samples;
    if (h.empty() || ir.samples.rms() <= 0.0)
        throw EstimatorError("estimate_rt60: silent impulse response");

    // Schroeder backward energy integration.
    std::vector<double> edc(h.size());
    double acc = 0.0;
    for (std::size_t i = h.size(); i-- > 0;) {
        acc += h[i] * h[i];
        edc[i] = acc;
    }
    const double e0 = edc[0];
    std::size_t i5 = h.size(), i25 = h.size();
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double db = 20.0 * std::log10(edc[i] / e0 + 1e-300);
        if (i5 == h.size() && db <= -5.0) i5 = i;
        if (db <= -25.0) {
            i25 = i;
            break;
        }
    }
    if (i5 >= h.size() || i25 >= h.size() || i25 <= i5 + 1)
        throw EstimatorError("estimate_rt60: decay range not reached");

    // Least-squares slope of the -5..-25 dB stretch, extrapolated to -60.
    const double fs = ir.samples.sample_rate;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(i25 - i5 + 1);
    for (std::size_t i = i5; i <= i25; ++i) {
        const double x = static_cast<double>(i) / fs;
        const double y = 20.0 * std::log10(edc[i] / e0 + 1e-300);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(slope < 0.0)) throw EstimatorError("estimate_rt60: no decay slope");
    return -60.0 / slope;
}

namespace {

// Occupied bandwidth (5th to 95th percentile of spectral power), Hz.
double occupied_bandwidth_hz(const std::vector<double>& pulse, int fs) {
    const std::size_t nfft = next_pow2(std::max<std::size_t>(pulse.size(), 256));
    auto spec = rfft(pulse, nfft);
    std::vector<double> power(spec.size());
    double total = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        power[i] = std::norm(spec[i]);
        total += power[i];
    }
    if (total <= 0.0) return fs / 4.0;
    double acc = 0.0;
    std::size_t lo = 0, hi = spec.size() - 1;
    for (std::size_t i = 0; i < power.size(); ++i) {
        acc += power[i];
        if (acc >= 0.05 * total) {
            lo = i;
            break;
        }
    }
    acc = 0.0;
    for (std::size_t i = power.size(); i-- > 0;) {
        acc += power[i];
        if (acc >= 0.05 * total) {
            hi = i;
            break;
        }
    }
    const double bin_hz = static_cast<double>(fs) / nfft;
    return std::max((static_cast<double>(hi) - lo) * bin_hz, 200.0);
}

}  // namespace

int estimate_tof_matched(const Signal& received, const Signal& pulse) {
    if (received.rms() <= 0.0 || pulse.rms() <= 0.0)
        throw EstimatorError("estimate_tof_matched: silent input");
    if (received.size() < pulse.size())
        throw EstimatorError("estimate_tof_matched: received shorter than pulse");

    // Hann-taper the active part of the replica: suppresses compression
    // sidelobes that would otherwise mask weak echoes near a strong arrival.
    const auto& p = pulse.samples;
    const double pk = pulse.peak();
    std::size_t a = 0, b = p.size();
    while (a < p.size() && std::fabs(p[a]) < 1e-6 * pk) ++a;
    while (b > a && std::fabs(p[b - 1]) < 1e-6 * pk) --b;
    std::vector<double> replica(p.size(), 0.0);
    const std::size_t active = b - a;
    if (active < 8)
        throw EstimatorError("estimate_tof_matched: pulse too short");
    for (std::size_t i = 0; i < active; ++i) {
        const double w =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                 static_cast<double>(i) /
                                 static_cast<double>(active - 1));
        replica[a + i] = p[a + i] * w;
    }

    auto mf = xcorr_full(received.samples, replica);
    auto env = analytic_envelope(mf);

    std::size_t t1 = 0;
    double m1 = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (env[i] > m1) {
            m1 = env[i];
            t1 = i;
        }

    const double bw = occupied_bandwidth_hz(replica, pulse.sample_rate);
    const auto guard = static_cast<std::size_t>(
        std::max(64.0, std::ceil(4.5 * pulse.sample_rate / bw)));

    std::size_t t2 = 0;
    double m2 = -1.0;
    for (std::size_t i = t1 + guard; i < env.size(); ++i)
        if (env[i] > m2) {
            m2 = env[i];
            t2 = i;
        }
    if (m2 < 0.01 * m1)
        throw EstimatorError("estimate_tof_matched: no echo above threshold");
    return static_cast<int>(t2 - t1);
}

double los_first_arrival_strength(const ImpulseResponse& ir) {
    const auto& h = ir.samples.samples;
    if (h.empty()) throw EstimatorError("los strength: empty impulse response");
    double gmax = 0.0;
    for (double v : h) gmax = std::max(gmax, std::fabs(v));
    if (gmax <= 0.0)
        throw EstimatorError("los strength: silent impulse response");

    const double gate = std::max(0.05 * gmax, 1e-4);
    std::size_t onset = 0;
    while (onset < h.size() && std::fabs(h[onset]) < gate) ++onset;

    // Canonical direct-path kernel template.
    const Signal z = damped_sinusoid(kPathBaseFreqHz, kPathBaseDecayHz,
                                     kPathDurationS);
    double zz = 0.0;
    for (double v : z.samples) zz += v * v;

    double best = 0.0;
    const std::size_t lo = onset >= 3 ? onset - 3 : 0;
    for (std::size_t k = lo; k <= onset + 3; ++k) {
        if (k + z.size() > h.size()) break;
        double dot = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            dot += h[k + i] * z.samples[i];
        best = std::max(best, dot / zz);
    }
    return best;
}

bool estimate_los_present(const ImpulseResponse& ir) {
    return los_first_arrival_strength(ir) >= kLosStrengthThreshold;
}

double doa_from_tdoa(double tdoa_s, double d_m, double c) {
    if (d_m <= 0.0) throw ParamError("doa_from_tdoa: bad mic distance");
    double ratio = tdoa_s * c / d_m;
    if (std::fabs(ratio) > 1.0 + 1e-9)
        throw ParamError("doa_from_tdoa: |tdoa * c| exceeds mic distance");
    ratio = std::clamp(ratio, -1.0, 1.0);
    return std::acos(ratio) * 180.0 / std::numbers::pi;
}

double distance_from_tof(double tof_ms, double c) {
    if (!(tof_ms > 0.0)) throw ParamError("distance_from_tof: tof must be > 0");
    return c * (tof_ms / 1000.0) / 2.0;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ScoringError("load_predictions: cannot open " + path.string());
    std::vector<Prediction> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out.push_back({j.at("id").get<std::string>(),
                       j.at("answer_text").get<std::string>()});
    }
    return out;
}

MetricReport score_predictions(const std::vector<Datapoint>& manifest,
                               const std::vector<Prediction>& predictions) {
    std::map<std::string, const Datapoint*> by_id;
    for (const auto& dp : manifest) by_id.emplace(dp.id, &dp);

    MetricReport rep;
    std::size_t los_n = 0, los_ok = 0;
    std::size_t tca_n = 0, tca_ok = 0;
    double mae_f_sum = 0.0;
    std::size_t mae_f_n = 0;
    double mae_t_sum = 0.0;
    std::size_t mae_t_n = 0;
    std::vector<double> range_err_m;
    double range_dmax = 0.0;

    for (const auto& pred : predictions) {
        const auto it = by_id.find(pred.id);
        if (it == by_id.end())
            throw ScoringError("score_predictions: unknown id '" + pred.id +
                               "'");
        const Datapoint& dp = *it->second;
        if (dp.qa.form != QAPair::Form::kClosed)
            continue;  // open-form answers have no canonical grammar
        TaskScore& ts = rep.per_task[task_slug(dp.task)];
        ts.n++;

        switch (dp.task) {
            case Task::kLosDetection: {
                const auto ref = parse_yes_no(dp.qa.answer);
                const auto got = parse_yes_no(pred.answer_text);
                ++los_n;
                if (got) ts.parsed++;
                if (got && ref && *got == *ref) ++los_ok;
                break;
            }
            case Task::kDopplerEstimation: {
                if (template_is_numeric(dp.qa.template_id)) {
                    const auto ref = parse_percent(dp.qa.answer);
                    const auto got = parse_percent(pred.answer_text);
                    ++mae_f_n;
                    if (got) {
                        ts.parsed++;
                        mae_f_sum += std::fabs(*got - *ref);
                    } else {
                        mae_f_sum += kDopplerBaselineMae;
                    }
                } else {
                    const auto ref = parse_direction(dp.qa.answer);
                    const auto got = parse_direction(pred.answer_text);
                    ts.aux_n++;
                    if (got) ts.parsed++;
                    if (got && ref && *got == *ref) ts.aux_correct++;
                }
                break;
            }
            case Task::kDoaEstimation: {
                if (template_is_numeric(dp.qa.template_id)) {
                    const auto ref = parse_samples(dp.qa.answer);
                    const auto got = parse_samples(pred.answer_text);
                    ++mae_t_n;
                    if (got) {
                        ts.parsed++;
                        mae_t_sum += std::fabs(static_cast<double>(*got - *ref));
                    } else {
                        mae_t_sum += kDoaBaselineMae;
                    }
                } else {
                    const auto ref = parse_side(dp.qa.answer);
                    const auto got = parse_side(pred.answer_text);
                    ts.aux_n++;
                    if (got) ts.parsed++;
                    if (got && ref && *got == *ref) ts.aux_correct++;
                }
                break;
            }
            case Task::kMultipathAnalysis: {
                const auto ref = parse_class(dp.qa.answer);
                const auto got = parse_class(pred.answer_text);
                ++tca_n;
                if (got) ts.parsed++;
                if (got && ref && *got == *ref) ++tca_ok;
                break;
            }
            case Task::kRangeEstimation: {
                const auto ref = parse_ms(dp.qa.answer);
                const auto got = parse_ms(pred.answer_text);
                const double d_ref = distance_from_tof(*ref);
                range_dmax = std::max(range_dmax, d_ref);
                if (got && *got > 0.0) {
                    ts.parsed++;
                    range_err_m.push_back(
                        std::fabs(distance_from_tof(*got) - d_ref));
                } else {
                    range_err_m.push_back(-1.0);  // baseline sentinel
                }
                break;
            }
        }
    }

    rep.bca = los_n ? static_cast<double>(los_ok) / los_n : 0.0;
    rep.tca = tca_n ? static_cast<double>(tca_ok) / tca_n : 0.0;
    rep.mae_f = mae_f_n ? mae_f_sum / mae_f_n : 0.0;
    rep.mae_t = mae_t_n ? mae_t_sum / mae_t_n : 0.0;
    if (!range_err_m.empty()) {
        // Relative error normalized by the largest true distance in the
        // scored set; unparseable answers contribute the random baseline.
        double acc = 0.0;
        for (double e : range_err_m)
            acc += e < 0.0 ? kRangeBaselineRep
                           : 100.0 * e / std::max(range_dmax, 1e-9);
        rep.rep = acc / static_cast<double>(range_err_m.size());
    }

    for (auto& [slug, ts] : rep.per_task) {
        if (slug == "los") ts.metric = rep.bca;
        if (slug == "doppler") ts.metric = rep.mae_f;
        if (slug == "doa") ts.metric = rep.mae_t;
        if (slug == "multipath") ts.metric = rep.tca;
        if (slug == "range") ts.metric = rep.rep;
    }
    return rep;
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json j;
    j["bca"] = bca;
    j["tca"] = tca;
    j["mae_f"] = mae_f;
    j["mae_t"] = mae_t;
    j["rep"] = rep;
    for (const auto& [slug, ts] : per_task) {
        j["per_task"][slug] = {{"n", ts.n},
                               {"parsed", ts.parsed},
                               {"aux_n", ts.aux_n},
                               {"aux_correct", ts.aux_correct},
                               {"metric", ts.metric}};
    }
    return j;
}

std::string MetricReport::to_table() const {
    std::ostringstream os;
    os << "task        n       metric\n";
    auto row = [&os](const char* name, std::size_t n, double v,
                     const char* unit) {
        os << name;
        for (std::size_t i = std::string(name).size(); i < 12; ++i) os << ' ';
        std::string ns = std::to_string(n);
        os << ns;
        for (std::size_t i = ns.size(); i < 8; ++i) os << ' ';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f %s", v, unit);
        os << buf << '\n';
    };
    auto find = [this](const char* slug) -> std::size_t {
        auto it = per_task.find(slug);
        return it == per_task.end() ? 0 : it->second.n;
    };
    row("los", find("los"), bca, "BCA");
    row("doppler", find("doppler"), mae_f, "MAE_f (pct)");
    row("doa", find("doa"), mae_t, "MAE_t (samples)");
    row("multipath", find("multipath"), tca, "TCA");
    row("range", find("range"), rep, "REP (pct)");
    return os.str();
}

bool ClosureResult::all_passed(
    const std::map<std::string, double>& thresholds) const {
    for (const auto& [slug, thr] : thresholds) {
        auto it = pass_rate.find(slug);
        if (it == pass_rate.end()) continue;  // task absent from manifest
        if (it->second < thr) return false;
    }
    return true;
}

ClosureResult run_closure(const std::vector<Datapoint>& manifest,
                          const std::filesystem::path& manifest_dir) {
    ClosureResult res;
    std::map<std::string, std::size_t> passed;

    for (const auto& dp : manifest) {
        const std::string slug = task_slug(dp.task);
        res.counts[slug]++;
        bool ok = false;
        try {
            ScenarioInstance inst = sample_scenario_seeded(
                dp.task, dp.scenario_seed, /*pool_size=*/1, SnrPolicy::off());
            switch (dp.task) {
                case Task::kLosDetection: {
                    ok = estimate_los_present(build_cir(inst)) ==
                         *dp.ground_truth.los_present;
                    break;
                }
                case Task::kDopplerEstimation: {
                    const auto src =
                        wav_read(manifest_dir / dp.audio_paths.at(0));
                    const auto rcv =
                        wav_read(manifest_dir / dp.audio_paths.at(1));
                    const double est = estimate_doppler_pct(
                        Signal(src.channels.at(0)),
                        Signal(rcv.channels.at(0)));
                    ok = std::fabs(est - *dp.ground_truth.shift_pct) <= 0.5;
                    break;
                }
                case Task::kDoaEstimation: {
                    const auto wav =
                        wav_read(manifest_dir / dp.audio_paths.at(0));
                    const int lag = estimate_tdoa_xcorr(
                        Signal(wav.channels.at(0)), Signal(wav.channels.at(1)),
                        16);
                    const int want = *dp.ground_truth.tdoa_quantized;
                    ok = dp.snr_db ? std::abs(lag - want) <= 1 : lag == want;
                    break;
                }
                case Task::kMultipathAnalysis: {
                    const double rt = estimate_rt60(build_cir(inst));
                    const double lambda_hat = 3.0 * std::log(10.0) / (2.0 * rt);
                    MultipathClass cls;
                    if (lambda_hat < kMultipathRichMax)
                        cls = MultipathClass::kRich;
                    else if (lambda_hat < kMultipathModerateMax)
                        cls = MultipathClass::kModerate;
                    else
                        cls = MultipathClass::kNegligible;
                    ok = cls == *dp.ground_truth.multipath_class;
                    break;
                }
                case Task::kRangeEstimation: {
                    const auto wav =
                        wav_read(manifest_dir / dp.audio_paths.at(0));
                    Signal pulse = build_source(inst, nullptr);
                    if (inst.components.doppler)
                        pulse = apply_doppler(pulse, *inst.components.doppler);
                    const int est = estimate_tof_matched(
                        Signal(wav.channels.at(0)), pulse);
                    const int want = static_cast<int>(
                        std::llround(*dp.ground_truth.tof_ms / 1000.0 *
                                     kSampleRate));
                    ok = std::abs(est - want) <= 1;
                    break;
                }
            }
        } catch (const std::exception& e) {
            res.failures.push_back(dp.id + ": " + e.what());
            ok = false;
        }
        if (ok) passed[slug]++;
        else if (res.failures.empty() || res.failures.back().rfind(dp.id, 0) != 0)
            res.failures.push_back(dp.id + ": oracle mismatch");
    }
    for (const auto& [slug, n] : res.counts)
        res.pass_rate[slug] =
            static_cast<double>(passed[slug]) / static_cast<double>(n);
    return res;
}

}  // namespace acsim
