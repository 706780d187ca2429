#include <doctest.h>

#include <cmath>

#include "acsim/errors.hpp"
#include "acsim/rng.hpp"
#include "acsim/scenario.hpp"
#include "acsim/verify.hpp"
#include "helpers.hpp"

using namespace acsim;

namespace {

const SourcePool& shared_pool() {
    static SourcePool pool = SourcePool::ingest(
        test::make_test_sources(test::temp_dir("scenario-pool")));
    return pool;
}

}  // namespace

TEST_SUITE_BEGIN("scenario");

TEST_CASE("component toggles follow the task matrix") {
    const auto& pool = shared_pool();
    for (Task task : kAllTasks) {
        for (std::uint64_t i = 0; i < 2000; ++i) {
            const auto inst = sample_scenario(task, 123, i, pool);
            const auto& c = inst.components;
            switch (task) {
                case Task::kLosDetection:
                    CHECK_FALSE(c.array.has_value());
                    if (!c.has_los) CHECK(c.has_reflections);
                    break;
                case Task::kDopplerEstimation:
                    CHECK(c.doppler.has_value());
                    CHECK_FALSE(c.array.has_value());
                    break;
                case Task::kDoaEstimation:
                    CHECK(c.has_los);
                    CHECK(c.array.has_value());
                    break;
                case Task::kMultipathAnalysis:
                    CHECK(c.reverb.has_value());
                    CHECK_FALSE(c.array.has_value());
                    break;
                case Task::kRangeEstimation:
                    CHECK(c.has_los);
                    CHECK(inst.target_tof_samples > 0);
                    CHECK_FALSE(c.reverb.has_value());
                    CHECK_FALSE(c.array.has_value());
                    break;
            }
        }
    }
}

TEST_CASE("line-of-sight positives and negatives are balanced") {
    const auto& pool = shared_pool();
    std::size_t on = 0;
    const std::size_t n = 10000;
    for (std::uint64_t i = 0; i < n; ++i)
        if (sample_scenario(Task::kLosDetection, 7, i, pool).components.has_los)
            ++on;
    const double frac = static_cast<double>(on) / n;
    CHECK(frac > 0.48);
    CHECK(frac < 0.52);
}

TEST_CASE("sampling is deterministic in seed and index") {
    const auto& pool = shared_pool();
    const auto a = sample_scenario(Task::kDoaEstimation, 99, 3, pool);
    const auto b = sample_scenario(Task::kDoaEstimation, 99, 3, pool);
    CHECK(a.seed == b.seed);
    CHECK(a.components.array->theta_deg == b.components.array->theta_deg);
    CHECK(a.components.paths.size() == b.components.paths.size());
    const auto c = sample_scenario(Task::kDoaEstimation, 99, 4, pool);
    CHECK(a.components.array->theta_deg != c.components.array->theta_deg);
}

TEST_CASE("unknown task names are rejected") {
    CHECK_THROWS_AS(parse_task("EchoLocation"), ParamError);
    CHECK(parse_task("DoAEstimation") == Task::kDoaEstimation);
    CHECK(parse_task("doa") == Task::kDoaEstimation);
}

TEST_CASE("rendered audio is finite, normalized, and non-silent") {
    const auto& pool = shared_pool();
    for (Task task : kAllTasks) {
        const auto inst = sample_scenario(task, 2023, 1, pool);
        const Rendered r = render(inst, &pool);
        for (const auto& ch : r.channels) {
            CHECK(ch.all_finite());
            CHECK(ch.peak() <= 0.89 + 1e-12);
            CHECK(ch.rms() > 0.0);
        }
    }
}

TEST_CASE("noiseless binaural rendering plants the exact lag") {
    const auto& pool = shared_pool();
    for (std::uint64_t i = 0; i < 8; ++i) {
        const auto inst = sample_scenario(Task::kDoaEstimation, 31, i, pool,
                                          SnrPolicy::off());
        const Rendered r = render(inst, &pool);
        REQUIRE(r.channels.size() == 2);
        const int lag =
            estimate_tdoa_xcorr(r.channels[0], r.channels[1], 16);
        CHECK(lag == *r.ground_truth.tdoa_quantized);
    }
}

TEST_CASE("noiseless range rendering plants the exact echo separation") {
    const auto& pool = shared_pool();
    for (std::uint64_t i = 0; i < 8; ++i) {
        const auto inst = sample_scenario(Task::kRangeEstimation, 77, i, pool,
                                          SnrPolicy::off());
        const Rendered r = render(inst, &pool);
        const int sep = estimate_tof_matched(r.channels[0], r.transmitted);
        const int want = inst.target_tof_samples;
        CHECK(std::abs(sep - want) <= 1);
    }
}

TEST_CASE("noise off returns the input unchanged") {
    const Signal x = gaussian_noise(8000, 3);
    const Signal y = add_noise_at_snr(x, std::nullopt, 5);
    CHECK(x.samples == y.samples);
}

TEST_CASE("zero dB noise matches signal power") {
    const Signal x = test::make_tone(500.0, 2.0);
    const Signal y = add_noise_at_snr(x, 0.0, 17);
    double p_sig = 0.0, p_noise = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        p_sig += x.samples[i] * x.samples[i];
        const double n = y.samples[i] - x.samples[i];
        p_noise += n * n;
    }
    const double snr_db = 10.0 * std::log10(p_sig / p_noise);
    CHECK(std::fabs(snr_db) < 0.1);
}

TEST_CASE("twenty dB noise variance on a unit-power tone") {
    Signal x = test::make_tone(500.0, 10.0, std::sqrt(2.0));  // unit power
    const Signal y = add_noise_at_snr(x, 20.0, 23);
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = y.samples[i] - x.samples[i];
        var += n * n;
    }
    var /= x.size();
    CHECK(var == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("noise rejects silent input") {
    Signal x;
    x.samples.assign(100, 0.0);
    CHECK_THROWS_AS(add_noise_at_snr(x, 10.0, 1), ParamError);
}

TEST_CASE("multipath classes split on mean decay rate") {
    ReverbSpec spec;
    spec.decay_rates.fill(1.5);
    CHECK(classify_multipath(spec) == MultipathClass::kRich);
    spec.decay_rates.fill(60.0);
    CHECK(classify_multipath(spec) == MultipathClass::kNegligible);
    spec.decay_rates.fill(6.0);
    CHECK(classify_multipath(spec) == MultipathClass::kModerate);
    spec.decay_rates.fill(20.0);
    CHECK(classify_multipath(spec) == MultipathClass::kNegligible);
}

TEST_CASE("ground truth rederives from the component log") {
    const auto& pool = shared_pool();
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto inst = sample_scenario(Task::kLosDetection, 55, i, pool,
                                          SnrPolicy::off());
        const Rendered r = render(inst, &pool);
        bool has_los_component = false;
        for (const auto& c : r.ir.component_log)
            if (c.kind == ComponentKind::kLos) has_los_component = true;
        CHECK(has_los_component == *r.ground_truth.los_present);
    }
}

TEST_CASE("rendering is bit-deterministic end to end") {
    const auto& pool = shared_pool();
    const auto inst = sample_scenario(Task::kMultipathAnalysis, 808, 5, pool);
    const Rendered a = render(inst, &pool);
    const Rendered b = render(inst, &pool);
    REQUIRE(a.channels.size() == b.channels.size());
    for (std::size_t c = 0; c < a.channels.size(); ++c)
        CHECK(a.channels[c].samples == b.channels[c].samples);
}

TEST_CASE("ground truth serialization round-trips") {
    const auto& pool = shared_pool();
    for (Task task : kAllTasks) {
        const auto inst = sample_scenario(task, 404, 2, pool);
        const GroundTruth gt = derive_ground_truth(inst);
        const GroundTruth back = GroundTruth::from_json(gt.to_json());
        CHECK(back.task == gt.task);
        CHECK(back.to_json() == gt.to_json());
    }
}

TEST_SUITE_END();
