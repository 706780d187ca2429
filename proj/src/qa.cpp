#include "acsim/qa.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "acsim/errors.hpp"
#include "acsim/rng.hpp"

namespace acsim {

namespace {

// Question paraphrases per task. Numeric and categorical variants carry
// distinct template ids so the scorer knows which grammar to expect.
const std::array<const char*, 3> kLosQuestions = {
    "Does the audio contain a line-of-sight path?",
    "Is there a direct line-of-sight path between the sound source and the "
    "receiver in this audio?",
    "Listen to the audio and decide: does the sound reach the receiver "
    "through a clear line-of-sight path?",
};

const std::array<const char*, 3> kDopplerPctQuestions = {
    "You are provided with a two-channel audio recording. The first channel "
    "is the origin the sound. The second channel is the received audio. "
    "Please estimate the Doppler shift percentage.",
    "The first audio is the original sound and the second is the received "
    "audio. Estimate the Doppler shift percentage of the received audio.",
    "Comparing the received audio (second) against the original source "
    "(first), what is the Doppler shift percentage?",
};

const std::array<const char*, 3> kDopplerDirQuestions = {
    "You are provided with a two-channel audio recording. The first channel "
    "is the origin the sound. The second channel is the received audio. "
    "Please determine whether the sound source is approaching or receding.",
    "Given the original sound (first audio) and the received audio (second), "
    "is the source approaching or receding?",
    "From the pair of audios, original then received, decide whether the "
    "sound source moves toward the receiver or away from it.",
};

const std::array<const char*, 3> kDoaSamplesQuestions = {
    "Given a two-channel audio recording, where the first channel is from "
    "the left microphone and the second from the right. Please estimate the "
    "time difference of arrival.",
    "The stereo recording has the left microphone on channel one and the "
    "right microphone on channel two. Estimate the time difference of "
    "arrival in samples.",
    "Using the left (first) and right (second) microphone channels, what is "
    "the time difference of arrival between the microphones?",
};

const std::array<const char*, 3> kDoaSideQuestions = {
    "Given a two-channel audio recording, where the first channel is from "
    "the left microphone and the second from the right, which microphone "
    "receives the sound first?",
    "With the left microphone on channel one and the right microphone on "
    "channel two, which side hears the sound first?",
    "Listening to the stereo recording (left mic first channel, right mic "
    "second), which microphone picks up the sound earlier?",
};

const std::array<const char*, 3> kMultipathQuestions = {
    "How severe is the multipath effect in this audio?",
    "Rate the severity of the reverberation caused by multipath in this "
    "audio.",
    "How strong are the multipath reflections in the recording?",
};

const std::array<const char*, 3> kRangeQuestions = {
    "You are given audio data containing both the transmitted pulse and the "
    "echo. Please estimate the time of flight.",
    "The recording contains a transmitted sound pulse and its echo. What is "
    "the time of flight of the echo?",
    "From the audio with the emitted pulse and the returning echo, estimate "
    "the echo's time of flight.",
};

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(c));
    return out;
}

// First decimal number in the text, if any.
std::optional<double> first_number(const std::string& text) {
    const char* p = text.c_str();
    while (*p) {
        if (std::isdigit(static_cast<unsigned char>(*p)) ||
            ((*p == '-' || *p == '+') &&
             std::isdigit(static_cast<unsigned char>(p[1])))) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end != p) return v;
        }
        ++p;
    }
    return std::nullopt;
}

}  // namespace

std::string format_pct_answer(double pct) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%%.", pct);
    return buf;
}

std::string format_samples_answer(int samples) {
    return std::to_string(samples) + " samples.";
}

std::string format_ms_answer(double ms) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f ms.", ms);
    return buf;
}

QAPair make_closed_qa(Task task, const GroundTruth& gt, std::uint64_t seed) {
    if (gt.task != task)
        throw ContractError("make_closed_qa: ground truth does not match task");
    RngStream rng = RngStream::derive(seed, "qa-template");
    QAPair qa;
    qa.form = QAPair::Form::kClosed;

    switch (task) {
        case Task::kLosDetection: {
            if (!gt.los_present)
                throw ContractError("make_closed_qa: missing LOS label");
            const auto i = rng.uniform_int(kLosQuestions.size());
            qa.question = kLosQuestions[i];
            qa.template_id = "los-yn-" + std::to_string(i);
            qa.answer = *gt.los_present ? "Yes." : "No.";
            break;
        }
        case Task::kDopplerEstimation: {
            if (!gt.shift_pct)
                throw ContractError("make_closed_qa: missing Doppler label");
            // The directional form is ill-posed near zero speed.
            const bool allow_dir = gt.v_mps && std::fabs(*gt.v_mps) >= 1.0;
            const bool numeric = !allow_dir || rng.uniform() < 0.6;
            if (numeric) {
                const auto i = rng.uniform_int(kDopplerPctQuestions.size());
                qa.question = kDopplerPctQuestions[i];
                qa.template_id = "doppler-pct-" + std::to_string(i);
                qa.answer = format_pct_answer(*gt.shift_pct);
            } else {
                const auto i = rng.uniform_int(kDopplerDirQuestions.size());
                qa.question = kDopplerDirQuestions[i];
                qa.template_id = "doppler-dir-" + std::to_string(i);
                qa.answer = *gt.shift_pct > 0.0 ? "Approaching." : "Receding.";
            }
            break;
        }
        case Task::kDoaEstimation: {
            if (!gt.tdoa_quantized)
                throw ContractError("make_closed_qa: missing DoA label");
            const bool numeric = rng.uniform() < 0.6;
            if (numeric) {
                const auto i = rng.uniform_int(kDoaSamplesQuestions.size());
                qa.question = kDoaSamplesQuestions[i];
                qa.template_id = "doa-samples-" + std::to_string(i);
                qa.answer = format_samples_answer(*gt.tdoa_quantized);
            } else {
                const auto i = rng.uniform_int(kDoaSideQuestions.size());
                qa.question = kDoaSideQuestions[i];
                qa.template_id = "doa-side-" + std::to_string(i);
                // Positive TDoA = right mic receives later = left hears first.
                if (*gt.tdoa_quantized > 0)
                    qa.answer = "Left.";
                else if (*gt.tdoa_quantized < 0)
                    qa.answer = "Right.";
                else
                    qa.answer = "Front.";
            }
            break;
        }
        case Task::kMultipathAnalysis: {
            if (!gt.multipath_class)
                throw ContractError("make_closed_qa: missing multipath label");
            const auto i = rng.uniform_int(kMultipathQuestions.size());
            qa.question = kMultipathQuestions[i];
            qa.template_id = "multipath-class-" + std::to_string(i);
            qa.answer = multipath_class_name(*gt.multipath_class) + ".";
            break;
        }
        case Task::kRangeEstimation: {
            if (!gt.tof_ms)
                throw ContractError("make_closed_qa: missing range label");
            const auto i = rng.uniform_int(kRangeQuestions.size());
            qa.question = kRangeQuestions[i];
            qa.template_id = "range-tof-" + std::to_string(i);
            qa.answer = format_ms_answer(*gt.tof_ms);
            break;
        }
    }
    return qa;
}

bool template_is_numeric(const std::string& template_id) {
    return template_id.find("-pct-") != std::string::npos ||
           template_id.find("-samples-") != std::string::npos ||
           template_id.find("-tof-") != std::string::npos;
}

namespace {

// Position of `word` in `t` as a whole word, or npos.
std::size_t find_word(const std::string& t, const std::string& word) {
    std::size_t pos = 0;
    while ((pos = t.find(word, pos)) != std::string::npos) {
        const bool left_ok =
            pos == 0 || !std::isalpha(static_cast<unsigned char>(t[pos - 1]));
        const std::size_t end = pos + word.size();
        const bool right_ok =
            end >= t.size() ||
            !std::isalpha(static_cast<unsigned char>(t[end]));
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

}  // namespace

std::optional<bool> parse_yes_no(const std::string& text) {
    const std::string t = lower(text);
    const std::size_t y = find_word(t, "yes");
    const std::size_t n = find_word(t, "no");
    if (y == std::string::npos && n == std::string::npos) return std::nullopt;
    if (y != std::string::npos && (n == std::string::npos || y < n))
        return true;
    return false;
}

std::optional<bool> parse_direction(const std::string& text) {
    const std::string t = lower(text);
    const bool app = t.find("approach") != std::string::npos;
    const bool rec = t.find("reced") != std::string::npos ||
                     t.find("away") != std::string::npos;
    if (app && !rec) return true;
    if (rec && !app) return false;
    return std::nullopt;
}

std::optional<double> parse_percent(const std::string& text) {
    return first_number(text);
}

std::optional<int> parse_samples(const std::string& text) {
    const auto v = first_number(text);
    if (!v) return std::nullopt;
    return static_cast<int>(std::llround(*v));
}

std::optional<std::string> parse_side(const std::string& text) {
    const std::string t = lower(text);
    const bool l = t.find("left") != std::string::npos;
    const bool r = t.find("right") != std::string::npos;
    const bool f = t.find("front") != std::string::npos;
    if (l && !r && !f) return "Left.";
    if (r && !l && !f) return "Right.";
    if (f && !l && !r) return "Front.";
    return std::nullopt;
}

std::optional<MultipathClass> parse_class(const std::string& text) {
    const std::string t = lower(text);
    const bool rich = t.find("rich") != std::string::npos;
    const bool mod = t.find("moderate") != std::string::npos;
    const bool neg = t.find("negligible") != std::string::npos;
    if (rich && !mod && !neg) return MultipathClass::kRich;
    if (mod && !rich && !neg) return MultipathClass::kModerate;
    if (neg && !rich && !mod) return MultipathClass::kNegligible;
    return std::nullopt;
}

std::optional<double> parse_ms(const std::string& text) {
    return first_number(text);
}

}  // namespace acsim
