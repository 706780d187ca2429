#ifndef ACSIM_QA_HPP
#define ACSIM_QA_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "acsim/scenario.hpp"

namespace acsim {

struct QAPair {
    std::string question;
    std::string answer;
    enum class Form { kClosed, kOpen } form = Form::kClosed;
    std::string template_id;
};

// Renders a closed-form question/answer pair for the task's ground truth.
// The question is drawn from the task's paraphrase templates; the answer
// follows the task grammar exactly:
//   LOS        "Yes." / "No."
//   Doppler    "Approaching." / "Receding."  or  "<pct 2dp>%."
//   DoA        "Left." / "Right." / "Front." or  "<signed int> samples."
//   Multipath  "Rich." / "Moderate." / "Negligible."
//   Range      "<ms 1dp> ms."
QAPair make_closed_qa(Task task, const GroundTruth& gt, std::uint64_t seed);

// Answer-grammar helpers shared by the generator and the scorer.
std::string format_pct_answer(double pct);
std::string format_samples_answer(int samples);
std::string format_ms_answer(double ms);

// Lenient parsers used when scoring model output; nullopt = unparseable.
std::optional<bool> parse_yes_no(const std::string& text);
std::optional<bool> parse_direction(const std::string& text);  // true=approaching
std::optional<double> parse_percent(const std::string& text);
std::optional<int> parse_samples(const std::string& text);
std::optional<std::string> parse_side(const std::string& text);  // Left/Right/Front
std::optional<MultipathClass> parse_class(const std::string& text);
std::optional<double> parse_ms(const std::string& text);

// True when the template produces a numeric answer (percentage / samples),
// false for the categorical variants.
bool template_is_numeric(const std::string& template_id);

}  // namespace acsim

#endif
