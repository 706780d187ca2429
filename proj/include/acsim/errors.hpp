#ifndef ACSIM_ERRORS_HPP
#define ACSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace acsim {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values (ranges, inverted bands, non-positive scales).
struct ParamError : Error {
    using Error::Error;
};

// Operation received an empty signal or an input shorter than it can process.
struct EmptyInputError : Error {
    using Error::Error;
};

// A component spec violates its invariants (path amplitudes, band lists, ...).
struct SpecError : Error {
    using Error::Error;
};

// API misuse: ground truth / task mismatch, wrong audio count, etc.
struct ContractError : Error {
    using Error::Error;
};

struct EstimatorError : Error {
    using Error::Error;
};

struct IngestError : Error {
    using Error::Error;
};

struct RenderError : Error {
    using Error::Error;
};

struct ScoringError : Error {
    using Error::Error;
};

}  // namespace acsim

#endif
