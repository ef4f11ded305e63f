#pragma once

#include <stdexcept>
#include <string>

namespace dpht {

enum class ErrorCode {
    invalid_input,      // malformed observations (non-finite, empty, out of range)
    invalid_parameter,  // bad epsilon/delta/split/z/alpha or infeasible configuration
    degenerate,         // statistic undefined for this database
    parse,              // CSV content could not be interpreted
    range,              // bounded-sample value outside [-1, 1]
    io,                 // file could not be opened or read
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dpht
