#pragma once

#include <stdexcept>
#include <string>

namespace dwid {

enum class ErrorCode {
    invalid_argument,
    malformed_header,
    dimension_mismatch,
    non_finite,
    unsupported_version,
    missing_labels,
    empty_subset,
    degenerate_input,
    config,
    io,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code distinguishes validation
// failures from I/O failures so the CLI can map them to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    bool is_io() const noexcept { return code_ == ErrorCode::io; }

private:
    ErrorCode code_;
};

} // namespace dwid
