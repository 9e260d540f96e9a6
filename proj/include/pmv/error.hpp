#pragma once

#include <stdexcept>
#include <string>

namespace pmv {

enum class ErrorCode {
    invalid_argument,
    source_empty,
    invalid_system,
    invalid_source,
    invalid_rect,
    degenerate_homography,
    invalid_trajectory,
    missing_source,
    missing_clip,
    shape_mismatch,
    geometry,
    degenerate_ratio,
    insufficient_data,
    invalid_config,
    io,
    corrupt_file,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

    ErrorCode code() const noexcept { return code_; }
    // what() without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace pmv
