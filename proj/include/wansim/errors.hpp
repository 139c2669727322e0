#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wansim {

// Two error categories, mirrored by the CLI exit codes: validation errors
// reject inputs (exit 1), runtime errors abort an execution (exit 2).
enum class ErrorCategory { validation, runtime };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string kind, std::string message)
        : std::runtime_error(kind + ": " + message),
          category_(category),
          kind_(std::move(kind)),
          message_(std::move(message)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCategory category_;
    std::string kind_;
    std::string message_;
};

[[noreturn]] inline void fail_validation(std::string kind, const std::string& message) {
    throw Error(ErrorCategory::validation, std::move(kind), message);
}

[[noreturn]] inline void fail_runtime(std::string kind, const std::string& message) {
    throw Error(ErrorCategory::runtime, std::move(kind), message);
}

}  // namespace wansim
