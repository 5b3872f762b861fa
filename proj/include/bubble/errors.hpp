#pragma once

#include <stdexcept>
#include <string>

namespace bubble {

// Exit-code families used by the CLI: validation 1, numerical 2, invariant 3.
enum class ErrorKind { validation, numerical, invariant };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& what, std::string field = {})
        : std::runtime_error(what), kind_(kind), code_(std::move(code)), field_(std::move(field)) {}
    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }
    // Offending config field, empty when not applicable.
    const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string code_;
    std::string field_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::invariant: return "invariant";
    }
    return "?";
}

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::validation: return 1;
        case ErrorKind::numerical: return 2;
        case ErrorKind::invariant: return 3;
    }
    return 2;
}

inline Error validation_error(std::string code, const std::string& what) {
    return Error(ErrorKind::validation, std::move(code), what);
}

inline Error numerical_error(std::string code, const std::string& what) {
    return Error(ErrorKind::numerical, std::move(code), what);
}

inline Error config_error(const std::string& field, const std::string& what) {
    return Error(ErrorKind::validation, "ConfigInvalid", field + ": " + what, field);
}

inline Error invariant_error(std::string code, const std::string& what) {
    return Error(ErrorKind::invariant, std::move(code), what);
}

}  // namespace bubble
