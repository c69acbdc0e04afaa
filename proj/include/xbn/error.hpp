#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xbn {

/// Broad failure classes. Front ends map these onto exit codes and HTTP
/// statuses, so every thrown error carries exactly one.
enum class ErrorKind {
    Usage,               // bad arguments: unknown variable/state, overlapping sets
    Validation,          // network fails structural or numeric checks
    Parse,               // lexical/syntactic error in a network document
    ImpossibleEvidence,  // P(e) = 0
    DegenerateExplanation,
    GuardExceeded,
    NotFound,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& message) : Error(ErrorKind::Usage, message) {}
};

class ValidationError : public Error {
public:
    ValidationError(std::string variable, const std::string& message)
        : Error(ErrorKind::Validation, message), variable_(std::move(variable)) {}

    /// Name of the offending variable (empty for network-level problems).
    const std::string& variable() const noexcept { return variable_; }

private:
    std::string variable_;
};

struct ParseDiagnostic {
    enum class Severity { Error, Warning };

    int line = 0;    // 1-based
    int column = 0;  // 1-based
    std::string message;
    Severity severity = Severity::Error;
};

std::string to_string(const ParseDiagnostic& d);

class ParseError : public Error {
public:
    explicit ParseError(ParseDiagnostic diagnostic)
        : Error(ErrorKind::Parse, to_string(diagnostic)), diagnostic_(std::move(diagnostic)) {}

    const ParseDiagnostic& diagnostic() const noexcept { return diagnostic_; }

private:
    ParseDiagnostic diagnostic_;
};

class ImpossibleEvidenceError : public Error {
public:
    explicit ImpossibleEvidenceError(const std::string& message = "impossible evidence: P(e) = 0")
        : Error(ErrorKind::ImpossibleEvidence, message) {}
};

class DegenerateExplanationError : public Error {
public:
    explicit DegenerateExplanationError(const std::string& message)
        : Error(ErrorKind::DegenerateExplanation, message) {}
};

class GuardExceededError : public Error {
public:
    explicit GuardExceededError(const std::string& message)
        : Error(ErrorKind::GuardExceeded, message) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message) : Error(ErrorKind::NotFound, message) {}
};

}  // namespace xbn
