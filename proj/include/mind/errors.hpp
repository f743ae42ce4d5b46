#pragma once

#include <stdexcept>
#include <string>

namespace mind {

// Error with a stable machine-readable code plus a human detail string.
// Codes are part of the public contract and are asserted by tests.
class CodedError : public std::runtime_error {
public:
    CodedError(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Violations of domain rules (bad willingness range, dangling item keys, ...).
class DomainError : public CodedError {
public:
    using CodedError::CodedError;
};

// Structural problems in serialized inputs (missing fields, wrong schema tag).
class ParseError : public CodedError {
public:
    using CodedError::CodedError;
};

// Batch-level failures surfaced by the run harness and CLI.
class HarnessError : public CodedError {
public:
    using CodedError::CodedError;
};

}  // namespace mind
