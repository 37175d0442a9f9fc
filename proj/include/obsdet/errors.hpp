#pragma once

#include <stdexcept>
#include <string>

namespace obsdet {

/// Base class for all library failures. `code()` is stable and machine
/// readable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Input files or JSON documents that do not match the expected shape.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("parse-error", message) {}
};

/// Name or label lookups that fail against the network or store.
class LookupError : public Error {
public:
    explicit LookupError(const std::string& message) : Error("unknown-symbol", message) {}
};

/// Conditioning on evidence whose marginal probability is numerically zero.
class ImpossibleEvidenceError : public Error {
public:
    explicit ImpossibleEvidenceError(const std::string& message)
        : Error("impossible-evidence", message) {}
};

/// Scenario generation gave up within the retry budget.
class RetryExhaustedError : public Error {
public:
    explicit RetryExhaustedError(const std::string& message)
        : Error("retry-exhausted", message) {}
};

/// Threshold sweeps need at least one scenario of each label.
class SingleClassError : public Error {
public:
    explicit SingleClassError(const std::string& message) : Error("single-class", message) {}
};

/// A second observation arrived while one is still awaiting resolution.
class PendingConflictError : public Error {
public:
    explicit PendingConflictError(const std::string& message)
        : Error("pending-conflict", message) {}
};

/// Resolution was requested but no detection is pending.
class NoPendingError : public Error {
public:
    explicit NoPendingError(const std::string& message) : Error("no-pending", message) {}
};

/// The chosen removal set is not one of the candidate repair sets, or the
/// post-state would still be contradictory.
class RepairSetError : public Error {
public:
    explicit RepairSetError(const std::string& message)
        : Error("invalid-repair-set", message) {}
};

}  // namespace obsdet
