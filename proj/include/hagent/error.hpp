#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hagent/diagnostic.hpp"

namespace hagent {

enum class ErrorCode {
    OutOfRange,
    InvalidModel,
    NoMatchingMerge,
    MalformedRegion,
    MissingBehavior,
    StepBudgetExceeded,
    ConditionUnmatched,
    BadCondition,
    NoActiveBranch,
    VotesMissing,
    ManagerPickMissing,
    ManagerPickUnknown,
    EmptyCandidates,
    BadScenario,
    MissingLayout,
    Deadlock,
    BadLayout,
};

std::string_view errorCodeName(ErrorCode code) noexcept;

/// Base of every exception thrown by the library. Parsing never throws;
/// these are raised by programmatic construction, analysis and simulation.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when a ProcessModel is constructed from parts that break its
/// structural invariants. Carries the same diagnostics the parser reports.
class ModelError : public Error {
public:
    explicit ModelError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

} // namespace hagent
