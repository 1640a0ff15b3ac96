#include "hagent/diagnostic.hpp"

#include <algorithm>

#include "hagent/error.hpp"

namespace hagent {

Diagnostic makeError(std::string code, std::optional<std::string> elementId, std::string message)
{
    return {Severity::Error, std::move(code), std::move(elementId), std::move(message)};
}

Diagnostic makeWarning(std::string code, std::optional<std::string> elementId, std::string message)
{
    return {Severity::Warning, std::move(code), std::move(elementId), std::move(message)};
}

bool hasErrors(const std::vector<Diagnostic>& diagnostics)
{
    return countErrors(diagnostics) > 0;
}

std::size_t countErrors(const std::vector<Diagnostic>& diagnostics)
{
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                   [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::string formatDiagnostic(const Diagnostic& d)
{
    std::string out = d.code;
    out += ' ';
    out += d.elementId ? *d.elementId : std::string("-");
    out += ": ";
    out += d.message;
    return out;
}

std::string formatDiagnostics(const std::vector<Diagnostic>& diagnostics)
{
    std::string out;
    for (const auto& d : diagnostics) {
        out += formatDiagnostic(d);
        out += '\n';
    }
    return out;
}

std::string_view errorCodeName(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NoMatchingMerge: return "NoMatchingMerge";
    case ErrorCode::MalformedRegion: return "MalformedRegion";
    case ErrorCode::MissingBehavior: return "MissingBehavior";
    case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::ConditionUnmatched: return "ConditionUnmatched";
    case ErrorCode::BadCondition: return "BadCondition";
    case ErrorCode::NoActiveBranch: return "NoActiveBranch";
    case ErrorCode::VotesMissing: return "VotesMissing";
    case ErrorCode::ManagerPickMissing: return "ManagerPickMissing";
    case ErrorCode::ManagerPickUnknown: return "ManagerPickUnknown";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::BadScenario: return "BadScenario";
    case ErrorCode::MissingLayout: return "MissingLayout";
    case ErrorCode::Deadlock: return "Deadlock";
    case ErrorCode::BadLayout: return "BadLayout";
    }
    return "Unknown";
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics)
{
    std::string text = "invalid model";
    if (!diagnostics.empty()) {
        text += ": ";
        text += formatDiagnostic(diagnostics.front());
        if (diagnostics.size() > 1)
            text += " (+" + std::to_string(diagnostics.size() - 1) + " more)";
    }
    return text;
}

} // namespace

ModelError::ModelError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorCode::InvalidModel, summarize(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

} // namespace hagent
