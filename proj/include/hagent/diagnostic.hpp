#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hagent {

enum class Severity { Error, Warning };

/// One coded finding about a document or model. Codes come from the rule
/// catalog (see validate.hpp); `E-` codes are errors, `W-` codes warnings.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::optional<std::string> elementId;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

Diagnostic makeError(std::string code, std::optional<std::string> elementId, std::string message);
Diagnostic makeWarning(std::string code, std::optional<std::string> elementId, std::string message);

bool hasErrors(const std::vector<Diagnostic>& diagnostics);
std::size_t countErrors(const std::vector<Diagnostic>& diagnostics);

/// `CODE elementId: message`; a missing element id is printed as `-`.
std::string formatDiagnostic(const Diagnostic& d);
std::string formatDiagnostics(const std::vector<Diagnostic>& diagnostics);

} // namespace hagent
