#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hagent/diagnostic.hpp"
#include "hagent/model.hpp"

namespace hagent {

/// Where a rule is enforced. Document rules are reported by the parser (and
/// by ProcessModel construction); model rules by validateModel; simulation
/// rules by runSimulation.
enum class RuleStage { Document, Model, Simulation };

struct Rule {
    std::string_view code;
    Severity severity;
    RuleStage stage;
    std::string_view description;
    void (*check)(const ProcessModel&, std::vector<Diagnostic>&); // null unless stage == Model
};

/// Every diagnostic code the toolkit can emit, sorted by code.
const std::vector<Rule>& ruleCatalog();
const Rule* findRule(std::string_view code);

/// Runs the model-stage rules. Output is ordered by (code, element id).
std::vector<Diagnostic> validateModel(const ProcessModel& model);

/// Orders diagnostics by (code, element id), keeping the relative order of
/// equal keys.
void sortDiagnostics(std::vector<Diagnostic>& diagnostics);

struct CheckResult {
    std::optional<ProcessModel> model;
    std::vector<Diagnostic> diagnostics;
};

/// Parse followed, when parsing succeeded, by validateModel; diagnostics of
/// both stages merged and sorted.
CheckResult checkDocument(std::string_view document);

} // namespace hagent
