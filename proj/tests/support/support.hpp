#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hagent/model.hpp"
#include "hagent/simulate.hpp"
#include "hagent/xml.hpp"

namespace hagent::test {

std::string fixturePath(std::string_view name);
std::string readFile(const std::string& path);
std::string readFixture(std::string_view name);

/// Applies a `{"find": ..., "replace": ...}` edit; the find text must occur exactly once.
std::string applyFix(const std::string& document, const std::string& fixJson);

/// Rule codes that have a trigger fixture under fixtures/rules.
std::vector<std::string> ruleFixtureCodes();

/// Diagnostics of every stage for a rule fixture: parse, model rules and,
/// when `<code>.scenario.json` exists, the warnings of a simulation run.
std::vector<Diagnostic> ruleFixtureDiagnostics(const std::string& code, const std::string& document);

/// Deterministic model generator. Index i picks the collaboration mode,
/// merge strategy and reflection kind, so any 7 consecutive indices cover
/// every strategy; the seed drives everything else.
ProcessModel generateModel(int index, std::uint64_t seed);

/// Counting oracle for the voting strategies, kept independent of the
/// library: winners are found by scanning candidates in tie-break order.
std::string votingOracle(MergeStrategy strategy, const std::vector<CandidateOutput>& candidates,
                         const std::map<ElementId, std::string>& votes);

/// Expected outcome of merge-gateway discovery, computed by enumerating
/// simple paths.
struct RegionOracle {
    std::optional<ElementId> merge;
    bool malformed = false;
    std::vector<std::vector<ElementId>> branches;
};
RegionOracle regionOracle(const ProcessModel& model, const ElementId& divergingId);

/// Small XML Schema checker covering the constructs the extension schema
/// uses: global elements, attribute-only complex types, restrictions with
/// enumeration/minInclusive/maxInclusive/minLength/pattern, unions and a
/// few built-in types.
class SchemaChecker {
public:
    explicit SchemaChecker(std::string_view schemaSource);
    /// Empty when `element` is valid, otherwise the first problem found.
    std::string check(const xml::Element& element) const;

private:
    struct Facets {
        std::string base;
        std::vector<std::string> enumeration;
        std::optional<long long> minInclusive, maxInclusive;
        std::optional<std::size_t> minLength;
        std::optional<std::string> pattern;
        std::vector<std::string> unionOf;
    };
    struct AttributeDecl {
        std::string type;
        bool required = false;
    };

    std::string checkValue(const std::string& type, const std::string& value) const;

    std::string targetNamespace_;
    std::map<std::string, Facets> simpleTypes_;
    std::map<std::string, std::map<std::string, AttributeDecl>> complexTypes_;
    std::map<std::string, std::string> elements_;
};

/// (element id, code) of every `data-hagent-code` attribute in an SVG, sorted.
using Marker = std::pair<std::string, std::string>;
std::vector<Marker> svgMarkers(const std::string& svg);

/// The markers a diagram of `model` must carry: one per agent profile,
/// reflection mode, collaboration mode and merge strategy, sorted.
std::vector<Marker> expectedMarkers(const ProcessModel& model);

/// Every element in the extension namespace, depth first.
std::vector<const xml::Element*> extensionElements(const xml::Element& root);

} // namespace hagent::test
