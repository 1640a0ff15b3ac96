#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hagent/diagnostic.hpp"
#include "hagent/model.hpp"

namespace hagent {

inline constexpr std::string_view kBpmnNamespace = "http://www.omg.org/spec/BPMN/20100524/MODEL";
inline constexpr std::string_view kHagentNamespace = "urn:hagent:bpmn-extension:1.0";
inline constexpr std::string_view kXsiNamespace = "http://www.w3.org/2001/XMLSchema-instance";
inline constexpr std::string_view kXsdNamespace = "http://www.w3.org/2001/XMLSchema";

struct ParseResult {
    std::optional<ProcessModel> model;
    std::vector<Diagnostic> diagnostics;
};

/// Reads a BPMN 2.0 document carrying the agentic extension.
///
/// Never throws. Malformed XML, duplicate ids, dangling references and
/// invalid extension content are reported as error diagnostics, in which
/// case no model is returned. Unsupported standard elements are kept as
/// raw markup and reported as W-UNSUPPORTED; foreign extension elements
/// are kept silently. Both reappear verbatim on serialization.
ParseResult parseModel(std::string_view document);

/// Canonical, byte-deterministic serialization. `parseModel` of the output
/// yields a model equal to `model`.
std::string serializeModel(const ProcessModel& model);

/// XML Schema declaring every element and attribute of the extension
/// vocabulary. The output is a constant document.
std::string exportExtensionSchema();

} // namespace hagent
