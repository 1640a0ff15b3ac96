#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hagent/model.hpp"

namespace hagent {

struct Box {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;
    bool operator==(const Box&) const = default;
};

/// Element id -> absolute box. Hinted nodes, lanes, pools and artifacts
/// keep the given geometry; everything else is auto-laid out.
using LayoutHints = std::map<ElementId, Box>;

/// `{"Task_1": {"x": 10, "y": 20, "w": 100, "h": 60}, ...}`.
/// Throws Error(BadLayout).
LayoutHints parseLayoutHints(std::string_view json);

// Notation letter codes.
std::string_view roleCode(const AgentRole& role) noexcept;          // m, w (custom roles: w)
std::string_view reflectionCode(const ReflectionMode& mode) noexcept; // s, c, h
std::string_view collaborationCode(CollaborationMode mode) noexcept;  // c, d, r, v
std::string_view mergeCode(MergeStrategy strategy) noexcept;          // v-ma, v-a, v-mi, r-l, r-c, c-f, c-mc

/// SVG 1.1 diagram. Every coded marker is a group carrying
/// `data-hagent-code` and `data-element-id`; the agent glyph itself carries
/// neither. Throws Error(MissingLayout) for a model without flow nodes.
std::string renderSVG(const ProcessModel& model, const std::optional<LayoutHints>& hints = {});

} // namespace hagent
