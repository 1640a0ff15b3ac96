#include "hagent/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "json.hpp"

#include "hagent/error.hpp"
#include "hagent/xml.hpp"

namespace hagent {

std::string_view roleCode(const AgentRole& role) noexcept
{
    return role.isManager() ? "m" : "w";
}

std::string_view reflectionCode(const ReflectionMode& mode) noexcept
{
    if (std::holds_alternative<SelfReflection>(mode.kind))
        return "s";
    if (std::holds_alternative<CrossReflection>(mode.kind))
        return "c";
    return "h";
}

std::string_view collaborationCode(CollaborationMode mode) noexcept
{
    switch (mode) {
    case CollaborationMode::Competition: return "c";
    case CollaborationMode::DebateCooperation: return "d";
    case CollaborationMode::RoleCooperation: return "r";
    case CollaborationMode::VotingCooperation: return "v";
    }
    return "?";
}

std::string_view mergeCode(MergeStrategy strategy) noexcept
{
    switch (strategy) {
    case MergeStrategy::VotingMajority: return "v-ma";
    case MergeStrategy::VotingAbsolute: return "v-a";
    case MergeStrategy::VotingMinority: return "v-mi";
    case MergeStrategy::RoleLeaderDriven: return "r-l";
    case MergeStrategy::RoleComposed: return "r-c";
    case MergeStrategy::CompetitionFastest: return "c-f";
    case MergeStrategy::CompetitionMostComplete: return "c-mc";
    }
    return "?";
}

LayoutHints parseLayoutHints(std::string_view source)
{
    using nlohmann::json;
    json root;
    try {
        root = json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::BadLayout, std::string("layout hints are not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        throw Error(ErrorCode::BadLayout, "layout hints must be an object keyed by element id");
    LayoutHints hints;
    for (const auto& item : root.items()) {
        const auto& v = item.value();
        Box box;
        double* fields[] = {&box.x, &box.y, &box.w, &box.h};
        const char* names[] = {"x", "y", "w", "h"};
        if (!v.is_object() || v.size() != 4)
            throw Error(ErrorCode::BadLayout, item.key() + ": expected exactly x, y, w and h");
        for (int i = 0; i < 4; ++i) {
            if (!v.contains(names[i]) || !v[names[i]].is_number())
                throw Error(ErrorCode::BadLayout, item.key() + ": '" + names[i] + "' must be a number");
            *fields[i] = v[names[i]].get<double>();
        }
        if (box.w <= 0 || box.h <= 0)
            throw Error(ErrorCode::BadLayout, item.key() + ": width and height must be positive");
        hints[item.key()] = box;
    }
    return hints;
}

namespace {

constexpr double kPoolBand = 30;
constexpr double kLaneHeader = 140;
constexpr double kColumn = 160;
constexpr double kRow = 100;
constexpr double kMinLane = 140;
constexpr double kPoolGap = 40;
constexpr double kArtifactBand = 90;

std::string num(double v)
{
    if (std::abs(v - std::round(v)) < 1e-9)
        return std::to_string(static_cast<long long>(std::round(v)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    while (s.back() == '0')
        s.pop_back();
    return s;
}

/// Greedy word wrap; words longer than `width` stay whole.
std::vector<std::string> wrap(const std::string& text, std::size_t width)
{
    std::vector<std::string> lines;
    std::string line, word;
    auto flush = [&] {
        if (word.empty())
            return;
        if (!line.empty() && line.size() + 1 + word.size() > width) {
            lines.push_back(line);
            line.clear();
        }
        line += (line.empty() ? "" : " ") + word;
        word.clear();
    };
    for (char c : text) {
        if (c == ' ' || c == '\n')
            flush();
        else
            word += c;
    }
    flush();
    if (!line.empty() || lines.empty())
        lines.push_back(line);
    return lines;
}

Box nodeSize(const FlowNode& n)
{
    if (n.isStart() || n.isEnd())
        return {0, 0, 36, 36};
    if (n.gateway())
        return {0, 0, 50, 50};
    if (n.subProcess())
        return {0, 0, 110, 70};
    return {0, 0, 100, 60};
}

/// Longest-path rank over the sequence-flow graph with back edges removed.
std::map<ElementId, int> ranks(const ProcessModel& model, const Pool& pool)
{
    std::set<std::pair<ElementId, ElementId>> back;
    std::map<ElementId, int> state; // 0 new, 1 on stack, 2 done
    std::function<void(const ElementId&)> dfs = [&](const ElementId& id) {
        state[id] = 1;
        for (const auto* f : model.outgoing(id)) {
            int s = state[f->targetRef];
            if (s == 1)
                back.insert({f->sourceRef, f->targetRef});
            else if (s == 0)
                dfs(f->targetRef);
        }
        state[id] = 2;
    };
    for (const auto& n : pool.nodes)
        if (model.incoming(n.id).empty() && !state[n.id])
            dfs(n.id);
    for (const auto& n : pool.nodes)
        if (!state[n.id])
            dfs(n.id);

    std::map<ElementId, int> indegree, rank;
    for (const auto& n : pool.nodes) {
        rank[n.id] = 0;
        for (const auto* f : model.incoming(n.id))
            if (!back.count({f->sourceRef, f->targetRef}))
                ++indegree[n.id];
    }
    std::vector<ElementId> ready;
    for (const auto& n : pool.nodes)
        if (!indegree[n.id])
            ready.push_back(n.id);
    while (!ready.empty()) {
        auto id = ready.back();
        ready.pop_back();
        for (const auto* f : model.outgoing(id)) {
            if (back.count({f->sourceRef, f->targetRef}))
                continue;
            rank[f->targetRef] = std::max(rank[f->targetRef], rank[id] + 1);
            if (--indegree[f->targetRef] == 0)
                ready.push_back(f->targetRef);
        }
    }
    return rank;
}

struct Layout {
    std::map<ElementId, Box> boxes;
    double width = 0;
    double height = 0;
};

Layout layout(const ProcessModel& model, const LayoutHints& hints)
{
    Layout out;
    int maxRank = 0;
    std::map<ElementId, std::map<ElementId, int>> poolRanks;
    for (const auto& pool : model.pools()) {
        poolRanks[pool.id] = ranks(model, pool);
        for (const auto& [id, r] : poolRanks[pool.id])
            maxRank = std::max(maxRank, r);
    }
    double poolWidth = kPoolBand + kLaneHeader + 40 + (maxRank + 1) * kColumn;

    double y = 20;
    for (const auto& pool : model.pools()) {
        const auto& rank = poolRanks[pool.id];
        double poolY = y;
        for (const auto& lane : pool.lanes) {
            std::map<int, int> stack;
            for (const auto& id : lane.nodes)
                ++stack[rank.at(id)];
            int depth = 1;
            for (const auto& [r, n] : stack)
                depth = std::max(depth, n);
            double laneH = std::max(kMinLane, depth * kRow + 40);
            out.boxes[lane.id] = {20 + kPoolBand, y, poolWidth - kPoolBand, laneH};

            std::map<int, int> slot;
            for (const auto& id : lane.nodes) {
                const FlowNode* n = model.findNode(id);
                int r = rank.at(id);
                int k = slot[r]++;
                Box b = nodeSize(*n);
                double cx = 20 + kPoolBand + kLaneHeader + 40 + r * kColumn + 55;
                double cy = y + 20 + k * kRow + kRow / 2 - 10;
                b.x = cx - b.w / 2;
                b.y = cy - b.h / 2;
                out.boxes[id] = b;
            }
            y += laneH;
        }
        double artifactsX = 20 + kPoolBand + kLaneHeader;
        bool band = false;
        for (const auto& a : pool.artifacts) {
            if (std::holds_alternative<Association>(a.kind))
                continue;
            band = true;
            Box b = std::holds_alternative<DataObject>(a.kind) ? Box{artifactsX, y + 15, 40, 50}
                                                               : Box{artifactsX, y + 15, 140, 50};
            out.boxes[a.id] = b;
            artifactsX += b.w + 30;
        }
        if (band)
            y += kArtifactBand;
        if (pool.lanes.empty())
            y += kMinLane;
        out.boxes[pool.id] = {20, poolY, poolWidth, y - poolY};
        out.width = std::max(out.width, std::max(poolWidth, artifactsX) + 40);
        y += kPoolGap;
    }
    out.height = y;

    for (const auto& [id, box] : hints) {
        if (!model.contains(id))
            continue;
        out.boxes[id] = box;
        out.width = std::max(out.width, box.x + box.w + 20);
        out.height = std::max(out.height, box.y + box.h + 20);
    }
    return out;
}

using Attrs = xml::Writer::Attributes;

class Painter {
public:
    Painter(const ProcessModel& model, Layout layout) : m_(model), l_(std::move(layout)) {}

    std::string paint()
    {
        w_.declaration();
        w_.open("svg", {{"xmlns", "http://www.w3.org/2000/svg"},
                        {"xmlns:xlink", "http://www.w3.org/1999/xlink"},
                        {"version", "1.1"},
                        {"width", num(l_.width)},
                        {"height", num(l_.height)},
                        {"viewBox", "0 0 " + num(l_.width) + " " + num(l_.height)}});
        defs();
        for (const auto& pool : m_.pools())
            paintPool(pool);
        for (const auto& pool : m_.pools())
            for (const auto& f : pool.sequenceFlows)
                paintSequenceFlow(f);
        for (const auto& pool : m_.pools())
            for (const auto& n : pool.nodes)
                paintNode(n);
        for (const auto& pool : m_.pools())
            for (const auto& a : pool.artifacts)
                paintArtifact(a);
        for (const auto& f : m_.messageFlows())
            paintMessageFlow(f);
        w_.close("svg");
        return w_.take();
    }

private:
    const ProcessModel& m_;
    Layout l_;
    xml::Writer w_;

    const Box& box(const ElementId& id) const { return l_.boxes.at(id); }

    void defs()
    {
        w_.open("defs");
        w_.textElement("style",
                       ".pool,.lane,.task,.gateway,.event{fill:#fff;stroke:#222;stroke-width:1.5}"
                       ".end{stroke-width:3}.flow{fill:none;stroke:#222;stroke-width:1.2}"
                       ".message{fill:none;stroke:#222;stroke-dasharray:6 4}"
                       ".association{fill:none;stroke:#666;stroke-dasharray:2 3}"
                       ".glyph{fill:none;stroke:#1a4f8b;stroke-width:1.4}"
                       ".code{font:bold 11px sans-serif;fill:#1a4f8b;text-anchor:middle}"
                       ".label{font:12px sans-serif;fill:#222}.small{font:10px sans-serif;fill:#444}"
                       ".center{text-anchor:middle}.badge{fill:#eef4fb;stroke:#1a4f8b}");
        w_.open("symbol", {{"id", "hagent-agent"}, {"viewBox", "0 0 20 20"}});
        w_.empty("path", {{"class", "glyph"},
                          {"d", "M4 7h12v10H4z M10 7V3 M8.5 3h3 M7.5 11h1 M11.5 11h1 M7.5 14h5 M2 11v3 M18 11v3"}});
        w_.close("symbol");
        w_.open("marker", {{"id", "arrow"},
                           {"viewBox", "0 0 10 10"},
                           {"refX", "10"},
                           {"refY", "5"},
                           {"markerWidth", "8"},
                           {"markerHeight", "8"},
                           {"orient", "auto"}});
        w_.empty("path", {{"d", "M0 0L10 5L0 10z"}, {"fill", "#222"}});
        w_.close("marker");
        w_.open("marker", {{"id", "open-arrow"},
                           {"viewBox", "0 0 10 10"},
                           {"refX", "10"},
                           {"refY", "5"},
                           {"markerWidth", "8"},
                           {"markerHeight", "8"},
                           {"orient", "auto"}});
        w_.empty("path", {{"d", "M0 0L10 5L0 10z"}, {"fill", "#fff"}, {"stroke", "#222"}});
        w_.close("marker");
        w_.close("defs");
    }

    void agentGlyph(double x, double y, double size)
    {
        w_.empty("use", {{"class", "hagent-agent"},
                         {"xlink:href", "#hagent-agent"},
                         {"x", num(x)},
                         {"y", num(y)},
                         {"width", num(size)},
                         {"height", num(size)}});
    }

    /// A coded marker: badge plus letter code, optionally with the agent glyph.
    void codedMarker(const ElementId& id, std::string_view code, std::string_view kind, double x, double y,
                     bool glyph)
    {
        w_.open("g", {{"class", "hagent-marker " + std::string(kind)},
                      {"data-hagent-code", std::string(code)},
                      {"data-element-id", id}});
        double width = 10 + 7 * static_cast<double>(code.size());
        if (glyph) {
            agentGlyph(x, y, 18);
            w_.textElement("text", code, {{"class", "code"}, {"x", num(x + 9)}, {"y", num(y + 30)}});
        } else {
            w_.empty("rect", {{"class", "badge"},
                              {"x", num(x - width / 2)},
                              {"y", num(y)},
                              {"width", num(width)},
                              {"height", "16"},
                              {"rx", "3"}});
            w_.textElement("text", code, {{"class", "code"}, {"x", num(x)}, {"y", num(y + 12)}});
        }
        w_.close("g");
    }

    void paintPool(const Pool& pool)
    {
        const Box& b = box(pool.id);
        w_.open("g", {{"class", "pool"}, {"data-element-id", pool.id}});
        w_.empty("rect", {{"class", "pool"}, {"x", num(b.x)}, {"y", num(b.y)}, {"width", num(b.w)}, {"height", num(b.h)}});
        double cx = b.x + kPoolBand / 2, cy = b.y + b.h / 2;
        w_.textElement("text", pool.name.empty() ? pool.processName : pool.name,
                       {{"class", "label center"},
                        {"x", num(cx)},
                        {"y", num(cy)},
                        {"transform", "rotate(-90 " + num(cx) + " " + num(cy) + ")"}});
        for (const auto& lane : pool.lanes)
            paintLane(lane);
        w_.close("g");
    }

    void paintLane(const Lane& lane)
    {
        const Box& b = box(lane.id);
        w_.open("g", {{"class", "lane"}, {"data-element-id", lane.id}});
        w_.empty("rect", {{"class", "lane"}, {"x", num(b.x)}, {"y", num(b.y)}, {"width", num(b.w)}, {"height", num(b.h)}});
        double x = b.x + 8, y = b.y + 24;
        w_.textElement("text", lane.name, {{"class", "label"}, {"x", num(x)}, {"y", num(y)}});
        if (lane.agentic) {
            // name, trust and agent marker side by side; role letter under the marker
            if (lane.agentic->trust)
                w_.textElement("text", std::to_string(lane.agentic->trust->value()) + "%",
                               {{"class", "small"}, {"x", num(b.x + 8)}, {"y", num(y + 18)}});
            codedMarker(lane.id, roleCode(lane.agentic->role), "role", b.x + kLaneHeader - 34, b.y + 10, true);
            if (lane.agentic->role.kind == RoleKind::Custom)
                w_.textElement("text", lane.agentic->role.customName,
                               {{"class", "small"}, {"x", num(b.x + 8)}, {"y", num(y + 34)}});
        }
        w_.close("g");
    }

    static std::pair<double, double> center(const Box& b) { return {b.x + b.w / 2, b.y + b.h / 2}; }

    void paintSequenceFlow(const SequenceFlow& f)
    {
        const Box& s = box(f.sourceRef);
        const Box& t = box(f.targetRef);
        double x1 = s.x + s.w, y1 = s.y + s.h / 2, x2 = t.x, y2 = t.y + t.h / 2;
        std::string d;
        if (x2 >= x1 + 10) {
            double mx = (x1 + x2) / 2;
            d = "M" + num(x1) + " " + num(y1) + "H" + num(mx) + "V" + num(y2) + "H" + num(x2);
        } else {
            // backward edge: leave from the bottom, come back under both shapes
            double bx1 = s.x + s.w / 2, by1 = s.y + s.h, bx2 = t.x + t.w / 2, by2 = t.y + t.h;
            double low = std::max(by1, by2) + 25;
            d = "M" + num(bx1) + " " + num(by1) + "V" + num(low) + "H" + num(bx2) + "V" + num(by2);
        }
        w_.open("g", {{"class", "sequence-flow"}, {"data-element-id", f.id}});
        w_.empty("path", {{"class", "flow"}, {"d", d}, {"marker-end", "url(#arrow)"}});
        std::string label = !f.name.empty() ? f.name : f.condition.value_or("");
        if (!label.empty())
            w_.textElement("text", label, {{"class", "small"}, {"x", num((x1 + x2) / 2 + 4)}, {"y", num(y2 - 6)}});
        w_.close("g");
    }

    void paintNode(const FlowNode& n)
    {
        const Box& b = box(n.id);
        w_.open("g", {{"class", "node"}, {"data-element-id", n.id}});
        auto [cx, cy] = center(b);
        if (n.isStart() || n.isEnd()) {
            w_.empty("circle", {{"class", n.isEnd() ? "event end" : "event"},
                                {"cx", num(cx)},
                                {"cy", num(cy)},
                                {"r", num(std::min(b.w, b.h) / 2)}});
            if (!n.name.empty())
                w_.textElement("text", n.name, {{"class", "small center"}, {"x", num(cx)}, {"y", num(b.y + b.h + 14)}});
        } else if (const auto* gw = n.gateway()) {
            paintGateway(n, *gw, b);
        } else {
            w_.empty("rect", {{"class", "task"},
                              {"x", num(b.x)},
                              {"y", num(b.y)},
                              {"width", num(b.w)},
                              {"height", num(b.h)},
                              {"rx", "8"}});
            auto lines = wrap(n.name, 15);
            double top = cy + 4 - 7.0 * static_cast<double>(lines.size() - 1);
            for (std::size_t i = 0; i < lines.size(); ++i)
                w_.textElement("text", lines[i],
                               {{"class", "label center"}, {"x", num(cx)}, {"y", num(top + 14.0 * static_cast<double>(i))}});
            if (n.subProcess()) {
                w_.empty("rect", {{"class", "task"}, {"x", num(cx - 6)}, {"y", num(b.y + b.h - 14)}, {"width", "12"}, {"height", "12"}});
                w_.empty("path", {{"class", "flow"}, {"d", "M" + num(cx - 4) + " " + num(b.y + b.h - 8) + "h8M" + num(cx) + " " + num(b.y + b.h - 12) + "v8"}});
            }
            if (const auto* info = n.agenticTask()) {
                agentGlyph(b.x + 3, b.y + 3, 16);
                if (info->trust)
                    w_.textElement("text", std::to_string(info->trust->value()) + "%",
                                   {{"class", "small"}, {"x", num(b.x + b.w - 26)}, {"y", num(b.y + 13)}});
                if (info->reflection)
                    codedMarker(n.id, reflectionCode(*info->reflection), "reflection", cx, b.y + b.h - 17, false);
            }
        }
        w_.close("g");
    }

    void paintGateway(const FlowNode& n, const Gateway& gw, const Box& b)
    {
        auto [cx, cy] = center(b);
        std::string d = "M" + num(cx) + " " + num(b.y) + "L" + num(b.x + b.w) + " " + num(cy) + "L" + num(cx) + " " +
                        num(b.y + b.h) + "L" + num(b.x) + " " + num(cy) + "Z";
        w_.empty("path", {{"class", "gateway"}, {"d", d}});
        double r = b.w / 5;
        switch (gw.kind) {
        case GatewayKind::Exclusive:
            w_.empty("path", {{"class", "flow"},
                              {"d", "M" + num(cx - r) + " " + num(cy - r) + "L" + num(cx + r) + " " + num(cy + r) + "M" +
                                        num(cx + r) + " " + num(cy - r) + "L" + num(cx - r) + " " + num(cy + r)}});
            break;
        case GatewayKind::Parallel:
            w_.empty("path", {{"class", "flow"},
                              {"d", "M" + num(cx - r) + " " + num(cy) + "H" + num(cx + r) + "M" + num(cx) + " " +
                                        num(cy - r) + "V" + num(cy + r)}});
            break;
        case GatewayKind::Inclusive:
            w_.empty("circle", {{"class", "flow"}, {"cx", num(cx)}, {"cy", num(cy)}, {"r", num(r)}});
            break;
        case GatewayKind::Complex:
            w_.empty("path", {{"class", "flow"},
                              {"d", "M" + num(cx - r) + " " + num(cy) + "H" + num(cx + r) + "M" + num(cx) + " " +
                                        num(cy - r) + "V" + num(cy + r) + "M" + num(cx - r * 0.7) + " " +
                                        num(cy - r * 0.7) + "L" + num(cx + r * 0.7) + " " + num(cy + r * 0.7) + "M" +
                                        num(cx + r * 0.7) + " " + num(cy - r * 0.7) + "L" + num(cx - r * 0.7) + " " +
                                        num(cy + r * 0.7)}});
            break;
        }
        if (!n.name.empty())
            w_.textElement("text", n.name, {{"class", "small center"}, {"x", num(cx)}, {"y", num(b.y - 6)}});
        if (gw.agentic) {
            std::string_view code = gw.agentic->opensCollaboration() ? collaborationCode(*gw.agentic->collaboration())
                                                                     : mergeCode(*gw.agentic->merge());
            codedMarker(n.id, code, gw.agentic->opensCollaboration() ? "collaboration" : "merge", b.x + b.w + 2,
                        b.y + b.h - 8, true);
            if (gw.agentic->trust)
                w_.textElement("text", std::to_string(gw.agentic->trust->value()) + "%",
                               {{"class", "small"}, {"x", num(b.x + b.w + 4)}, {"y", num(b.y + 8)}});
        }
    }

    void paintArtifact(const Artifact& a)
    {
        w_.open("g", {{"class", "artifact"}, {"data-element-id", a.id}});
        if (const auto* assoc = std::get_if<Association>(&a.kind)) {
            auto it1 = l_.boxes.find(assoc->sourceRef), it2 = l_.boxes.find(assoc->targetRef);
            if (it1 != l_.boxes.end() && it2 != l_.boxes.end()) {
                auto [x1, y1] = center(it1->second);
                auto [x2, y2] = center(it2->second);
                w_.empty("path", {{"class", "association"},
                                  {"d", "M" + num(x1) + " " + num(y1) + "L" + num(x2) + " " + num(y2)}});
            }
        } else {
            const Box& b = box(a.id);
            if (const auto* note = std::get_if<Annotation>(&a.kind)) {
                w_.empty("path", {{"class", "flow"},
                                  {"d", "M" + num(b.x + 12) + " " + num(b.y) + "H" + num(b.x) + "V" + num(b.y + b.h) +
                                            "H" + num(b.x + 12)}});
                w_.textElement("text", note->text, {{"class", "small"}, {"x", num(b.x + 6)}, {"y", num(b.y + b.h / 2 + 4)}});
            } else if (std::holds_alternative<Group>(a.kind)) {
                w_.empty("rect", {{"class", "association"},
                                  {"x", num(b.x)},
                                  {"y", num(b.y)},
                                  {"width", num(b.w)},
                                  {"height", num(b.h)},
                                  {"rx", "10"}});
            } else {
                w_.empty("path", {{"class", "task"},
                                  {"d", "M" + num(b.x) + " " + num(b.y) + "H" + num(b.x + b.w - 10) + "L" +
                                            num(b.x + b.w) + " " + num(b.y + 10) + "V" + num(b.y + b.h) + "H" +
                                            num(b.x) + "Z"}});
            }
            if (!a.name.empty())
                w_.textElement("text", a.name, {{"class", "small"}, {"x", num(b.x)}, {"y", num(b.y + b.h + 12)}});
        }
        w_.close("g");
    }

    void paintMessageFlow(const MessageFlow& f)
    {
        auto it1 = l_.boxes.find(f.sourceRef), it2 = l_.boxes.find(f.targetRef);
        if (it1 == l_.boxes.end() || it2 == l_.boxes.end())
            return;
        const Box& s = it1->second;
        const Box& t = it2->second;
        double x1 = s.x + s.w / 2, x2 = t.x + t.w / 2;
        double y1 = t.y > s.y ? s.y + s.h : s.y;
        double y2 = t.y > s.y ? t.y : t.y + t.h;
        w_.open("g", {{"class", "message-flow"}, {"data-element-id", f.id}});
        w_.empty("path", {{"class", "message"},
                          {"d", "M" + num(x1) + " " + num(y1) + "L" + num(x2) + " " + num(y2)},
                          {"marker-end", "url(#open-arrow)"}});
        if (f.agentic) {
            double mx = (x1 + x2) / 2, my = (y1 + y2) / 2;
            // agent marker above the flow, strategy marker opposite
            agentGlyph(mx - 9, my - 24, 18);
            std::string_view code = f.agentic->opensCollaboration() ? collaborationCode(*f.agentic->collaboration())
                                                                    : mergeCode(*f.agentic->merge());
            codedMarker(f.id, code, f.agentic->opensCollaboration() ? "collaboration" : "merge", mx, my + 6, false);
        }
        w_.close("g");
    }
};

} // namespace

std::string renderSVG(const ProcessModel& model, const std::optional<LayoutHints>& hints)
{
    if (model.allNodes().empty())
        throw Error(ErrorCode::MissingLayout, "model has no flow nodes to lay out");
    Painter painter(model, layout(model, hints ? *hints : LayoutHints{}));
    return painter.paint();
}

} // namespace hagent
