#include "support.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "hagent/validate.hpp"
#include "hagent/xmlio.hpp"

namespace hagent::test {

std::string fixturePath(std::string_view name)
{
    return std::string(HAGENT_FIXTURE_DIR) + "/" + std::string(name);
}

std::string readFile(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string readFixture(std::string_view name)
{
    return readFile(fixturePath(name));
}

std::string applyFix(const std::string& document, const std::string& fixJson)
{
    auto fix = nlohmann::json::parse(fixJson);
    auto find = fix.at("find").get<std::string>();
    auto replace = fix.at("replace").get<std::string>();
    auto at = document.find(find);
    if (at == std::string::npos || document.find(find, at + 1) != std::string::npos)
        throw std::runtime_error("fix text must occur exactly once: " + find);
    std::string out = document;
    out.replace(at, find.size(), replace);
    return out;
}

std::vector<std::string> ruleFixtureCodes()
{
    std::vector<std::string> codes;
    for (const auto& entry : std::filesystem::directory_iterator(fixturePath("rules")))
        if (entry.path().extension() == ".bpmn")
            codes.push_back(entry.path().stem().string());
    std::sort(codes.begin(), codes.end());
    return codes;
}

std::vector<Diagnostic> ruleFixtureDiagnostics(const std::string& code, const std::string& document)
{
    auto result = checkDocument(document);
    auto diagnostics = result.diagnostics;
    auto scenarioPath = fixturePath("rules/" + code + ".scenario.json");
    if (result.model && !hasErrors(diagnostics) && std::filesystem::exists(scenarioPath)) {
        auto trace = runSimulation(*result.model, parseScenario(readFile(scenarioPath)));
        diagnostics.insert(diagnostics.end(), trace.warnings.begin(), trace.warnings.end());
    }
    return diagnostics;
}

// ---------------------------------------------------------------------------

std::string votingOracle(MergeStrategy strategy, const std::vector<CandidateOutput>& candidates,
                         const std::map<ElementId, std::string>& votes)
{
    auto score = [](const CandidateOutput& c) {
        int s = 100;
        if (c.confidence)
            s = std::min(s, c.confidence->value());
        if (c.effectiveTrust)
            s = std::min(s, c.effectiveTrust->value());
        return s;
    };
    std::vector<const CandidateOutput*> order;
    for (const auto& c : candidates)
        order.push_back(&c);
    std::sort(order.begin(), order.end(), [&](auto* a, auto* b) {
        if (score(*a) != score(*b))
            return score(*a) > score(*b);
        return a->label < b->label;
    });

    auto count = [&](const std::string& label) {
        int n = 0;
        for (const auto& v : votes)
            n += v.second == label ? 1 : 0;
        return n;
    };
    int total = 0;
    std::set<std::string> seen;
    for (const auto& c : candidates)
        if (seen.insert(c.label).second)
            total += count(c.label);

    std::function<bool(int)> wins;
    if (strategy == MergeStrategy::VotingMajority) {
        int most = 0;
        for (auto* c : order)
            most = std::max(most, count(c->label));
        wins = [most](int n) { return n == most; };
    } else if (strategy == MergeStrategy::VotingAbsolute) {
        wins = [total](int n) { return 2 * n > total; };
    } else {
        int fewest = 0;
        for (auto* c : order) {
            int n = count(c->label);
            if (n > 0 && (fewest == 0 || n < fewest))
                fewest = n;
        }
        wins = [fewest](int n) { return fewest > 0 && n == fewest; };
    }
    for (auto* c : order)
        if (wins(count(c->label)))
            return c->label;
    return order.front()->label;
}

// ---------------------------------------------------------------------------

RegionOracle regionOracle(const ProcessModel& model, const ElementId& divergingId)
{
    const Pool& pool = *model.poolOf(divergingId);
    std::map<ElementId, std::vector<ElementId>> next;
    std::map<ElementId, int> indegree;
    for (const auto& f : pool.sequenceFlows) {
        next[f.sourceRef].push_back(f.targetRef);
        ++indegree[f.targetRef];
    }

    std::vector<std::vector<ElementId>> exitPaths;
    std::vector<ElementId> path{divergingId};
    std::function<void(const ElementId&)> walk = [&](const ElementId& at) {
        if (next[at].empty()) {
            exitPaths.push_back(path);
            return;
        }
        for (const auto& n : next[at]) {
            if (std::find(path.begin(), path.end(), n) != path.end())
                continue;
            path.push_back(n);
            walk(n);
            path.pop_back();
        }
    };
    walk(divergingId);

    RegionOracle out;
    if (exitPaths.empty())
        return out;

    auto onEvery = [&](const ElementId& id) {
        for (const auto& p : exitPaths)
            if (std::find(p.begin(), p.end(), id) == p.end())
                return false;
        return true;
    };
    for (const auto& id : exitPaths.front()) {
        if (id == divergingId)
            continue;
        const FlowNode* node = model.findNode(id);
        const auto* info = node->agenticGateway();
        if (info && info->mergesCollaboration() && onEvery(id)) {
            out.merge = id;
            break;
        }
    }
    if (!out.merge)
        return out;

    std::set<ElementId> used;
    for (const auto* f : model.outgoing(divergingId)) {
        std::vector<ElementId> branch{divergingId};
        ElementId at = f->targetRef;
        while (at != *out.merge) {
            if (at == divergingId || used.count(at) || indegree[at] != 1 || next[at].size() != 1) {
                out.malformed = true;
                return out;
            }
            used.insert(at);
            branch.push_back(at);
            at = next[at].front();
        }
        branch.push_back(at);
        out.branches.push_back(branch);
    }
    if (indegree[*out.merge] != static_cast<int>(out.branches.size()))
        out.malformed = true;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string localPart(const std::string& qname)
{
    auto colon = qname.find(':');
    return colon == std::string::npos ? qname : qname.substr(colon + 1);
}

bool isNCName(const std::string& s)
{
    static const std::regex re("[A-Za-z_][A-Za-z0-9_.\\-]*");
    return std::regex_match(s, re);
}

std::optional<long long> asInteger(const std::string& s)
{
    static const std::regex re("[+-]?[0-9]+");
    if (!std::regex_match(s, re) || s.size() > 18)
        return std::nullopt;
    return std::stoll(s);
}

} // namespace

SchemaChecker::SchemaChecker(std::string_view schemaSource)
{
    auto parsed = xml::parse(schemaSource);
    if (!parsed.document)
        throw std::runtime_error("schema is not well-formed: " + parsed.error->message);
    const auto& root = parsed.document->root;
    if (!root.is(kXsdNamespace, "schema"))
        throw std::runtime_error("root is not xsd:schema");
    if (const auto* tns = root.attr("targetNamespace"))
        targetNamespace_ = *tns;

    for (const auto& child : root.children) {
        const std::string* name = child.attr("name");
        if (child.is(kXsdNamespace, "simpleType")) {
            Facets f;
            for (const auto& part : child.children) {
                if (part.is(kXsdNamespace, "restriction")) {
                    f.base = localPart(*part.attr("base"));
                    for (const auto& facet : part.children) {
                        const std::string& v = *facet.attr("value");
                        if (facet.local == "enumeration")
                            f.enumeration.push_back(v);
                        else if (facet.local == "minInclusive")
                            f.minInclusive = std::stoll(v);
                        else if (facet.local == "maxInclusive")
                            f.maxInclusive = std::stoll(v);
                        else if (facet.local == "minLength")
                            f.minLength = std::stoul(v);
                        else if (facet.local == "pattern")
                            f.pattern = v;
                        else
                            throw std::runtime_error("unsupported facet " + facet.local);
                    }
                } else if (part.is(kXsdNamespace, "union")) {
                    std::istringstream members(*part.attr("memberTypes"));
                    std::string m;
                    while (members >> m)
                        f.unionOf.push_back(localPart(m));
                }
            }
            simpleTypes_[*name] = f;
        } else if (child.is(kXsdNamespace, "complexType")) {
            auto& attrs = complexTypes_[*name];
            for (const auto& a : child.children) {
                if (!a.is(kXsdNamespace, "attribute"))
                    throw std::runtime_error("unsupported content model in " + *name);
                const std::string* use = a.attr("use");
                attrs[*a.attr("name")] = {*a.attr("type"), use && *use == "required"};
            }
        } else if (child.is(kXsdNamespace, "element")) {
            elements_[*name] = localPart(*child.attr("type"));
        }
    }
}

std::string SchemaChecker::checkValue(const std::string& type, const std::string& value) const
{
    std::string local = localPart(type);
    bool builtin = type.rfind("xsd:", 0) == 0;
    if (builtin) {
        if (local == "string")
            return {};
        if (local == "NCName")
            return isNCName(value) ? "" : "'" + value + "' is not an NCName";
        if (local == "int" || local == "positiveInteger") {
            auto n = asInteger(value);
            if (!n || (local == "int" && (*n < INT32_MIN || *n > INT32_MAX)))
                return "'" + value + "' is not an " + local;
            if (local == "positiveInteger" && *n < 1)
                return "'" + value + "' is not positive";
            return {};
        }
        throw std::runtime_error("unsupported builtin " + type);
    }

    auto it = simpleTypes_.find(local);
    if (it == simpleTypes_.end())
        throw std::runtime_error("unknown type " + type);
    const Facets& f = it->second;
    if (!f.unionOf.empty()) {
        for (const auto& member : f.unionOf)
            if (checkValue("hagent:" + member, value).empty())
                return {};
        return "'" + value + "' matches no member of " + local;
    }
    if (auto problem = checkValue("xsd:" + f.base, value); !problem.empty())
        return problem;
    if (!f.enumeration.empty() && std::find(f.enumeration.begin(), f.enumeration.end(), value) == f.enumeration.end())
        return "'" + value + "' is not in the enumeration of " + local;
    if (f.minInclusive || f.maxInclusive) {
        long long n = *asInteger(value);
        if ((f.minInclusive && n < *f.minInclusive) || (f.maxInclusive && n > *f.maxInclusive))
            return "'" + value + "' is out of range for " + local;
    }
    if (f.minLength && value.size() < *f.minLength)
        return "'" + value + "' is too short for " + local;
    if (f.pattern) {
        // XSD patterns are implicitly anchored; the ones used here are ECMAScript-compatible.
        if (!std::regex_match(value, std::regex(*f.pattern)))
            return "'" + value + "' does not match the pattern of " + local;
    }
    return {};
}

std::string SchemaChecker::check(const xml::Element& element) const
{
    if (element.ns != targetNamespace_)
        return "element '" + element.qname + "' is not in the target namespace";
    auto decl = elements_.find(element.local);
    if (decl == elements_.end())
        return "no global declaration for '" + element.local + "'";
    const auto& attrs = complexTypes_.at(decl->second);
    if (!element.children.empty())
        return "'" + element.local + "' must be empty";
    if (element.text.find_first_not_of(" \t\r\n") != std::string::npos)
        return "'" + element.local + "' must not contain text";
    for (const auto& a : element.attributes) {
        auto it = a.ns.empty() ? attrs.find(a.local) : attrs.end();
        if (it == attrs.end())
            return "undeclared attribute '" + a.qname + "' on '" + element.local + "'";
        if (auto problem = checkValue(it->second.type, a.value); !problem.empty())
            return a.local + ": " + problem;
    }
    for (const auto& [name, d] : attrs)
        if (d.required && !element.attr(name))
            return "missing required attribute '" + name + "' on '" + element.local + "'";
    return {};
}

std::vector<const xml::Element*> extensionElements(const xml::Element& root)
{
    std::vector<const xml::Element*> out;
    std::function<void(const xml::Element&)> walk = [&](const xml::Element& e) {
        if (e.ns == kHagentNamespace)
            out.push_back(&e);
        for (const auto& c : e.children)
            walk(c);
    };
    walk(root);
    return out;
}

std::vector<Marker> svgMarkers(const std::string& svg)
{
    auto parsed = xml::parse(svg);
    if (!parsed.document)
        throw std::runtime_error("SVG is not well-formed: " + parsed.error->message);
    std::vector<Marker> out;
    std::function<void(const xml::Element&)> walk = [&](const xml::Element& e) {
        if (const auto* code = e.attr("data-hagent-code")) {
            const auto* id = e.attr("data-element-id");
            out.emplace_back(id ? *id : "", *code);
        }
        for (const auto& c : e.children)
            walk(c);
    };
    walk(parsed.document->root);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Marker> expectedMarkers(const ProcessModel& model)
{
    static const std::map<std::string, std::string> codes{
        {"competition", "c"},          {"debate", "d"},
        {"role", "r"},                 {"voting", "v"},
        {"voting.majority", "v-ma"},   {"voting.absolute", "v-a"},
        {"voting.minority", "v-mi"},   {"role.leaderDriven", "r-l"},
        {"role.composed", "r-c"},      {"competition.fastest", "c-f"},
        {"competition.mostComplete", "c-mc"}};
    auto coordination = [&](const AgenticCoordination& a) {
        if (auto mode = a.collaboration())
            return codes.at(std::string(collaborationToken(*mode)));
        return codes.at(std::string(mergeToken(*a.merge())));
    };

    std::vector<Marker> out;
    for (const auto* lane : model.allLanes())
        if (lane->agentic)
            out.emplace_back(lane->id, lane->agentic->role.isManager() ? "m" : "w");
    for (const auto* node : model.allNodes()) {
        if (const auto* t = node->agenticTask(); t && t->reflection) {
            const auto& kind = t->reflection->kind;
            out.emplace_back(node->id, std::holds_alternative<SelfReflection>(kind)    ? "s"
                                       : std::holds_alternative<CrossReflection>(kind) ? "c"
                                                                                       : "h");
        }
        if (const auto* g = node->agenticGateway())
            out.emplace_back(node->id, coordination(*g));
    }
    for (const auto& flow : model.messageFlows())
        if (flow.agentic)
            out.emplace_back(flow.id, coordination(*flow.agentic));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace hagent::test
