#include "hagent/validate.hpp"

#include <algorithm>
#include <cctype>

#include "hagent/error.hpp"
#include "hagent/xmlio.hpp"

namespace hagent {

namespace {

struct Region {
    CollaborationRegion region;
    const FlowNode* diverging;
    const FlowNode* merging;
};

/// Regions of every agentic diverging gateway that has a well-formed match.
std::vector<Region> matchedRegions(const ProcessModel& model)
{
    std::vector<Region> out;
    for (const auto* node : model.allNodes()) {
        const auto* info = node->agenticGateway();
        if (!info || !info->opensCollaboration())
            continue;
        try {
            auto region = findMergeFor(model, node->id);
            const FlowNode* merging = model.findNode(region.mergingGatewayId);
            out.push_back({std::move(region), node, merging});
        } catch (const Error&) {
            // reported by E-PAIR
        }
    }
    return out;
}

void checkPairs(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto* node : model.allNodes()) {
        const auto* info = node->agenticGateway();
        if (!info || !info->opensCollaboration())
            continue;
        try {
            findMergeFor(model, node->id);
        } catch (const Error& e) {
            out.push_back(makeError("E-PAIR", node->id, e.what()));
        }
    }
}

void checkManagers(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto& r : matchedRegions(model)) {
        auto strategy = r.merging->agenticGateway()->merge();
        auto mode = r.diverging->agenticGateway()->collaboration();
        bool needsDecider = strategy == MergeStrategy::RoleLeaderDriven || mode == CollaborationMode::DebateCooperation;
        if (!needsDecider)
            continue;

        auto isManagerLane = [&](const ElementId& laneId) {
            const Lane* lane = model.findLane(laneId);
            return lane && lane->agentic && lane->agentic->role.isManager();
        };
        bool found = isManagerLane(r.merging->laneId) ||
                     std::any_of(r.region.participantLaneIds.begin(), r.region.participantLaneIds.end(), isManagerLane);
        if (!found) {
            std::string why = strategy == MergeStrategy::RoleLeaderDriven ? "leader-driven merge" : "debate cooperation";
            out.push_back(makeError("E-MGR", r.merging->id,
                                    why + " needs a manager agent to decide, but neither the merging gateway's lane "
                                          "nor any participant lane has the manager role"));
        }
    }
}

void checkVoteArity(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto& r : matchedRegions(model)) {
        auto strategy = r.merging->agenticGateway()->merge();
        if (strategy && mergeFamily(*strategy) == MergeFamily::Voting && r.region.branches.size() < 2)
            out.push_back(makeError("E-VOTE-ARITY", r.merging->id,
                                    "voting over " + std::to_string(r.region.branches.size()) +
                                        " branch(es) is vacuous; at least 2 are needed"));
    }
}

void checkReflectionRefs(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto* node : model.allNodes()) {
        const auto* info = node->agenticTask();
        if (!info || !info->reflection)
            continue;
        if (const auto* cross = std::get_if<CrossReflection>(&info->reflection->kind)) {
            for (const auto& reviewer : cross->reviewerLaneIds) {
                const Lane* lane = model.findLane(reviewer);
                if (!lane)
                    out.push_back(makeError("E-REFL-REF", node->id, "cross-reflection reviewer '" + reviewer +
                                                                        "' is not a lane"));
                else if (!lane->isAgentic())
                    out.push_back(makeError("E-REFL-REF", node->id, "cross-reflection reviewer '" + reviewer +
                                                                        "' is not an agentic lane"));
                else if (reviewer == node->laneId)
                    out.push_back(makeError("E-REFL-REF", node->id, "cross-reflection reviewer '" + reviewer +
                                                                        "' is the task's own lane"));
            }
        } else if (const auto* human = std::get_if<HumanReflection>(&info->reflection->kind)) {
            const Lane* lane = model.findLane(human->humanLaneId);
            if (!lane)
                out.push_back(makeError("E-REFL-REF", node->id, "human-reflection lane '" + human->humanLaneId +
                                                                    "' does not exist"));
            else if (lane->isAgentic())
                out.push_back(makeError("E-REFL-REF", node->id, "human-reflection lane '" + human->humanLaneId +
                                                                    "' is an agentic lane"));
        }
    }
}

void checkMessageDirections(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto& flow : model.messageFlows()) {
        if (!flow.agentic)
            continue;
        if (flow.agentic->opensCollaboration()) {
            const Pool* target = model.poolOf(flow.targetRef);
            if (!target || !target->isAgentic())
                out.push_back(makeError("E-MSG-DIR", flow.id,
                                        "collaboration message flow must lead into a pool with agentic lanes"));
        } else {
            const Pool* source = model.poolOf(flow.sourceRef);
            if (!source || !source->isAgentic())
                out.push_back(makeError("E-MSG-DIR", flow.id,
                                        "merge message flow must come from a pool with agentic lanes"));
        }
    }
}

bool strategyLike(std::string_view text)
{
    static constexpr std::string_view keywords[] = {
        "majority", "minority", "vote",    "voting",    "leader",      "composed",
        "fastest",  "complete", "debate",  "compet",    "cooperat",    "collaborat",
        "consensus", "strategy", "merge",  "reviewer decides", "decided by",
    };
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return std::any_of(std::begin(keywords), std::end(keywords),
                       [&](std::string_view k) { return lower.find(k) != std::string::npos; });
}

void checkAnnotatedComplexGateways(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto& pool : model.pools()) {
        for (const auto& node : pool.nodes) {
            const auto* gw = node.gateway();
            if (!gw || gw->kind != GatewayKind::Complex)
                continue;
            for (const auto& art : pool.artifacts) {
                const auto* assoc = std::get_if<Association>(&art.kind);
                if (!assoc || (assoc->sourceRef != node.id && assoc->targetRef != node.id))
                    continue;
                const auto& other = assoc->sourceRef == node.id ? assoc->targetRef : assoc->sourceRef;
                const Artifact* target = model.findArtifact(other);
                const auto* note = target ? std::get_if<Annotation>(&target->kind) : nullptr;
                if (note && strategyLike(note->text)) {
                    out.push_back(makeWarning("W-ANNOT-STRATEGY", node.id,
                                              "complex gateway describes a merge strategy in an annotation; "
                                              "use an agentic merging gateway instead"));
                    break;
                }
            }
        }
    }
}

void checkLaneTrust(const ProcessModel& model, std::vector<Diagnostic>& out)
{
    for (const auto* lane : model.allLanes())
        if (lane->agentic && !lane->agentic->trust)
            out.push_back(makeWarning("W-NO-TRUST", lane->id, "agentic lane has no trust score"));
}

} // namespace

const std::vector<Rule>& ruleCatalog()
{
    static const std::vector<Rule> catalog = {
        {"E-DUP-ID", Severity::Error, RuleStage::Document, "element identifiers are unique", nullptr},
        {"E-HAGENT", Severity::Error, RuleStage::Document,
         "extension elements and attributes follow the hagent vocabulary", nullptr},
        {"E-MGR", Severity::Error, RuleStage::Model,
         "leader-driven and debate regions have a manager agent as decider", &checkManagers},
        {"E-MSG-DIR", Severity::Error, RuleStage::Model,
         "agentic message flows open collaborations toward, and merge from, agentic pools", &checkMessageDirections},
        {"E-PAIR", Severity::Error, RuleStage::Model,
         "every diverging agentic gateway has a matching merging agentic gateway", &checkPairs},
        {"E-REF", Severity::Error, RuleStage::Document, "references resolve to existing elements", nullptr},
        {"E-REFL-REF", Severity::Error, RuleStage::Model,
         "cross-reflection reviewers are other agentic lanes; human-reflection lanes are not agentic",
         &checkReflectionRefs},
        {"E-STRUCT", Severity::Error, RuleStage::Document,
         "pool, lane and flow structure is consistent", nullptr},
        {"E-TRUST-RANGE", Severity::Error, RuleStage::Document, "trust scores lie in 0..100", nullptr},
        {"E-VOTE-ARITY", Severity::Error, RuleStage::Model, "voting merges combine at least two branches",
         &checkVoteArity},
        {"E-XML", Severity::Error, RuleStage::Document, "the document is well-formed XML", nullptr},
        {"E-XOR-AGENTIC", Severity::Error, RuleStage::Document,
         "only inclusive and parallel gateways carry agentic collaboration", nullptr},
        {"W-ANNOT-STRATEGY", Severity::Warning, RuleStage::Model,
         "complex gateways annotated with a merge strategy should become agentic gateways",
         &checkAnnotatedComplexGateways},
        {"W-MULTIPOOL", Severity::Warning, RuleStage::Simulation,
         "agentic message flows touching multi-instance pools are not simulated", nullptr},
        {"W-NO-TRUST", Severity::Warning, RuleStage::Model, "agentic lanes carry a trust score", &checkLaneTrust},
        {"W-UNSUPPORTED", Severity::Warning, RuleStage::Document,
         "elements outside the supported BPMN subset are preserved but not interpreted", nullptr},
    };
    return catalog;
}

const Rule* findRule(std::string_view code)
{
    for (const auto& rule : ruleCatalog())
        if (rule.code == code)
            return &rule;
    return nullptr;
}

void sortDiagnostics(std::vector<Diagnostic>& diagnostics)
{
    std::stable_sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.code != b.code)
            return a.code < b.code;
        return a.elementId < b.elementId;
    });
}

std::vector<Diagnostic> validateModel(const ProcessModel& model)
{
    std::vector<Diagnostic> out;
    for (const auto& rule : ruleCatalog())
        if (rule.check)
            rule.check(model, out);
    sortDiagnostics(out);
    return out;
}

CheckResult checkDocument(std::string_view document)
{
    auto parsed = parseModel(document);
    CheckResult result{std::move(parsed.model), std::move(parsed.diagnostics)};
    if (result.model) {
        auto found = validateModel(*result.model);
        result.diagnostics.insert(result.diagnostics.end(), found.begin(), found.end());
    }
    sortDiagnostics(result.diagnostics);
    return result;
}

} // namespace hagent
