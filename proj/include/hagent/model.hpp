#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hagent/diagnostic.hpp"
#include "hagent/trust.hpp"

namespace hagent {

using ElementId = std::string;

// ---------------------------------------------------------------------------
// Agent profiling
// ---------------------------------------------------------------------------

enum class RoleKind { Manager, Worker, Custom };

struct AgentRole {
    RoleKind kind = RoleKind::Worker;
    std::string customName; // only meaningful for RoleKind::Custom

    static AgentRole manager() { return {RoleKind::Manager, {}}; }
    static AgentRole worker() { return {RoleKind::Worker, {}}; }
    static AgentRole custom(std::string name) { return {RoleKind::Custom, std::move(name)}; }

    bool isManager() const noexcept { return kind == RoleKind::Manager; }
    /// The text spelling used in documents: "manager", "worker" or the custom name.
    std::string text() const;

    bool operator==(const AgentRole&) const = default;
};

struct AgentProfile {
    AgentRole role;
    std::optional<TrustScore> trust;

    bool operator==(const AgentProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Reflection
// ---------------------------------------------------------------------------

struct SelfReflection {
    bool operator==(const SelfReflection&) const = default;
};

struct CrossReflection {
    std::vector<ElementId> reviewerLaneIds;
    bool operator==(const CrossReflection&) const = default;
};

struct HumanReflection {
    ElementId humanLaneId;
    bool operator==(const HumanReflection&) const = default;
};

struct ReflectionMode {
    static constexpr int kDefaultMaxRounds = 3;

    std::variant<SelfReflection, CrossReflection, HumanReflection> kind;
    int maxRounds = kDefaultMaxRounds;

    bool operator==(const ReflectionMode&) const = default;
};

struct AgenticTaskInfo {
    std::optional<ReflectionMode> reflection;
    std::optional<TrustScore> trust;

    bool operator==(const AgenticTaskInfo&) const = default;
};

// ---------------------------------------------------------------------------
// Collaboration
// ---------------------------------------------------------------------------

enum class CollaborationMode { Competition, DebateCooperation, RoleCooperation, VotingCooperation };

enum class MergeFamily { Voting, Role, Competition };

enum class MergeStrategy {
    VotingMajority,
    VotingAbsolute,
    VotingMinority,
    RoleLeaderDriven,
    RoleComposed,
    CompetitionFastest,
    CompetitionMostComplete,
};

inline constexpr CollaborationMode kAllCollaborationModes[] = {
    CollaborationMode::Competition, CollaborationMode::DebateCooperation,
    CollaborationMode::RoleCooperation, CollaborationMode::VotingCooperation};

inline constexpr MergeStrategy kAllMergeStrategies[] = {
    MergeStrategy::VotingMajority,   MergeStrategy::VotingAbsolute,     MergeStrategy::VotingMinority,
    MergeStrategy::RoleLeaderDriven, MergeStrategy::RoleComposed,       MergeStrategy::CompetitionFastest,
    MergeStrategy::CompetitionMostComplete};

MergeFamily mergeFamily(MergeStrategy s) noexcept;

/// Document tokens: "competition", "debate", "role", "voting".
std::string_view collaborationToken(CollaborationMode m) noexcept;
std::optional<CollaborationMode> parseCollaborationToken(std::string_view token) noexcept;

/// Document tokens of the form `family.variant`, e.g. "voting.absolute".
std::string_view mergeToken(MergeStrategy s) noexcept;
std::optional<MergeStrategy> parseMergeToken(std::string_view token) noexcept;

/// Human-facing names used in traces ("roleCooperation", "role.leaderDriven").
std::string_view collaborationName(CollaborationMode m) noexcept;

struct CollaborationSpec {
    CollaborationMode mode;
    bool operator==(const CollaborationSpec&) const = default;
};

struct MergeSpec {
    MergeStrategy strategy;
    bool operator==(const MergeSpec&) const = default;
};

/// Extension data shared by agentic gateways and agentic message flows.
/// The diverging/outgoing side carries a collaboration mode, the
/// merging/incoming side a merge strategy; never both.
struct AgenticCoordination {
    std::variant<CollaborationSpec, MergeSpec> spec;
    std::optional<TrustScore> trust;

    bool opensCollaboration() const noexcept { return std::holds_alternative<CollaborationSpec>(spec); }
    bool mergesCollaboration() const noexcept { return std::holds_alternative<MergeSpec>(spec); }
    std::optional<CollaborationMode> collaboration() const noexcept;
    std::optional<MergeStrategy> merge() const noexcept;

    bool operator==(const AgenticCoordination&) const = default;
};

using AgenticGatewayInfo = AgenticCoordination;
using AgenticMessageFlowInfo = AgenticCoordination;

// ---------------------------------------------------------------------------
// Preserved foreign content
// ---------------------------------------------------------------------------

/// Document content the model does not interpret but must carry through a
/// parse/serialize cycle unchanged.
struct Extensions {
    /// Attributes outside the interpreted set, qualified name as written.
    std::vector<std::pair<std::string, std::string>> attributes;
    /// Raw source text of foreign-namespace children of `extensionElements`.
    std::vector<std::string> foreignElements;
    /// Raw source text of unsupported standard child elements.
    std::vector<std::string> opaqueChildren;

    bool empty() const noexcept { return attributes.empty() && foreignElements.empty() && opaqueChildren.empty(); }
    bool operator==(const Extensions&) const = default;
};

// ---------------------------------------------------------------------------
// Flow nodes and connecting objects
// ---------------------------------------------------------------------------

enum class GatewayKind { Exclusive, Inclusive, Parallel, Complex };

std::string_view gatewayElementName(GatewayKind k) noexcept; // "exclusiveGateway", ...

struct StartEvent {
    bool operator==(const StartEvent&) const = default;
};

struct EndEvent {
    bool operator==(const EndEvent&) const = default;
};

struct Task {
    std::optional<AgenticTaskInfo> agentic;
    bool operator==(const Task&) const = default;
};

/// Opaque: the body is kept as raw source and never executed.
struct SubProcess {
    std::string body;
    bool operator==(const SubProcess&) const = default;
};

struct Gateway {
    GatewayKind kind = GatewayKind::Exclusive;
    std::optional<AgenticGatewayInfo> agentic;
    bool operator==(const Gateway&) const = default;
};

struct FlowNode {
    ElementId id;
    std::string name;
    ElementId laneId;
    std::variant<StartEvent, EndEvent, Task, SubProcess, Gateway> kind;
    Extensions ext;

    bool isStart() const noexcept { return std::holds_alternative<StartEvent>(kind); }
    bool isEnd() const noexcept { return std::holds_alternative<EndEvent>(kind); }
    const Task* task() const noexcept { return std::get_if<Task>(&kind); }
    const Gateway* gateway() const noexcept { return std::get_if<Gateway>(&kind); }
    const SubProcess* subProcess() const noexcept { return std::get_if<SubProcess>(&kind); }

    /// Agentic info of a task, if any.
    const AgenticTaskInfo* agenticTask() const noexcept;
    /// Agentic info of a gateway, if any.
    const AgenticGatewayInfo* agenticGateway() const noexcept;

    bool operator==(const FlowNode&) const = default;
};

struct SequenceFlow {
    ElementId id;
    std::string name;
    ElementId sourceRef;
    ElementId targetRef;
    std::optional<std::string> condition;
    Extensions ext;

    bool operator==(const SequenceFlow&) const = default;
};

struct MessageFlow {
    ElementId id;
    std::string name;
    ElementId sourceRef; // a flow node or a pool (participant)
    ElementId targetRef;
    std::optional<AgenticMessageFlowInfo> agentic;
    Extensions ext;

    bool operator==(const MessageFlow&) const = default;
};

// ---------------------------------------------------------------------------
// Artifacts (no execution meaning)
// ---------------------------------------------------------------------------

struct Annotation {
    std::string text;
    bool operator==(const Annotation&) const = default;
};

struct Group {
    std::optional<std::string> categoryValueRef;
    bool operator==(const Group&) const = default;
};

struct DataObject {
    bool operator==(const DataObject&) const = default;
};

struct Association {
    ElementId sourceRef;
    ElementId targetRef;
    bool operator==(const Association&) const = default;
};

struct Artifact {
    ElementId id;
    std::string name;
    std::variant<Annotation, Group, DataObject, Association> kind;
    Extensions ext;

    bool operator==(const Artifact&) const = default;
};

// ---------------------------------------------------------------------------
// Swimlanes
// ---------------------------------------------------------------------------

struct Lane {
    ElementId id;
    std::string name;
    /// Filled by ProcessModel from FlowNode::laneId, sorted by id. Any value
    /// supplied at construction is replaced.
    std::vector<ElementId> nodes;
    std::optional<AgentProfile> agentic;
    Extensions ext;

    bool isAgentic() const noexcept { return agentic.has_value(); }
    bool operator==(const Lane&) const = default;
};

/// A participant together with the process it runs.
struct Pool {
    ElementId id;        // participant id
    std::string name;
    ElementId processId;
    std::string processName;
    ElementId laneSetId;
    bool multiInstance = false;
    std::vector<Lane> lanes;
    std::vector<FlowNode> nodes;
    std::vector<SequenceFlow> sequenceFlows;
    std::vector<Artifact> artifacts;
    Extensions participantExt;
    Extensions processExt;

    bool isAgentic() const noexcept;
    bool operator==(const Pool&) const = default;
};

/// Root-level document data carried for round-tripping.
struct DocumentInfo {
    /// Namespace declarations to re-emit on the root (prefix "" = default).
    std::vector<std::pair<std::string, std::string>> namespaces;
    /// Root attributes other than `id` and namespace declarations.
    std::vector<std::pair<std::string, std::string>> attributes;
    ElementId collaborationId;
    Extensions collaborationExt;
    /// Raw root children that are not interpreted (diagram interchange,
    /// message definitions, ...), in document order.
    std::vector<std::string> rootOpaque;

    bool operator==(const DocumentInfo&) const = default;
};

enum class ElementKind { Pool, Lane, FlowNode, SequenceFlow, MessageFlow, Artifact, LaneSet, Process, Collaboration };

struct BuildResult;

/// The whole diagram. Immutable once constructed; every element is
/// reachable by its id through the index.
///
/// Construction canonicalises element order (nodes, sequence flows,
/// artifacts and message flows sorted by id; pools and lanes keep their
/// given order) and enforces the structural invariants: unique ids,
/// resolvable references, sequence flows inside one pool, message flows
/// between pools, one lane per node, and start/end event arity.
class ProcessModel {
public:
    ProcessModel(ElementId id, std::vector<Pool> pools, std::vector<MessageFlow> messageFlows,
                 DocumentInfo document = {});

    /// Non-throwing construction; diagnostics use the parse-stage codes.
    static BuildResult tryBuild(ElementId id, std::vector<Pool> pools, std::vector<MessageFlow> messageFlows,
                                DocumentInfo document = {});

    const ElementId& id() const noexcept { return id_; }
    const std::vector<Pool>& pools() const noexcept { return pools_; }
    const std::vector<MessageFlow>& messageFlows() const noexcept { return messageFlows_; }
    const DocumentInfo& document() const noexcept { return document_; }

    bool contains(std::string_view id) const;
    std::optional<ElementKind> kindOf(std::string_view id) const;

    const Pool* findPool(std::string_view id) const;
    const Lane* findLane(std::string_view id) const;
    const FlowNode* findNode(std::string_view id) const;
    const SequenceFlow* findSequenceFlow(std::string_view id) const;
    const MessageFlow* findMessageFlow(std::string_view id) const;
    const Artifact* findArtifact(std::string_view id) const;

    /// Pool owning a node, lane, sequence flow or artifact; a pool id maps to itself.
    const Pool* poolOf(std::string_view id) const;
    const Lane* laneOf(std::string_view nodeId) const;

    /// Sequence flows in id order.
    std::vector<const SequenceFlow*> incoming(std::string_view nodeId) const;
    std::vector<const SequenceFlow*> outgoing(std::string_view nodeId) const;

    std::vector<const MessageFlow*> messageFlowsFrom(std::string_view id) const;
    std::vector<const MessageFlow*> messageFlowsTo(std::string_view id) const;

    /// All flow nodes across pools, pool order then id order.
    std::vector<const FlowNode*> allNodes() const;
    std::vector<const Lane*> allLanes() const;

    bool operator==(const ProcessModel&) const = default;

private:
    struct Ref {
        ElementKind kind;
        std::size_t pool = 0;
        std::size_t item = 0;
        bool operator==(const Ref&) const = default;
    };

    ProcessModel() = default;
    void buildIndex();
    const Ref* ref(std::string_view id) const;

    ElementId id_;
    std::vector<Pool> pools_;
    std::vector<MessageFlow> messageFlows_;
    DocumentInfo document_;

    std::map<ElementId, Ref, std::less<>> index_;
    std::map<ElementId, std::vector<std::size_t>, std::less<>> incoming_;
    std::map<ElementId, std::vector<std::size_t>, std::less<>> outgoing_;
};

struct BuildResult {
    std::optional<ProcessModel> model;
    std::vector<Diagnostic> diagnostics;
};

// ---------------------------------------------------------------------------
// Collaboration regions
// ---------------------------------------------------------------------------

struct CollaborationRegion {
    ElementId divergingGatewayId;
    ElementId mergingGatewayId;
    /// One path per outgoing flow of the diverging gateway, in flow-id
    /// order. Each starts at the diverging and ends at the merging gateway.
    std::vector<std::vector<ElementId>> branches;
    std::set<ElementId> participantLaneIds;

    bool operator==(const CollaborationRegion&) const = default;
};

/// Finds the nearest agentic merging gateway that post-dominates
/// `divergingId` in its pool's sequence-flow graph and returns the region
/// enclosed by the pair.
///
/// Throws Error(InvalidModel) when `divergingId` is not an agentic diverging
/// gateway, Error(NoMatchingMerge) when no such post-dominator exists and
/// Error(MalformedRegion) when the branches overlap, leave the region, or
/// when the merging gateway is entered from outside.
CollaborationRegion findMergeFor(const ProcessModel& model, std::string_view divergingId);

/// Role of each lane touching a region. Participant lanes, plus the lanes
/// owning the two gateways, are included.
enum class RegionRole { Manager, Worker, Custom, Human };

struct LaneRole {
    RegionRole role = RegionRole::Human;
    std::string customName;
    bool operator==(const LaneRole&) const = default;
};

std::map<ElementId, LaneRole> regionRoles(const ProcessModel& model, const CollaborationRegion& region);

/// Post-dominator sets of every node in a pool (virtual exit excluded).
/// Nodes that cannot reach an exit post-dominate nothing useful and keep
/// the full node set.
std::map<ElementId, std::set<ElementId>> postDominators(const ProcessModel& model, const Pool& pool);

} // namespace hagent
