#include "hagent/model.hpp"

#include <algorithm>

#include "hagent/error.hpp"

namespace hagent {

std::string AgentRole::text() const
{
    switch (kind) {
    case RoleKind::Manager: return "manager";
    case RoleKind::Worker: return "worker";
    case RoleKind::Custom: return customName;
    }
    return {};
}

MergeFamily mergeFamily(MergeStrategy s) noexcept
{
    switch (s) {
    case MergeStrategy::VotingMajority:
    case MergeStrategy::VotingAbsolute:
    case MergeStrategy::VotingMinority: return MergeFamily::Voting;
    case MergeStrategy::RoleLeaderDriven:
    case MergeStrategy::RoleComposed: return MergeFamily::Role;
    case MergeStrategy::CompetitionFastest:
    case MergeStrategy::CompetitionMostComplete: return MergeFamily::Competition;
    }
    return MergeFamily::Voting;
}

std::string_view collaborationToken(CollaborationMode m) noexcept
{
    switch (m) {
    case CollaborationMode::Competition: return "competition";
    case CollaborationMode::DebateCooperation: return "debate";
    case CollaborationMode::RoleCooperation: return "role";
    case CollaborationMode::VotingCooperation: return "voting";
    }
    return {};
}

std::optional<CollaborationMode> parseCollaborationToken(std::string_view token) noexcept
{
    for (auto m : kAllCollaborationModes)
        if (collaborationToken(m) == token)
            return m;
    return std::nullopt;
}

std::string_view collaborationName(CollaborationMode m) noexcept
{
    switch (m) {
    case CollaborationMode::Competition: return "competition";
    case CollaborationMode::DebateCooperation: return "debateCooperation";
    case CollaborationMode::RoleCooperation: return "roleCooperation";
    case CollaborationMode::VotingCooperation: return "votingCooperation";
    }
    return {};
}

std::string_view mergeToken(MergeStrategy s) noexcept
{
    switch (s) {
    case MergeStrategy::VotingMajority: return "voting.majority";
    case MergeStrategy::VotingAbsolute: return "voting.absolute";
    case MergeStrategy::VotingMinority: return "voting.minority";
    case MergeStrategy::RoleLeaderDriven: return "role.leaderDriven";
    case MergeStrategy::RoleComposed: return "role.composed";
    case MergeStrategy::CompetitionFastest: return "competition.fastest";
    case MergeStrategy::CompetitionMostComplete: return "competition.mostComplete";
    }
    return {};
}

std::optional<MergeStrategy> parseMergeToken(std::string_view token) noexcept
{
    for (auto s : kAllMergeStrategies)
        if (mergeToken(s) == token)
            return s;
    return std::nullopt;
}

std::string_view gatewayElementName(GatewayKind k) noexcept
{
    switch (k) {
    case GatewayKind::Exclusive: return "exclusiveGateway";
    case GatewayKind::Inclusive: return "inclusiveGateway";
    case GatewayKind::Parallel: return "parallelGateway";
    case GatewayKind::Complex: return "complexGateway";
    }
    return {};
}

std::optional<CollaborationMode> AgenticCoordination::collaboration() const noexcept
{
    if (const auto* c = std::get_if<CollaborationSpec>(&spec))
        return c->mode;
    return std::nullopt;
}

std::optional<MergeStrategy> AgenticCoordination::merge() const noexcept
{
    if (const auto* m = std::get_if<MergeSpec>(&spec))
        return m->strategy;
    return std::nullopt;
}

const AgenticTaskInfo* FlowNode::agenticTask() const noexcept
{
    const auto* t = task();
    return t && t->agentic ? &*t->agentic : nullptr;
}

const AgenticGatewayInfo* FlowNode::agenticGateway() const noexcept
{
    const auto* g = gateway();
    return g && g->agentic ? &*g->agentic : nullptr;
}

bool Pool::isAgentic() const noexcept
{
    return std::any_of(lanes.begin(), lanes.end(), [](const Lane& l) { return l.isAgentic(); });
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

template <class T>
void sortById(std::vector<T>& items)
{
    std::stable_sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
}

struct IdRegistry {
    std::map<ElementId, int, std::less<>> seen;
    std::vector<Diagnostic>* diagnostics;

    void add(const ElementId& id, std::string_view what)
    {
        if (id.empty()) {
            diagnostics->push_back(makeError("E-STRUCT", std::nullopt, std::string(what) + " without an id"));
            return;
        }
        if (seen[id]++ == 1)
            diagnostics->push_back(makeError("E-DUP-ID", id, "identifier '" + id + "' is used more than once"));
    }
};

} // namespace

BuildResult ProcessModel::tryBuild(ElementId id, std::vector<Pool> pools, std::vector<MessageFlow> messageFlows,
                                   DocumentInfo document)
{
    BuildResult result;
    auto& diags = result.diagnostics;

    ProcessModel m;
    m.id_ = std::move(id);
    m.pools_ = std::move(pools);
    m.messageFlows_ = std::move(messageFlows);
    m.document_ = std::move(document);

    for (auto& pool : m.pools_) {
        sortById(pool.nodes);
        sortById(pool.sequenceFlows);
        sortById(pool.artifacts);
    }
    sortById(m.messageFlows_);

    IdRegistry ids{{}, &diags};
    if (!m.id_.empty())
        ids.add(m.id_, "definitions");
    if (!m.document_.collaborationId.empty())
        ids.add(m.document_.collaborationId, "collaboration");
    for (const auto& pool : m.pools_) {
        ids.add(pool.id, "pool");
        ids.add(pool.processId, "process");
        if (!pool.laneSetId.empty())
            ids.add(pool.laneSetId, "lane set");
        for (const auto& lane : pool.lanes)
            ids.add(lane.id, "lane");
        for (const auto& node : pool.nodes)
            ids.add(node.id, "flow node");
        for (const auto& flow : pool.sequenceFlows)
            ids.add(flow.id, "sequence flow");
        for (const auto& art : pool.artifacts)
            ids.add(art.id, "artifact");
    }
    for (const auto& flow : m.messageFlows_)
        ids.add(flow.id, "message flow");

    if (hasErrors(diags))
        return result;

    m.buildIndex();

    for (std::size_t p = 0; p < m.pools_.size(); ++p) {
        auto& pool = m.pools_[p];
        if (pool.lanes.empty())
            diags.push_back(makeError("E-STRUCT", pool.id, "pool '" + pool.id + "' has no lanes"));

        for (auto& lane : pool.lanes) {
            lane.nodes.clear();
            if (lane.agentic && lane.agentic->role.kind == RoleKind::Custom && lane.agentic->role.customName.empty())
                diags.push_back(makeError("E-HAGENT", lane.id, "custom agent role must not be empty"));
        }

        for (const auto& node : pool.nodes) {
            const Ref* laneRef = m.ref(node.laneId);
            if (node.laneId.empty() || !laneRef || laneRef->kind != ElementKind::Lane) {
                diags.push_back(makeError("E-STRUCT", node.id, "flow node '" + node.id + "' is not in exactly one lane"));
                continue;
            }
            if (laneRef->pool != p) {
                diags.push_back(makeError("E-STRUCT", node.id,
                                          "flow node '" + node.id + "' lies in a lane of another pool"));
                continue;
            }
            pool.lanes[laneRef->item].nodes.push_back(node.id);

            if (const auto* gw = node.gateway(); gw && gw->agentic &&
                (gw->kind == GatewayKind::Exclusive || gw->kind == GatewayKind::Complex)) {
                diags.push_back(makeError("E-XOR-AGENTIC", node.id,
                                          "agentic collaboration is only defined for inclusive and parallel gateways"));
            }
            if (const auto* info = node.agenticTask(); info && info->reflection) {
                if (info->reflection->maxRounds < 1)
                    diags.push_back(makeError("E-HAGENT", node.id, "reflection maxRounds must be positive"));
                if (const auto* cross = std::get_if<CrossReflection>(&info->reflection->kind);
                    cross && cross->reviewerLaneIds.empty())
                    diags.push_back(makeError("E-HAGENT", node.id, "cross reflection needs at least one reviewer"));
            }
        }

        for (const auto& flow : pool.sequenceFlows) {
            bool ok = true;
            for (const auto* end : {&flow.sourceRef, &flow.targetRef}) {
                const Ref* r = m.ref(*end);
                if (!r || r->kind != ElementKind::FlowNode) {
                    diags.push_back(makeError("E-REF", flow.id,
                                              "sequence flow '" + flow.id + "' references unknown node '" + *end + "'"));
                    ok = false;
                } else if (r->pool != p) {
                    diags.push_back(makeError("E-STRUCT", flow.id,
                                              "sequence flow '" + flow.id + "' leaves its pool"));
                    ok = false;
                }
            }
            if (!ok)
                continue;
            if (m.findNode(flow.targetRef)->isStart())
                diags.push_back(makeError("E-STRUCT", flow.targetRef, "start event has an incoming sequence flow"));
            if (m.findNode(flow.sourceRef)->isEnd())
                diags.push_back(makeError("E-STRUCT", flow.sourceRef, "end event has an outgoing sequence flow"));
        }

        for (const auto& art : pool.artifacts) {
            if (const auto* assoc = std::get_if<Association>(&art.kind)) {
                for (const auto* end : {&assoc->sourceRef, &assoc->targetRef})
                    if (!m.contains(*end))
                        diags.push_back(makeError("E-REF", art.id,
                                                  "association '" + art.id + "' references unknown element '" + *end + "'"));
            }
        }
    }

    for (const auto& flow : m.messageFlows_) {
        const Pool* ends[2] = {nullptr, nullptr};
        int i = 0;
        for (const auto* end : {&flow.sourceRef, &flow.targetRef}) {
            const Ref* r = m.ref(*end);
            if (!r || (r->kind != ElementKind::FlowNode && r->kind != ElementKind::Pool))
                diags.push_back(makeError("E-REF", flow.id,
                                          "message flow '" + flow.id + "' references unknown element '" + *end + "'"));
            else
                ends[i] = &m.pools_[r->pool];
            ++i;
        }
        if (ends[0] && ends[1] && ends[0] == ends[1])
            diags.push_back(makeError("E-STRUCT", flow.id, "message flow '" + flow.id + "' does not cross pools"));
    }

    if (!hasErrors(diags))
        result.model = std::move(m);
    return result;
}

ProcessModel::ProcessModel(ElementId id, std::vector<Pool> pools, std::vector<MessageFlow> messageFlows,
                           DocumentInfo document)
{
    auto built = tryBuild(std::move(id), std::move(pools), std::move(messageFlows), std::move(document));
    if (!built.model)
        throw ModelError(std::move(built.diagnostics));
    *this = std::move(*built.model);
}

void ProcessModel::buildIndex()
{
    index_.clear();
    incoming_.clear();
    outgoing_.clear();
    for (std::size_t p = 0; p < pools_.size(); ++p) {
        const auto& pool = pools_[p];
        index_.emplace(pool.id, Ref{ElementKind::Pool, p, 0});
        index_.emplace(pool.processId, Ref{ElementKind::Process, p, 0});
        if (!pool.laneSetId.empty())
            index_.emplace(pool.laneSetId, Ref{ElementKind::LaneSet, p, 0});
        for (std::size_t i = 0; i < pool.lanes.size(); ++i)
            index_.emplace(pool.lanes[i].id, Ref{ElementKind::Lane, p, i});
        for (std::size_t i = 0; i < pool.nodes.size(); ++i)
            index_.emplace(pool.nodes[i].id, Ref{ElementKind::FlowNode, p, i});
        for (std::size_t i = 0; i < pool.sequenceFlows.size(); ++i) {
            const auto& flow = pool.sequenceFlows[i];
            index_.emplace(flow.id, Ref{ElementKind::SequenceFlow, p, i});
            outgoing_[flow.sourceRef].push_back(i);
            incoming_[flow.targetRef].push_back(i);
        }
        for (std::size_t i = 0; i < pool.artifacts.size(); ++i)
            index_.emplace(pool.artifacts[i].id, Ref{ElementKind::Artifact, p, i});
    }
    for (std::size_t i = 0; i < messageFlows_.size(); ++i)
        index_.emplace(messageFlows_[i].id, Ref{ElementKind::MessageFlow, 0, i});
    if (!document_.collaborationId.empty())
        index_.emplace(document_.collaborationId, Ref{ElementKind::Collaboration, 0, 0});
}

const ProcessModel::Ref* ProcessModel::ref(std::string_view id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &it->second;
}

bool ProcessModel::contains(std::string_view id) const
{
    return ref(id) != nullptr;
}

std::optional<ElementKind> ProcessModel::kindOf(std::string_view id) const
{
    const Ref* r = ref(id);
    return r ? std::optional(r->kind) : std::nullopt;
}

const Pool* ProcessModel::findPool(std::string_view id) const
{
    const Ref* r = ref(id);
    return r && r->kind == ElementKind::Pool ? &pools_[r->pool] : nullptr;
}

const Lane* ProcessModel::findLane(std::string_view id) const
{
    const Ref* r = ref(id);
    return r && r->kind == ElementKind::Lane ? &pools_[r->pool].lanes[r->item] : nullptr;
}

const FlowNode* ProcessModel::findNode(std::string_view id) const
{
    const Ref* r = ref(id);
    return r && r->kind == ElementKind::FlowNode ? &pools_[r->pool].nodes[r->item] : nullptr;
}

const SequenceFlow* ProcessModel::findSequenceFlow(std::string_view id) const
{
    const Ref* r = ref(id);
    return r && r->kind == ElementKind::SequenceFlow ? &pools_[r->pool].sequenceFlows[r->item] : nullptr;
}

const MessageFlow* ProcessModel::findMessageFlow(std::string_view id) const
{
    const Ref* r = ref(id);
    return r && r->kind == ElementKind::MessageFlow ? &messageFlows_[r->item] : nullptr;
}

const Artifact* ProcessModel::findArtifact(std::string_view id) const
{
    const Ref* r = ref(id);
    return r && r->kind == ElementKind::Artifact ? &pools_[r->pool].artifacts[r->item] : nullptr;
}

const Pool* ProcessModel::poolOf(std::string_view id) const
{
    const Ref* r = ref(id);
    if (!r || r->kind == ElementKind::MessageFlow || r->kind == ElementKind::Collaboration)
        return nullptr;
    return &pools_[r->pool];
}

const Lane* ProcessModel::laneOf(std::string_view nodeId) const
{
    const FlowNode* node = findNode(nodeId);
    return node ? findLane(node->laneId) : nullptr;
}

std::vector<const SequenceFlow*> ProcessModel::incoming(std::string_view nodeId) const
{
    std::vector<const SequenceFlow*> out;
    const Pool* pool = poolOf(nodeId);
    auto it = incoming_.find(nodeId);
    if (pool && it != incoming_.end())
        for (auto i : it->second)
            out.push_back(&pool->sequenceFlows[i]);
    return out;
}

std::vector<const SequenceFlow*> ProcessModel::outgoing(std::string_view nodeId) const
{
    std::vector<const SequenceFlow*> out;
    const Pool* pool = poolOf(nodeId);
    auto it = outgoing_.find(nodeId);
    if (pool && it != outgoing_.end())
        for (auto i : it->second)
            out.push_back(&pool->sequenceFlows[i]);
    return out;
}

std::vector<const MessageFlow*> ProcessModel::messageFlowsFrom(std::string_view id) const
{
    std::vector<const MessageFlow*> out;
    for (const auto& f : messageFlows_)
        if (f.sourceRef == id)
            out.push_back(&f);
    return out;
}

std::vector<const MessageFlow*> ProcessModel::messageFlowsTo(std::string_view id) const
{
    std::vector<const MessageFlow*> out;
    for (const auto& f : messageFlows_)
        if (f.targetRef == id)
            out.push_back(&f);
    return out;
}

std::vector<const FlowNode*> ProcessModel::allNodes() const
{
    std::vector<const FlowNode*> out;
    for (const auto& pool : pools_)
        for (const auto& node : pool.nodes)
            out.push_back(&node);
    return out;
}

std::vector<const Lane*> ProcessModel::allLanes() const
{
    std::vector<const Lane*> out;
    for (const auto& pool : pools_)
        for (const auto& lane : pool.lanes)
            out.push_back(&lane);
    return out;
}

// ---------------------------------------------------------------------------
// Post-dominators and regions
// ---------------------------------------------------------------------------

std::map<ElementId, std::set<ElementId>> postDominators(const ProcessModel& model, const Pool& pool)
{
    std::set<ElementId> all;
    for (const auto& node : pool.nodes)
        all.insert(node.id);

    // Nodes without outgoing flows (end events and dead ends) lead to the
    // virtual exit; their post-dominator set is just themselves.
    std::map<ElementId, std::set<ElementId>> pdom;
    for (const auto& node : pool.nodes)
        pdom[node.id] = model.outgoing(node.id).empty() ? std::set<ElementId>{node.id} : all;

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = pool.nodes.rbegin(); it != pool.nodes.rend(); ++it) {
            auto succ = model.outgoing(it->id);
            if (succ.empty())
                continue;
            std::set<ElementId> meet = pdom[succ.front()->targetRef];
            for (std::size_t i = 1; i < succ.size(); ++i) {
                const auto& other = pdom[succ[i]->targetRef];
                std::set<ElementId> narrowed;
                std::set_intersection(meet.begin(), meet.end(), other.begin(), other.end(),
                                      std::inserter(narrowed, narrowed.end()));
                meet = std::move(narrowed);
            }
            meet.insert(it->id);
            if (meet != pdom[it->id]) {
                pdom[it->id] = std::move(meet);
                changed = true;
            }
        }
    }
    return pdom;
}

namespace {

bool reachesExit(const ProcessModel& model, const ElementId& from)
{
    std::set<ElementId> seen{from};
    std::vector<ElementId> stack{from};
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        auto out = model.outgoing(id);
        if (out.empty())
            return true;
        for (const auto* f : out)
            if (seen.insert(f->targetRef).second)
                stack.push_back(f->targetRef);
    }
    return false;
}

bool isAgenticMerging(const FlowNode& node)
{
    const auto* info = node.agenticGateway();
    return info && info->mergesCollaboration();
}

} // namespace

CollaborationRegion findMergeFor(const ProcessModel& model, std::string_view divergingId)
{
    const FlowNode* diverging = model.findNode(divergingId);
    const AgenticGatewayInfo* info = diverging ? diverging->agenticGateway() : nullptr;
    if (!info || !info->opensCollaboration())
        throw Error(ErrorCode::InvalidModel, "'" + std::string(divergingId) + "' is not an agentic diverging gateway");

    const ElementId& divId = diverging->id;
    if (!reachesExit(model, divId))
        throw Error(ErrorCode::NoMatchingMerge, "gateway '" + divId + "' never reaches an end of its process");

    const Pool& pool = *model.poolOf(divId);
    auto pdom = postDominators(model, pool);

    const FlowNode* merging = nullptr;
    std::size_t nearest = 0;
    for (const auto& candidate : pdom[divId]) {
        if (candidate == divId)
            continue;
        const FlowNode* node = model.findNode(candidate);
        // Post-dominators of one node form a chain; the nearest one has the
        // largest post-dominator set of its own.
        if (isAgenticMerging(*node) && pdom[candidate].size() > nearest) {
            merging = node;
            nearest = pdom[candidate].size();
        }
    }
    if (!merging)
        throw Error(ErrorCode::NoMatchingMerge, "no agentic merging gateway post-dominates '" + divId + "'");

    CollaborationRegion region;
    region.divergingGatewayId = divId;
    region.mergingGatewayId = merging->id;

    auto malformed = [&](const std::string& why) {
        return Error(ErrorCode::MalformedRegion, "region '" + divId + "' -> '" + merging->id + "': " + why);
    };

    std::set<ElementId> interior;
    for (const auto* entry : model.outgoing(divId)) {
        std::vector<ElementId> path{divId};
        ElementId current = entry->targetRef;
        while (current != merging->id) {
            if (current == divId || !interior.insert(current).second)
                throw malformed("branches overlap at '" + current + "'");
            auto in = model.incoming(current);
            auto out = model.outgoing(current);
            if (in.size() != 1)
                throw malformed("node '" + current + "' is entered from outside its branch");
            if (out.size() != 1)
                throw malformed("node '" + current + "' does not continue along a single branch");
            path.push_back(current);
            region.participantLaneIds.insert(model.findNode(current)->laneId);
            current = out.front()->targetRef;
        }
        path.push_back(merging->id);
        region.branches.push_back(std::move(path));
    }
    if (model.incoming(merging->id).size() != region.branches.size())
        throw malformed("merging gateway is entered from outside the region");
    return region;
}

std::map<ElementId, LaneRole> regionRoles(const ProcessModel& model, const CollaborationRegion& region)
{
    std::set<ElementId> lanes = region.participantLaneIds;
    for (const auto* id : {&region.divergingGatewayId, &region.mergingGatewayId})
        if (const Lane* lane = model.laneOf(*id))
            lanes.insert(lane->id);

    std::map<ElementId, LaneRole> roles;
    for (const auto& laneId : lanes) {
        const Lane* lane = model.findLane(laneId);
        LaneRole role;
        if (lane && lane->agentic) {
            switch (lane->agentic->role.kind) {
            case RoleKind::Manager: role.role = RegionRole::Manager; break;
            case RoleKind::Worker: role.role = RegionRole::Worker; break;
            case RoleKind::Custom:
                role.role = RegionRole::Custom;
                role.customName = lane->agentic->role.customName;
                break;
            }
        }
        roles.emplace(laneId, std::move(role));
    }
    return roles;
}

} // namespace hagent
