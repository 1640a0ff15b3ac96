#include "hagent/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <random>
#include <set>

#include "hagent/error.hpp"

namespace hagent {

std::string_view verdictName(Verdict v) noexcept
{
    return v == Verdict::Accept ? "accept" : "revise";
}

Verdict ScriptedVerdicts::verdictOf(const ElementId& laneId)
{
    auto it = scenario_->perLane.find(laneId);
    if (it == scenario_->perLane.end())
        throw Error(ErrorCode::MissingBehavior, "lane '" + laneId + "' is consulted for a verdict but has no script");
    const auto& list = it->second.verdicts;
    if (list.empty())
        return Verdict::Accept;
    std::size_t& i = cursor_[laneId];
    Verdict v = list[std::min(i, list.size() - 1)];
    ++i;
    return v;
}

namespace {

// ---------------------------------------------------------------------------
// Conditions
// ---------------------------------------------------------------------------

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool isDefault(const std::optional<std::string>& condition)
{
    return !condition || trim(*condition).empty();
}

/// `label == "text"`; the quoted text may escape `"` and `\` with a backslash.
bool evaluate(const std::string& flowId, const std::string& condition, const std::optional<CandidateOutput>& last)
{
    auto failure = [&] {
        return Error(ErrorCode::BadCondition, "condition on '" + flowId + "' is not of the form label == \"text\": " +
                                                  condition);
    };
    std::string_view s = trim(condition);
    if (s.substr(0, 5) != "label")
        throw failure();
    s = trim(s.substr(5));
    if (s.substr(0, 2) != "==")
        throw failure();
    s = trim(s.substr(2));
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
        throw failure();
    s = s.substr(1, s.size() - 2);
    std::string expected;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size())
            expected += s[++i];
        else if (s[i] == '"')
            throw failure();
        else
            expected += s[i];
    }
    return last && last->label == expected;
}

// ---------------------------------------------------------------------------
// Reflection loop shared by runReflection and the engine
// ---------------------------------------------------------------------------

struct ReflectionHooks {
    std::function<CandidateOutput()> produce;
    std::function<Verdict()> selfVerdict;
    VerdictSource* reviewers = nullptr;
    std::function<void()> onRound;
};

ReflectionResult reflect(const FlowNode& task, const ReflectionMode& mode, const ReflectionHooks& hooks)
{
    ReflectionResult result;
    for (int round = 1; round <= mode.maxRounds; ++round) {
        if (hooks.onRound)
            hooks.onRound();
        result.output = hooks.produce();
        result.roundsUsed = round;

        Verdict verdict = Verdict::Accept;
        if (std::holds_alternative<SelfReflection>(mode.kind)) {
            verdict = hooks.selfVerdict();
        } else {
            if (!hooks.reviewers)
                throw Error(ErrorCode::MissingBehavior, "task '" + task.id + "' needs reviewer verdicts");
            if (const auto* cross = std::get_if<CrossReflection>(&mode.kind)) {
                for (const auto& lane : cross->reviewerLaneIds)
                    if (hooks.reviewers->verdictOf(lane) == Verdict::Revise)
                        verdict = Verdict::Revise;
            } else {
                verdict = hooks.reviewers->verdictOf(std::get<HumanReflection>(mode.kind).humanLaneId);
            }
        }
        result.events.push_back(ReflectionRound{task.id, round, verdict, result.output.label});
        if (verdict == Verdict::Accept)
            break;
    }
    return result;
}

CandidateOutput materialize(const ScriptedBehavior& b, std::size_t index, const FlowNode& task)
{
    const auto& s = b.outputs[std::min(index, b.outputs.size() - 1)];
    CandidateOutput out;
    out.label = s.label;
    out.payload = s.payload;
    out.confidence = s.confidence;
    out.producerLaneId = task.laneId;
    out.producerTaskId = task.id;
    out.latencyMs = s.latencyMs.value_or(b.latencyMs.value_or(0));
    out.completeness = s.completeness.value_or(b.completeness.value_or(0));
    return out;
}

std::optional<TrustScore> laneTrustOf(const ProcessModel& model, const FlowNode& node)
{
    const Lane* lane = model.findLane(node.laneId);
    return lane && lane->agentic ? lane->agentic->trust : std::nullopt;
}

std::optional<TrustScore> taskTrustOf(const FlowNode& node)
{
    const auto* info = node.agenticTask();
    return info ? info->trust : std::nullopt;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct Branch {
    std::vector<ElementId> interior;
    std::optional<std::string> entryCondition;
    ElementId entryFlowId;
};

struct RegionShape {
    ElementId openerId; // diverging gateway or message-flow source node
    CollaborationMode mode;
    bool conditional;   // AgenticOR
    bool entersMerge;   // gateway regions; a message-flow merge target is entered by its own token later
    std::vector<Branch> branches;
    ElementId mergingId;
    MergeStrategy strategy;
    std::vector<std::optional<TrustScore>> trusts; // opener and merge side
};

struct Token {
    ElementId node;
    ElementId via;
    std::optional<CandidateOutput> last;
    std::size_t seq = 0;
};

class Engine {
public:
    Engine(const ProcessModel& model, const ScenarioPolicy& scenario, std::size_t budget)
        : m_(model), s_(scenario), budget_(budget), rng_(scenario.seed), verdicts_(scenario)
    {
    }

    Trace run();
    CandidateOutput region(const CollaborationRegion& region, const std::optional<CandidateOutput>& input);
    std::vector<TraceEvent> takeEvents() { return std::move(trace_.events); }

    void requireBehaviors();
    void requireRegionBehaviors(const CollaborationRegion& region);

private:
    const ProcessModel& m_;
    const ScenarioPolicy& s_;
    std::size_t budget_;
    std::size_t steps_ = 0;
    std::mt19937_64 rng_;
    ScriptedVerdicts verdicts_;
    std::map<ElementId, std::size_t> outputCursor_;
    std::map<ElementId, std::size_t> selfVerdictCursor_;
    std::map<ElementId, CollaborationRegion> regions_;
    std::map<ElementId, CandidateOutput> pendingMessageOutputs_;
    std::map<ElementId, std::set<ElementId>> reach_;
    Trace trace_;

    std::deque<Token> queue_;
    std::map<ElementId, std::map<ElementId, std::deque<Token>>> waiting_;
    std::size_t arrivals_ = 0;

    void step();
    void emit(TraceEvent e) { trace_.events.push_back(std::move(e)); }
    const ScriptedBehavior* behaviorOf(const ElementId& id) const;
    const FlowNode& node(const ElementId& id) const;

    CandidateOutput produce(const FlowNode& task, const ScriptedBehavior* b);
    CandidateOutput runTask(const FlowNode& task);
    CandidateOutput executeShape(const RegionShape& shape, const std::optional<CandidateOutput>& input);
    RegionShape gatewayShape(const CollaborationRegion& region) const;
    const CollaborationRegion& regionFor(const ElementId& divergingId);

    void push(const ElementId& target, const ElementId& via, std::optional<CandidateOutput> last);
    void arrive(Token t);
    void after(const FlowNode& n, const std::optional<CandidateOutput>& last);
    void route(const FlowNode& gw, const std::optional<CandidateOutput>& last);
    void messageRegions(const FlowNode& source, const std::optional<CandidateOutput>& last);
    bool tryJoin(const FlowNode& gw);
    void fireJoin(const FlowNode& gw);
    const std::set<ElementId>& reachable(const ElementId& from);
    bool canStillArrive(const ElementId& gwId, const SequenceFlow& flow);
};

void Engine::step()
{
    if (++steps_ > budget_)
        throw Error(ErrorCode::StepBudgetExceeded,
                    "simulation exceeded its step budget of " + std::to_string(budget_) + " steps");
}

const ScriptedBehavior* Engine::behaviorOf(const ElementId& id) const
{
    auto it = s_.perTask.find(id);
    return it == s_.perTask.end() ? nullptr : &it->second;
}

const FlowNode& Engine::node(const ElementId& id) const
{
    const FlowNode* n = m_.findNode(id);
    if (!n)
        throw Error(ErrorCode::InvalidModel, "no flow node '" + id + "'");
    return *n;
}

void Engine::requireBehaviors()
{
    for (const auto* n : m_.allNodes()) {
        const auto* info = n->agenticTask();
        if (!info)
            continue;
        const auto* b = behaviorOf(n->id);
        if (!b)
            throw Error(ErrorCode::MissingBehavior, "agentic task '" + n->id + "' has no scripted behavior");
        if (info->reflection && b->outputs.empty())
            throw Error(ErrorCode::MissingBehavior, "reflective task '" + n->id + "' has no scripted outputs");
    }
    for (const auto* n : m_.allNodes()) {
        const auto* info = n->agenticGateway();
        if (info && info->opensCollaboration())
            requireRegionBehaviors(regionFor(n->id));
    }
}

void Engine::requireRegionBehaviors(const CollaborationRegion& region)
{
    for (const auto& path : region.branches) {
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            const FlowNode& n = node(*it);
            if (!n.task() && !n.subProcess())
                continue;
            if (!behaviorOf(n.id))
                throw Error(ErrorCode::MissingBehavior,
                            "branch terminal task '" + n.id + "' of region '" + region.divergingGatewayId +
                                "' has no scripted behavior");
            break;
        }
    }
}

const CollaborationRegion& Engine::regionFor(const ElementId& divergingId)
{
    auto it = regions_.find(divergingId);
    if (it == regions_.end())
        it = regions_.emplace(divergingId, findMergeFor(m_, divergingId)).first;
    return it->second;
}

CandidateOutput Engine::produce(const FlowNode& task, const ScriptedBehavior* b)
{
    CandidateOutput out;
    if (b && !b->outputs.empty()) {
        out = materialize(*b, outputCursor_[task.id]++, task);
    } else {
        out.label = "done";
        out.producerLaneId = task.laneId;
        out.producerTaskId = task.id;
        if (b) {
            out.latencyMs = b->latencyMs.value_or(0);
            out.completeness = b->completeness.value_or(0);
        }
    }
    if (b && b->latencyJitterMs && *b->latencyJitterMs > 0)
        out.latencyMs += static_cast<long long>(rng_() % (static_cast<std::uint64_t>(*b->latencyJitterMs) + 1));
    out.effectiveTrust = propagateTrust(laneTrustOf(m_, task), taskTrustOf(task), out.confidence);
    return out;
}

CandidateOutput Engine::runTask(const FlowNode& task)
{
    const auto* b = behaviorOf(task.id);
    const auto* info = task.agenticTask();
    if (info && !b)
        throw Error(ErrorCode::MissingBehavior, "agentic task '" + task.id + "' has no scripted behavior");

    CandidateOutput out;
    if (info && info->reflection) {
        if (b->outputs.empty())
            throw Error(ErrorCode::MissingBehavior, "reflective task '" + task.id + "' has no scripted outputs");
        ReflectionHooks hooks;
        hooks.produce = [&] { return produce(task, b); };
        hooks.selfVerdict = [&] {
            const auto& list = b->reflectionVerdicts;
            if (list.empty())
                return Verdict::Accept;
            std::size_t& i = selfVerdictCursor_[task.id];
            Verdict v = list[std::min(i, list.size() - 1)];
            ++i;
            return v;
        };
        hooks.reviewers = &verdicts_;
        bool first = true;
        hooks.onRound = [&] {
            // the first round is covered by the step that activated the task
            if (!first)
                step();
            first = false;
        };
        auto result = reflect(task, *info->reflection, hooks);
        for (auto& e : result.events)
            emit(std::move(e));
        out = std::move(result.output);
    } else {
        out = produce(task, b);
    }
    emit(TaskDone{task.id, out, *out.effectiveTrust});
    return out;
}

RegionShape Engine::gatewayShape(const CollaborationRegion& region) const
{
    const FlowNode& div = node(region.divergingGatewayId);
    const FlowNode& merge = node(region.mergingGatewayId);
    RegionShape shape;
    shape.openerId = div.id;
    shape.mode = *div.agenticGateway()->collaboration();
    shape.conditional = div.gateway()->kind == GatewayKind::Inclusive;
    shape.entersMerge = true;
    shape.mergingId = merge.id;
    shape.strategy = *merge.agenticGateway()->merge();
    shape.trusts = {div.agenticGateway()->trust, merge.agenticGateway()->trust};

    auto outs = m_.outgoing(div.id);
    for (std::size_t i = 0; i < region.branches.size(); ++i) {
        const auto& path = region.branches[i];
        Branch b;
        b.interior.assign(path.begin() + 1, path.end() - 1);
        // branches follow the diverging gateway's outgoing flows one to one
        const SequenceFlow* entry = outs.at(i);
        b.entryCondition = entry->condition;
        b.entryFlowId = entry->id;
        shape.branches.push_back(std::move(b));
    }
    return shape;
}

CandidateOutput Engine::region(const CollaborationRegion& region, const std::optional<CandidateOutput>& input)
{
    return executeShape(gatewayShape(region), input);
}

CandidateOutput Engine::executeShape(const RegionShape& shape, const std::optional<CandidateOutput>& input)
{
    emit(RegionOpen{shape.openerId, shape.mode});

    std::vector<const Branch*> active;
    for (const auto& b : shape.branches)
        if (!shape.conditional || isDefault(b.entryCondition) || evaluate(b.entryFlowId, *b.entryCondition, input))
            active.push_back(&b);
    if (active.empty())
        throw Error(ErrorCode::NoActiveBranch,
                    "no branch condition of '" + shape.openerId + "' holds for the incoming output");

    std::vector<CandidateOutput> candidates;
    std::vector<const FlowNode*> terminals;
    for (const auto* b : active) {
        std::optional<CandidateOutput> last = input;
        const FlowNode* terminal = nullptr;
        for (const auto& id : b->interior) {
            step();
            const FlowNode& n = node(id);
            emit(TokenEnter{n.id});
            if (n.task() || n.subProcess()) {
                last = runTask(n);
                terminal = &n;
            }
        }
        if (!last) {
            CandidateOutput pass;
            pass.label = "pass";
            pass.producerLaneId = node(shape.openerId).laneId;
            pass.effectiveTrust = propagateTrust(std::nullopt, std::nullopt, std::nullopt);
            last = pass;
        }
        candidates.push_back(*last);
        terminals.push_back(terminal);
    }

    if (shape.mode == CollaborationMode::DebateCooperation) {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const FlowNode* t = terminals[i];
            const auto* b = t ? behaviorOf(t->id) : nullptr;
            if (b && outputCursor_[t->id] < b->outputs.size())
                candidates[i] = produce(*t, b);
        }
        emit(DebateRound{shape.openerId, candidates});
    }

    if (shape.entersMerge) {
        step();
        emit(TokenEnter{shape.mergingId});
    }
    emit(CandidateSet{shape.mergingId, candidates});

    const FlowNode& merge = node(shape.mergingId);
    std::optional<std::map<ElementId, std::string>> votes;
    std::optional<std::string> pick;

    if (mergeFamily(shape.strategy) == MergeFamily::Voting) {
        std::map<ElementId, std::string> cast;
        for (const auto* t : terminals) {
            const auto* b = t ? behaviorOf(t->id) : nullptr;
            if (!b || !b->vote)
                continue;
            ElementId key = cast.count(t->laneId) ? t->laneId + "/" + t->id : t->laneId;
            cast[key] = *b->vote;
        }
        for (const auto& [laneId, script] : s_.perLane) {
            auto it = script.votes.find(shape.mergingId);
            if (it != script.votes.end())
                cast[laneId] = it->second;
        }
        votes = std::move(cast);
    }

    if (shape.strategy == MergeStrategy::RoleLeaderDriven) {
        auto isManager = [&](const ElementId& laneId) {
            const Lane* lane = m_.findLane(laneId);
            return lane && lane->agentic && lane->agentic->role.isManager();
        };
        std::optional<ElementId> decider;
        if (isManager(merge.laneId))
            decider = merge.laneId;
        if (!decider) {
            std::set<ElementId> lanes;
            for (const auto* b : active)
                for (const auto& id : b->interior)
                    lanes.insert(node(id).laneId);
            for (const auto& l : lanes)
                if (isManager(l)) {
                    decider = l;
                    break;
                }
        }
        if (!decider)
            throw Error(ErrorCode::ManagerPickMissing, "no manager lane decides the merge at '" + shape.mergingId + "'");
        auto script = s_.perLane.find(*decider);
        if (script != s_.perLane.end()) {
            auto it = script->second.picks.find(shape.mergingId);
            if (it != script->second.picks.end())
                pick = it->second;
        }
        if (!pick)
            throw Error(ErrorCode::ManagerPickMissing,
                        "manager lane '" + *decider + "' has no pick for '" + shape.mergingId + "'");
    }

    auto result = applyMergeStrategy(shape.strategy, candidates, votes, pick);
    for (const auto& t : shape.trusts)
        if (t) {
            result.rationale += "; gateway trust " + std::to_string(t->value()) + " recorded, not used for routing";
            break;
        }
    emit(MergeDecision{shape.mergingId, shape.strategy, result.winner.label, result.rationale});
    return result.winner;
}

void Engine::push(const ElementId& target, const ElementId& via, std::optional<CandidateOutput> last)
{
    queue_.push_back(Token{target, via, std::move(last), ++arrivals_});
}

void Engine::after(const FlowNode& n, const std::optional<CandidateOutput>& last)
{
    messageRegions(n, last);
    auto outs = m_.outgoing(n.id);
    bool any = false;
    for (const auto* f : outs) {
        if (!isDefault(f->condition) && !evaluate(f->id, *f->condition, last))
            continue;
        push(f->targetRef, f->id, last);
        any = true;
    }
    if (!any)
        emit(TokenEnd{n.id});
}

void Engine::route(const FlowNode& gw, const std::optional<CandidateOutput>& last)
{
    auto outs = m_.outgoing(gw.id);
    if (outs.empty()) {
        emit(TokenEnd{gw.id});
        return;
    }
    auto kind = gw.gateway()->kind;
    if (kind == GatewayKind::Parallel) {
        for (const auto* f : outs)
            push(f->targetRef, f->id, last);
        return;
    }

    std::vector<const SequenceFlow*> taken, defaults;
    for (const auto* f : outs) {
        if (isDefault(f->condition))
            defaults.push_back(f);
        else if (evaluate(f->id, *f->condition, last))
            taken.push_back(f);
    }
    if (kind == GatewayKind::Exclusive) {
        if (!taken.empty())
            taken.resize(1);
        else if (!defaults.empty())
            taken = {defaults.front()};
    } else if (taken.empty()) {
        taken = defaults;
    }
    if (taken.empty())
        throw Error(ErrorCode::ConditionUnmatched,
                    "no outgoing condition of '" + gw.id + "' holds and there is no default flow");
    for (const auto* f : taken)
        push(f->targetRef, f->id, last);
}

void Engine::messageRegions(const FlowNode& source, const std::optional<CandidateOutput>& last)
{
    std::vector<const MessageFlow*> flows;
    for (const auto* f : m_.messageFlowsFrom(source.id))
        if (f->agentic && f->agentic->opensCollaboration())
            flows.push_back(f);
    if (flows.empty())
        return;

    const Pool* sourcePool = m_.poolOf(source.id);
    std::vector<const MessageFlow*> usable;
    for (const auto* f : flows) {
        const Pool* target = m_.findPool(f->targetRef) ? m_.findPool(f->targetRef) : m_.poolOf(f->targetRef);
        if (sourcePool->multiInstance || (target && target->multiInstance)) {
            trace_.warnings.push_back(makeWarning(
                "W-MULTIPOOL", f->id, "agentic message flow touches a multi-instance pool; region not simulated"));
            continue;
        }
        if (m_.findPool(f->targetRef))
            throw Error(ErrorCode::MalformedRegion,
                        "collaboration message flow '" + f->id + "' targets a pool without flow nodes");
        usable.push_back(f);
    }
    if (usable.empty())
        return;

    RegionShape shape;
    shape.openerId = source.id;
    shape.mode = *usable.front()->agentic->collaboration();
    shape.conditional = false;
    shape.entersMerge = false;
    shape.trusts.push_back(usable.front()->agentic->trust);

    std::optional<const MessageFlow*> mergeFlow;
    for (const auto* f : usable) {
        if (*f->agentic->collaboration() != shape.mode)
            throw Error(ErrorCode::MalformedRegion,
                        "message flows leaving '" + source.id + "' declare different collaboration modes");
        Branch branch;
        branch.entryFlowId = f->id;
        ElementId at = f->targetRef;
        std::set<ElementId> seen;
        while (true) {
            if (!seen.insert(at).second)
                throw Error(ErrorCode::MalformedRegion, "branch of message flow '" + f->id + "' loops");
            branch.interior.push_back(at);
            const MessageFlow* back = nullptr;
            for (const auto* r : m_.messageFlowsFrom(at))
                if (r->agentic && r->agentic->mergesCollaboration() && m_.poolOf(r->targetRef) == sourcePool)
                    back = r;
            if (back) {
                if (mergeFlow && ((*mergeFlow)->targetRef != back->targetRef ||
                                  *(*mergeFlow)->agentic->merge() != *back->agentic->merge()))
                    throw Error(ErrorCode::MalformedRegion,
                                "branches opened at '" + source.id + "' return to different merges");
                mergeFlow = back;
                break;
            }
            auto outs = m_.outgoing(at);
            if (outs.size() != 1)
                throw Error(ErrorCode::MalformedRegion,
                            "branch of message flow '" + f->id + "' does not return through a merge message flow");
            at = outs.front()->targetRef;
        }
        shape.branches.push_back(std::move(branch));
    }
    shape.mergingId = (*mergeFlow)->targetRef;
    shape.strategy = *(*mergeFlow)->agentic->merge();
    shape.trusts.push_back((*mergeFlow)->agentic->trust);

    pendingMessageOutputs_[shape.mergingId] = executeShape(shape, last);
}

const std::set<ElementId>& Engine::reachable(const ElementId& from)
{
    auto it = reach_.find(from);
    if (it != reach_.end())
        return it->second;
    std::set<ElementId> seen{from};
    std::vector<ElementId> stack{from};
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        for (const auto* f : m_.outgoing(cur))
            if (seen.insert(f->targetRef).second)
                stack.push_back(f->targetRef);
    }
    return reach_.emplace(from, std::move(seen)).first->second;
}

/// Whether some live token could still travel along `flow` into `gwId`.
bool Engine::canStillArrive(const ElementId& gwId, const SequenceFlow& flow)
{
    for (const auto& t : queue_) {
        if (t.node == gwId && t.via == flow.id)
            return true; // already travelling on this flow
        if (reachable(t.node).count(flow.sourceRef))
            return true;
    }
    for (const auto& [other, buffers] : waiting_) {
        if (other == gwId)
            continue;
        for (const auto& [via, tokens] : buffers)
            if (!tokens.empty() && reachable(other).count(flow.sourceRef))
                return true;
    }
    return false;
}

bool Engine::tryJoin(const FlowNode& gw)
{
    auto& buffers = waiting_[gw.id];
    auto ins = m_.incoming(gw.id);
    bool parallel = gw.gateway()->kind == GatewayKind::Parallel;
    bool anyToken = false;
    for (const auto* f : ins) {
        bool has = !buffers[f->id].empty();
        anyToken = anyToken || has;
        if (!has && (parallel || canStillArrive(gw.id, *f)))
            return false;
    }
    if (!anyToken)
        return false;
    fireJoin(gw);
    return true;
}

void Engine::fireJoin(const FlowNode& gw)
{
    auto& buffers = waiting_[gw.id];
    std::optional<Token> latest;
    for (auto& [via, tokens] : buffers) {
        if (tokens.empty())
            continue;
        Token t = std::move(tokens.front());
        tokens.pop_front();
        if (!latest || t.seq > latest->seq)
            latest = std::move(t);
    }
    bool empty = std::all_of(buffers.begin(), buffers.end(), [](const auto& kv) { return kv.second.empty(); });
    if (empty)
        waiting_.erase(gw.id);
    emit(TokenEnter{gw.id});
    messageRegions(gw, latest->last);
    route(gw, latest->last);
}

void Engine::arrive(Token t)
{
    const FlowNode& n = node(t.node);
    if (auto it = pendingMessageOutputs_.find(n.id); it != pendingMessageOutputs_.end()) {
        t.last = std::move(it->second);
        pendingMessageOutputs_.erase(it);
    }

    if (n.isEnd()) {
        emit(TokenEnd{n.id});
        return;
    }
    if (n.isStart()) {
        emit(TokenEnter{n.id});
        after(n, t.last);
        return;
    }
    if (const auto* gw = n.gateway()) {
        if (gw->agentic) {
            if (!gw->agentic->opensCollaboration())
                throw Error(ErrorCode::InvalidModel,
                            "merging gateway '" + n.id + "' reached outside its collaboration region");
            emit(TokenEnter{n.id});
            const auto& r = regionFor(n.id);
            auto winner = region(r, t.last);
            after(node(r.mergingGatewayId), winner);
            return;
        }
        bool joins = m_.incoming(n.id).size() > 1 && gw->kind != GatewayKind::Exclusive;
        if (joins) {
            waiting_[n.id][t.via].push_back(std::move(t));
            tryJoin(n);
            return;
        }
        emit(TokenEnter{n.id});
        messageRegions(n, t.last);
        route(n, t.last);
        return;
    }
    emit(TokenEnter{n.id});
    auto out = runTask(n);
    after(n, out);
}

Trace Engine::run()
{
    requireBehaviors();
    for (const auto& pool : m_.pools())
        for (const auto& n : pool.nodes)
            if (n.isStart())
                push(n.id, {}, std::nullopt);

    while (true) {
        while (!queue_.empty()) {
            Token t = std::move(queue_.front());
            queue_.pop_front();
            step();
            arrive(std::move(t));
        }
        if (waiting_.empty())
            break;
        bool fired = false;
        for (const auto& [id, buffers] : waiting_) {
            (void)buffers;
            if (tryJoin(node(id))) {
                fired = true;
                break;
            }
        }
        if (!fired) {
            std::string ids;
            for (const auto& [id, buffers] : waiting_)
                ids += (ids.empty() ? "" : ", ") + id;
            throw Error(ErrorCode::Deadlock, "tokens wait forever at " + ids);
        }
    }
    return std::move(trace_);
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

std::string trustText(const std::optional<TrustScore>& t)
{
    return t ? std::to_string(t->value()) : "-";
}

std::string candidateText(const CandidateOutput& c)
{
    return quote(c.label) + " lane=" + (c.producerLaneId.empty() ? "-" : c.producerLaneId) +
           " confidence=" + trustText(c.confidence) + " trust=" + trustText(c.effectiveTrust) +
           " latencyMs=" + std::to_string(c.latencyMs) + " completeness=" + std::to_string(c.completeness);
}

std::string candidateList(const std::vector<CandidateOutput>& list)
{
    std::string out = "size=" + std::to_string(list.size()) + " candidates=[";
    for (std::size_t i = 0; i < list.size(); ++i)
        out += (i ? ", " : "") + candidateText(list[i]);
    return out + "]";
}

struct Details {
    std::string operator()(const TokenEnter&) const { return {}; }
    std::string operator()(const TokenEnd&) const { return {}; }
    std::string operator()(const TaskDone& e) const
    {
        return "label=" + quote(e.output.label) + " lane=" + e.output.producerLaneId +
               " confidence=" + trustText(e.output.confidence) +
               " trust=" + std::to_string(e.effectiveTrust.value()) +
               " latencyMs=" + std::to_string(e.output.latencyMs) +
               " completeness=" + std::to_string(e.output.completeness) + " payload=" + quote(e.output.payload);
    }
    std::string operator()(const ReflectionRound& e) const
    {
        return "round=" + std::to_string(e.round) + " verdict=" + std::string(verdictName(e.verdict)) +
               " label=" + quote(e.label);
    }
    std::string operator()(const RegionOpen& e) const
    {
        return "mode=" + std::string(collaborationName(e.mode));
    }
    std::string operator()(const DebateRound& e) const { return candidateList(e.revised); }
    std::string operator()(const CandidateSet& e) const { return candidateList(e.candidates); }
    std::string operator()(const MergeDecision& e) const
    {
        return "strategy=" + std::string(mergeToken(e.strategy)) + " chosen=" + quote(e.chosenLabel) +
               " rationale=" + quote(e.rationale);
    }
};

} // namespace

std::string_view eventKind(const TraceEvent& e) noexcept
{
    static constexpr std::string_view names[] = {"TokenEnter",   "TaskDone",     "ReflectionRound", "RegionOpen",
                                                 "DebateRound",  "CandidateSet", "MergeDecision",   "TokenEnd"};
    return names[e.index()];
}

const ElementId& eventElement(const TraceEvent& e) noexcept
{
    return std::visit(
        [](const auto& ev) -> const ElementId& {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, TokenEnter> || std::is_same_v<T, TokenEnd>)
                return ev.nodeId;
            else if constexpr (std::is_same_v<T, TaskDone> || std::is_same_v<T, ReflectionRound>)
                return ev.taskId;
            else if constexpr (std::is_same_v<T, RegionOpen> || std::is_same_v<T, DebateRound>)
                return ev.divergingId;
            else
                return ev.mergingId;
        },
        e);
}

std::string formatEvent(std::size_t seq, const TraceEvent& e)
{
    std::string line = std::to_string(seq) + "  " + std::string(eventKind(e)) + "  " + eventElement(e);
    auto details = std::visit(Details{}, e);
    if (!details.empty())
        line += "  " + details;
    return line;
}

std::string formatTrace(const Trace& trace)
{
    std::string out;
    for (std::size_t i = 0; i < trace.events.size(); ++i)
        out += formatEvent(i + 1, trace.events[i]) + "\n";
    return out;
}

Trace runSimulation(const ProcessModel& model, const ScenarioPolicy& scenario, std::size_t stepBudget)
{
    Engine engine(model, scenario, stepBudget);
    return engine.run();
}

ReflectionResult runReflection(const FlowNode& task, const ScriptedBehavior& script,
                               std::optional<TrustScore> laneTrust, VerdictSource* reviewers)
{
    const auto* info = task.agenticTask();
    if (!info || !info->reflection)
        throw Error(ErrorCode::InvalidModel, "task '" + task.id + "' has no reflection mode");
    if (script.outputs.empty())
        throw Error(ErrorCode::MissingBehavior, "reflective task '" + task.id + "' has no scripted outputs");

    std::size_t produced = 0, judged = 0;
    ReflectionHooks hooks;
    hooks.produce = [&] {
        auto out = materialize(script, produced++, task);
        out.effectiveTrust = propagateTrust(laneTrust, info->trust, out.confidence);
        return out;
    };
    hooks.selfVerdict = [&] {
        const auto& list = script.reflectionVerdicts;
        if (list.empty())
            return Verdict::Accept;
        return list[std::min(judged++, list.size() - 1)];
    };
    hooks.reviewers = reviewers;
    return reflect(task, *info->reflection, hooks);
}

RegionResult executeRegion(const ProcessModel& model, const CollaborationRegion& region,
                           const ScenarioPolicy& scenario, const std::optional<CandidateOutput>& input)
{
    Engine engine(model, scenario, kStepBudget);
    engine.requireRegionBehaviors(region);
    RegionResult result;
    result.winner = engine.region(region, input);
    result.events = engine.takeEvents();
    return result;
}

} // namespace hagent
