#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hagent/diagnostic.hpp"
#include "hagent/model.hpp"
#include "hagent/trust.hpp"

namespace hagent {

enum class Verdict { Revise, Accept };

std::string_view verdictName(Verdict v) noexcept; // "revise" / "accept"

/// One solution produced by a task.
struct CandidateOutput {
    std::string label;
    std::string payload;
    std::optional<TrustScore> confidence;
    ElementId producerLaneId;
    ElementId producerTaskId;
    long long latencyMs = 0;
    int completeness = 0;
    /// Filled by the simulator; merge tie-breaks fall back to
    /// propagateTrust(confidence) when absent.
    std::optional<TrustScore> effectiveTrust;

    bool operator==(const CandidateOutput&) const = default;
};

/// One scripted output. Latency and completeness fall back to the
/// behavior-level defaults, then to 0.
struct ScriptedOutput {
    std::string label;
    std::string payload;
    std::optional<TrustScore> confidence;
    std::optional<long long> latencyMs;
    std::optional<int> completeness;

    bool operator==(const ScriptedOutput&) const = default;
};

struct ScriptedBehavior {
    /// Consumed one per invocation or reflection round; the last entry
    /// repeats once the list is exhausted.
    std::vector<ScriptedOutput> outputs;
    /// Self-reflection verdicts, one per round. An empty list accepts; once
    /// exhausted, the last verdict repeats.
    std::vector<Verdict> reflectionVerdicts;
    std::optional<std::string> vote;
    std::optional<long long> latencyMs;
    std::optional<int> completeness;
    /// When set, every produced output gets a uniform extra latency in
    /// [0, latencyJitterMs] drawn from the scenario seed.
    std::optional<long long> latencyJitterMs;

    bool operator==(const ScriptedBehavior&) const = default;
};

/// What a lane's agent or human says when consulted outside its own tasks.
struct LaneScript {
    std::vector<Verdict> verdicts;           // reviewer / human reflection verdicts
    std::map<ElementId, std::string> picks;  // merging element id -> chosen label
    std::map<ElementId, std::string> votes;  // merging element id -> voted label

    bool operator==(const LaneScript&) const = default;
};

struct ScenarioPolicy {
    std::map<ElementId, ScriptedBehavior> perTask;
    std::map<ElementId, LaneScript> perLane;
    std::uint64_t seed = 0;

    bool operator==(const ScenarioPolicy&) const = default;
};

/// Reads the JSON scenario format described in docs/scenario-format.md.
/// Throws Error(BadScenario).
ScenarioPolicy parseScenario(std::string_view json);

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

struct TokenEnter {
    ElementId nodeId;
    bool operator==(const TokenEnter&) const = default;
};
struct TaskDone {
    ElementId taskId;
    CandidateOutput output;
    TrustScore effectiveTrust;
    bool operator==(const TaskDone&) const = default;
};
struct ReflectionRound {
    ElementId taskId;
    int round;
    Verdict verdict;
    std::string label; // label of the output under review
    bool operator==(const ReflectionRound&) const = default;
};
struct RegionOpen {
    ElementId divergingId;
    CollaborationMode mode;
    bool operator==(const RegionOpen&) const = default;
};
/// The single exchange round of debate cooperation: every branch's
/// candidate after considering the others.
struct DebateRound {
    ElementId divergingId;
    std::vector<CandidateOutput> revised;
    bool operator==(const DebateRound&) const = default;
};
struct CandidateSet {
    ElementId mergingId;
    std::vector<CandidateOutput> candidates;
    bool operator==(const CandidateSet&) const = default;
};
struct MergeDecision {
    ElementId mergingId;
    MergeStrategy strategy;
    std::string chosenLabel;
    std::string rationale;
    bool operator==(const MergeDecision&) const = default;
};
struct TokenEnd {
    ElementId nodeId;
    bool operator==(const TokenEnd&) const = default;
};

using TraceEvent =
    std::variant<TokenEnter, TaskDone, ReflectionRound, RegionOpen, DebateRound, CandidateSet, MergeDecision, TokenEnd>;

std::string_view eventKind(const TraceEvent& e) noexcept;
const ElementId& eventElement(const TraceEvent& e) noexcept;

struct Trace {
    std::vector<TraceEvent> events;
    std::vector<Diagnostic> warnings; // W-MULTIPOOL

    bool operator==(const Trace&) const = default;
};

/// `seq  kind  elementId  details`, one event per line, seq from 1.
std::string formatEvent(std::size_t seq, const TraceEvent& e);
std::string formatTrace(const Trace& trace);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline constexpr std::size_t kStepBudget = 10'000;

/// Runs every start event's token to completion. Throws Error with
/// MissingBehavior, StepBudgetExceeded, ConditionUnmatched, BadCondition,
/// NoActiveBranch, VotesMissing, ManagerPickMissing, ManagerPickUnknown or
/// Deadlock (tokens left waiting at a join that can never fire).
Trace runSimulation(const ProcessModel& model, const ScenarioPolicy& scenario,
                    std::size_t stepBudget = kStepBudget);

/// Supplies verdicts of reviewer and human lanes during reflection.
class VerdictSource {
public:
    virtual ~VerdictSource() = default;
    /// Throws Error(MissingBehavior) when the lane has no script.
    virtual Verdict verdictOf(const ElementId& laneId) = 0;
};

/// Answers from LaneScript verdict lists, consumed in order; the last
/// verdict repeats and an empty list accepts.
class ScriptedVerdicts : public VerdictSource {
public:
    explicit ScriptedVerdicts(const ScenarioPolicy& scenario) : scenario_(&scenario) {}
    Verdict verdictOf(const ElementId& laneId) override;

private:
    const ScenarioPolicy* scenario_;
    std::map<ElementId, std::size_t> cursor_;
};

struct ReflectionResult {
    CandidateOutput output;
    int roundsUsed = 0;
    std::vector<TraceEvent> events; // ReflectionRound per round
};

/// Produce, review, repeat until accepted or maxRounds is reached.
/// Requires a task with a reflection mode and a script with at least one
/// output; the returned output carries its effective trust.
ReflectionResult runReflection(const FlowNode& task, const ScriptedBehavior& script,
                               std::optional<TrustScore> laneTrust, VerdictSource* reviewers = nullptr);

struct RegionResult {
    CandidateOutput winner;
    std::vector<TraceEvent> events;
};

/// Executes one gateway-delimited region in isolation, starting from
/// `input` (the output that reached the diverging gateway, if any).
RegionResult executeRegion(const ProcessModel& model, const CollaborationRegion& region,
                           const ScenarioPolicy& scenario, const std::optional<CandidateOutput>& input = {});

struct MergeResult {
    CandidateOutput winner;
    std::string rationale;
};

/// Effective confidence used by tie-breaks.
TrustScore effectiveConfidence(const CandidateOutput& c) noexcept;

MergeResult applyMergeStrategy(MergeStrategy strategy, const std::vector<CandidateOutput>& candidates,
                               const std::optional<std::map<ElementId, std::string>>& votes = {},
                               const std::optional<std::string>& managerPick = {});

} // namespace hagent
