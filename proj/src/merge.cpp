#include <algorithm>
#include <map>
#include <set>

#include "hagent/error.hpp"
#include "hagent/simulate.hpp"

namespace hagent {

namespace {

using Ptrs = std::vector<const CandidateOutput*>;

bool better(const CandidateOutput& a, const CandidateOutput& b)
{
    auto ea = effectiveConfidence(a), eb = effectiveConfidence(b);
    if (ea != eb)
        return ea > eb;
    return a.label < b.label;
}

const CandidateOutput& tieBreak(const Ptrs& pool)
{
    return **std::min_element(pool.begin(), pool.end(),
                              [](const CandidateOutput* a, const CandidateOutput* b) { return better(*a, *b); });
}

Ptrs allOf(const std::vector<CandidateOutput>& candidates)
{
    Ptrs out;
    for (const auto& c : candidates)
        out.push_back(&c);
    return out;
}

Ptrs withLabels(const std::vector<CandidateOutput>& candidates, const std::set<std::string>& labels)
{
    Ptrs out;
    for (const auto& c : candidates)
        if (labels.count(c.label))
            out.push_back(&c);
    return out;
}

std::string tieNote(const Ptrs& pool)
{
    if (pool.size() < 2)
        return {};
    return "; tie among " + std::to_string(pool.size()) + " candidates broken by effective confidence, then label";
}

MergeResult vote(MergeStrategy strategy, const std::vector<CandidateOutput>& candidates,
                 const std::optional<std::map<ElementId, std::string>>& votes)
{
    if (!votes || votes->empty())
        throw Error(ErrorCode::VotesMissing, std::string(mergeToken(strategy)) + " needs votes, none were cast");

    std::set<std::string> labels;
    for (const auto& c : candidates)
        labels.insert(c.label);

    std::map<std::string, int> tally;
    int cast = 0, ignored = 0;
    for (const auto& [voter, label] : *votes) {
        if (labels.count(label)) {
            ++tally[label];
            ++cast;
        } else {
            ++ignored;
        }
    }

    std::string counts;
    for (const auto& label : labels) {
        if (!counts.empty())
            counts += ", ";
        counts += label + "=" + std::to_string(tally.count(label) ? tally.at(label) : 0);
    }
    std::string rationale = std::string(mergeToken(strategy)) + ": votes " + counts;
    if (ignored)
        rationale += " (" + std::to_string(ignored) + " vote(s) for non-candidates ignored)";

    auto fallback = [&](const std::string& why) {
        Ptrs pool = allOf(candidates);
        const auto& w = tieBreak(pool);
        return MergeResult{w, rationale + "; " + why + "; fell back to tie-break over all candidates"};
    };

    std::set<std::string> chosen;
    switch (strategy) {
    case MergeStrategy::VotingMajority: {
        int best = 0;
        for (const auto& label : labels)
            best = std::max(best, tally[label]);
        for (const auto& label : labels)
            if (tally[label] == best)
                chosen.insert(label);
        break;
    }
    case MergeStrategy::VotingAbsolute: {
        for (const auto& [label, n] : tally)
            if (2 * n > cast)
                chosen.insert(label);
        if (chosen.empty())
            return fallback("no label reached an absolute majority (more than half of " + std::to_string(cast) +
                            " votes)");
        break;
    }
    case MergeStrategy::VotingMinority: {
        int least = 0;
        for (const auto& [label, n] : tally)
            if (n >= 1 && (least == 0 || n < least))
                least = n;
        if (least == 0)
            return fallback("no candidate received a vote");
        for (const auto& [label, n] : tally)
            if (n == least)
                chosen.insert(label);
        break;
    }
    default:
        break;
    }

    Ptrs pool = withLabels(candidates, chosen);
    const auto& w = tieBreak(pool);
    return {w, rationale + "; winner " + w.label + tieNote(pool)};
}

} // namespace

TrustScore effectiveConfidence(const CandidateOutput& c) noexcept
{
    if (c.effectiveTrust)
        return *c.effectiveTrust;
    return propagateTrust(std::nullopt, std::nullopt, c.confidence);
}

MergeResult applyMergeStrategy(MergeStrategy strategy, const std::vector<CandidateOutput>& candidates,
                               const std::optional<std::map<ElementId, std::string>>& votes,
                               const std::optional<std::string>& managerPick)
{
    if (candidates.empty())
        throw Error(ErrorCode::EmptyCandidates, "merge over an empty candidate set");

    const std::string name(mergeToken(strategy));
    switch (strategy) {
    case MergeStrategy::VotingMajority:
    case MergeStrategy::VotingAbsolute:
    case MergeStrategy::VotingMinority:
        return vote(strategy, candidates, votes);

    case MergeStrategy::RoleLeaderDriven: {
        if (!managerPick)
            throw Error(ErrorCode::ManagerPickMissing, name + " needs the manager's pick");
        Ptrs pool = withLabels(candidates, {*managerPick});
        if (pool.empty())
            throw Error(ErrorCode::ManagerPickUnknown, "manager picked '" + *managerPick + "', which is not a candidate");
        return {tieBreak(pool), name + ": manager picked " + *managerPick + tieNote(pool)};
    }

    case MergeStrategy::RoleComposed: {
        CandidateOutput out;
        out.label = "composed";
        std::string lanes, tasks;
        for (const auto& c : candidates) {
            out.payload += c.payload;
            if (c.confidence && (!out.confidence || *c.confidence < *out.confidence))
                out.confidence = c.confidence;
            auto eff = effectiveConfidence(c);
            if (!out.effectiveTrust || eff < *out.effectiveTrust)
                out.effectiveTrust = eff;
            out.latencyMs = std::max(out.latencyMs, c.latencyMs);
            out.completeness = std::max(out.completeness, c.completeness);
            lanes += (lanes.empty() ? "" : "+") + c.producerLaneId;
            tasks += (tasks.empty() ? "" : "+") + c.producerTaskId;
        }
        out.producerLaneId = lanes;
        out.producerTaskId = tasks;
        return {out, name + ": composed " + std::to_string(candidates.size()) + " candidates in branch order"};
    }

    case MergeStrategy::CompetitionFastest: {
        long long best = candidates.front().latencyMs;
        for (const auto& c : candidates)
            best = std::min(best, c.latencyMs);
        Ptrs pool;
        for (const auto& c : candidates)
            if (c.latencyMs == best)
                pool.push_back(&c);
        const auto& w = tieBreak(pool);
        return {w, name + ": lowest latency " + std::to_string(best) + "ms" + tieNote(pool)};
    }

    case MergeStrategy::CompetitionMostComplete: {
        int best = candidates.front().completeness;
        for (const auto& c : candidates)
            best = std::max(best, c.completeness);
        Ptrs pool;
        for (const auto& c : candidates)
            if (c.completeness == best)
                pool.push_back(&c);
        const auto& w = tieBreak(pool);
        return {w, name + ": highest completeness " + std::to_string(best) + tieNote(pool)};
    }
    }
    throw Error(ErrorCode::InvalidModel, "unknown merge strategy");
}

} // namespace hagent
