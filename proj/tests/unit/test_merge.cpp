#include "doctest.h"

#include <functional>

#include "support.hpp"

#include "hagent/error.hpp"
#include "hagent/simulate.hpp"

using namespace hagent;
using namespace hagent::test;

namespace {

CandidateOutput candidate(std::string label, int confidence, long long latency = 0, int completeness = 0)
{
    CandidateOutput c;
    c.label = std::move(label);
    c.payload = c.label + "-payload";
    c.confidence = TrustScore::make(confidence);
    c.producerLaneId = "Lane_" + c.label;
    c.producerTaskId = "Task_" + c.label;
    c.latencyMs = latency;
    c.completeness = completeness;
    return c;
}

// Confidences 70/85/60, latencies 120/80/200, completeness 40/90/95.
std::vector<CandidateOutput> family()
{
    return {candidate("A", 70, 120, 40), candidate("B", 85, 80, 90), candidate("C", 60, 200, 95)};
}

ErrorCode codeOf(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::OutOfRange;
}

} // namespace

TEST_SUITE("merge") {

TEST_CASE("each strategy picks its winner from the reference family")
{
    auto c = family();
    std::map<ElementId, std::string> votes{{"v1", "A"}, {"v2", "A"}, {"v3", "A"}, {"v4", "C"}, {"v5", "B"}};

    CHECK(applyMergeStrategy(MergeStrategy::VotingMajority, c, votes).winner.label == "A");
    CHECK(applyMergeStrategy(MergeStrategy::VotingAbsolute, c, votes).winner.label == "A");
    // B and C both have one vote; B is more confident.
    CHECK(applyMergeStrategy(MergeStrategy::VotingMinority, c, votes).winner.label == "B");
    CHECK(applyMergeStrategy(MergeStrategy::RoleLeaderDriven, c, {}, "C").winner.label == "C");
    CHECK(applyMergeStrategy(MergeStrategy::CompetitionFastest, c).winner.label == "B");
    CHECK(applyMergeStrategy(MergeStrategy::CompetitionMostComplete, c).winner.label == "C");

    auto composed = applyMergeStrategy(MergeStrategy::RoleComposed, c).winner;
    CHECK(composed.label == "composed");
    CHECK(composed.payload == "A-payloadB-payloadC-payload");
    CHECK(composed.confidence == TrustScore::make(60));
    CHECK(composed.latencyMs == 200);
    CHECK(composed.completeness == 95);
    CHECK(composed.producerLaneId == "Lane_A+Lane_B+Lane_C");
}

TEST_CASE("absolute majority falls back to the tie-break when nobody has more than half")
{
    auto c = family();
    std::map<ElementId, std::string> votes{{"v1", "A"}, {"v2", "A"}, {"v3", "C"}, {"v4", "C"}, {"v5", "B"}};
    CHECK(applyMergeStrategy(MergeStrategy::VotingMajority, c, votes).winner.label == "A");
    auto absolute = applyMergeStrategy(MergeStrategy::VotingAbsolute, c, votes);
    CHECK(absolute.winner.label == "B");
    CHECK(absolute.rationale.find("fell back") != std::string::npos);
}

TEST_CASE("ties break on effective confidence, then label")
{
    std::vector<CandidateOutput> c{candidate("y", 50, 10), candidate("x", 50, 10), candidate("z", 40, 10)};
    CHECK(applyMergeStrategy(MergeStrategy::CompetitionFastest, c).winner.label == "x");
    c[1].effectiveTrust = TrustScore::make(10);
    CHECK(applyMergeStrategy(MergeStrategy::CompetitionFastest, c).winner.label == "y");
}

TEST_CASE("votes for labels outside the candidate set are ignored")
{
    auto c = family();
    std::map<ElementId, std::string> votes{{"v1", "Z"}, {"v2", "Z"}, {"v3", "C"}};
    auto r = applyMergeStrategy(MergeStrategy::VotingMajority, c, votes);
    CHECK(r.winner.label == "C");
    CHECK(r.rationale.find("2 vote(s) for non-candidates ignored") != std::string::npos);
}

TEST_CASE("voting agrees with the counting oracle on small vote maps")
{
    auto c = family();
    std::vector<std::string> labels{"A", "B", "C"};
    for (auto strategy : {MergeStrategy::VotingMajority, MergeStrategy::VotingAbsolute, MergeStrategy::VotingMinority})
        for (int voters = 1; voters <= 3; ++voters) {
            int maps = 1;
            for (int i = 0; i < voters; ++i)
                maps *= 3;
            for (int code = 0; code < maps; ++code) {
                std::map<ElementId, std::string> votes;
                for (int v = 0, rest = code; v < voters; ++v, rest /= 3)
                    votes["voter" + std::to_string(v)] = labels[rest % 3];
                CHECK(applyMergeStrategy(strategy, c, votes).winner.label == votingOracle(strategy, c, votes));
            }
        }
}

TEST_CASE("merge errors")
{
    auto c = family();
    CHECK(codeOf([&] { applyMergeStrategy(MergeStrategy::CompetitionFastest, {}); }) == ErrorCode::EmptyCandidates);
    CHECK(codeOf([&] { applyMergeStrategy(MergeStrategy::VotingMajority, c); }) == ErrorCode::VotesMissing);
    CHECK(codeOf([&] { applyMergeStrategy(MergeStrategy::VotingMinority, c, std::map<ElementId, std::string>{}); }) ==
          ErrorCode::VotesMissing);
    CHECK(codeOf([&] { applyMergeStrategy(MergeStrategy::RoleLeaderDriven, c); }) == ErrorCode::ManagerPickMissing);
    CHECK(codeOf([&] { applyMergeStrategy(MergeStrategy::RoleLeaderDriven, c, {}, "Q"); }) ==
          ErrorCode::ManagerPickUnknown);
}

TEST_CASE("rationales name the rule that decided")
{
    auto c = family();
    CHECK(applyMergeStrategy(MergeStrategy::RoleLeaderDriven, c, {}, "B").rationale ==
          "role.leaderDriven: manager picked B");
    CHECK(applyMergeStrategy(MergeStrategy::CompetitionFastest, c).rationale == "competition.fastest: lowest latency 80ms");
}

}
