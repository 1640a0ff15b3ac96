#include "doctest.h"

#include "support.hpp"

#include "hagent/error.hpp"
#include "hagent/simulate.hpp"

using namespace hagent;
using namespace hagent::test;

TEST_SUITE("scenario") {

TEST_CASE("the shipped scenario parses")
{
    auto s = parseScenario(readFixture("bug-triage.scenario.json"));
    CHECK(s.seed == 0);
    const auto& check = s.perTask.at("Task_CheckValidity");
    REQUIRE(check.outputs.size() == 2);
    CHECK(check.outputs[0].label == "unsure");
    CHECK(check.outputs[0].confidence == TrustScore::make(55));
    CHECK(check.reflectionVerdicts == std::vector<Verdict>{Verdict::Revise, Verdict::Accept});
    CHECK(s.perTask.at("Task_ProposePatchB").outputs[0].latencyMs == 200);
    CHECK(s.perLane.at("Lane_AgentReviewer").picks.at("Gateway_MergePatches") == "patch-B");
}

TEST_CASE("all keys")
{
    auto s = parseScenario(R"({
        "seed": 42,
        "tasks": {"T": {"outputs": [{"label": "x", "payload": "p", "confidence": 0, "latencyMs": 5, "completeness": 100}],
                        "verdicts": [], "vote": "x", "latencyMs": 7, "completeness": 3, "latencyJitterMs": 9}},
        "lanes": {"L": {"verdicts": ["accept"], "picks": {"G": "x"}, "votes": {"G": "y"}}}
    })");
    CHECK(s.seed == 42);
    const auto& t = s.perTask.at("T");
    CHECK(t.vote == "x");
    CHECK(t.latencyMs == 7);
    CHECK(t.completeness == 3);
    CHECK(t.latencyJitterMs == 9);
    CHECK(t.outputs[0].completeness == 100);
    CHECK(s.perLane.at("L").votes.at("G") == "y");
}

TEST_CASE("bad scenarios are rejected")
{
    for (const char* bad : {
             "not json",
             "[]",
             R"({"unknown": 1})",
             R"({"seed": -1})",
             R"({"seed": "1"})",
             R"({"tasks": {"T": {"outputs": [{"payload": "no label"}]}}})",
             R"({"tasks": {"T": {"outputs": [{"label": ""}]}}})",
             R"({"tasks": {"T": {"outputs": [{"label": "x", "confidence": 101}]}}})",
             R"({"tasks": {"T": {"outputs": [{"label": "x", "latencyMs": -5}]}}})",
             R"({"tasks": {"T": {"verdicts": ["maybe"]}}})",
             R"({"tasks": {"T": {"outputs": {}}}})",
             R"({"tasks": {"T": {"colour": "red"}}})",
             R"({"lanes": {"L": {"picks": {"G": 3}}}})",
         }) {
        CAPTURE(bad);
        try {
            parseScenario(bad);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BadScenario);
        }
    }
}

}
