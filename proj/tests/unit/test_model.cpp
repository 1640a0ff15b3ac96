#include "doctest.h"

#include <random>

#include "support.hpp"

#include "hagent/error.hpp"
#include "hagent/xmlio.hpp"

using namespace hagent;
using namespace hagent::test;

namespace {

ProcessModel fixtureModel(std::string_view name = "bug-triage.bpmn")
{
    auto parsed = parseModel(readFixture(name));
    REQUIRE(parsed.model);
    return *parsed.model;
}

FlowNode makeNode(ElementId id, decltype(FlowNode::kind) kind, ElementId lane = "L")
{
    FlowNode n;
    n.id = std::move(id);
    n.laneId = std::move(lane);
    n.kind = std::move(kind);
    return n;
}

Pool onePool(std::vector<FlowNode> nodes, std::vector<SequenceFlow> flows)
{
    Pool p;
    p.id = "Pool";
    p.processId = "Process";
    Lane l;
    l.id = "L";
    p.lanes = {l};
    p.nodes = std::move(nodes);
    p.sequenceFlows = std::move(flows);
    return p;
}

SequenceFlow seq(ElementId id, ElementId from, ElementId to)
{
    SequenceFlow f;
    f.id = std::move(id);
    f.sourceRef = std::move(from);
    f.targetRef = std::move(to);
    return f;
}

std::vector<std::string> codesOf(const std::vector<Diagnostic>& ds)
{
    std::vector<std::string> out;
    for (const auto& d : ds)
        out.push_back(d.code);
    return out;
}

Gateway collab(CollaborationMode m = CollaborationMode::Competition)
{
    return Gateway{GatewayKind::Parallel, AgenticCoordination{CollaborationSpec{m}, std::nullopt}};
}

Gateway merge(MergeStrategy s = MergeStrategy::CompetitionFastest)
{
    return Gateway{GatewayKind::Parallel, AgenticCoordination{MergeSpec{s}, std::nullopt}};
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("index lookups on the running example")
{
    auto m = fixtureModel();
    CHECK(m.kindOf("Lane_User") == ElementKind::Lane);
    CHECK(m.kindOf("Flow_01") == ElementKind::SequenceFlow);
    CHECK(m.kindOf("Participant_Project") == ElementKind::Pool);
    CHECK_FALSE(m.kindOf("Nope"));
    CHECK(m.laneOf("Task_ResolveBug")->id == "Lane_Maintainer");
    CHECK(m.poolOf("Task_ResolveBug")->id == "Participant_Project");
    CHECK(m.outgoing("Gateway_Valid").size() == 2);
    CHECK(m.incoming("Gateway_MergePatches").size() == 2);
    CHECK(m.findLane("Lane_AgentReviewer")->nodes.size() == 5);
}

TEST_CASE("construction canonicalises order")
{
    auto pool = onePool({makeNode("B", Task{}), makeNode("A", Task{})}, {seq("F2", "A", "B")});
    ProcessModel m("D", {pool}, {});
    CHECK(m.pools()[0].nodes[0].id == "A");
    CHECK(m.pools()[0].lanes[0].nodes == std::vector<ElementId>{"A", "B"});
}

TEST_CASE("construction enforces structural invariants")
{
    auto build = [](std::vector<FlowNode> nodes, std::vector<SequenceFlow> flows) {
        return ProcessModel::tryBuild("D", {onePool(std::move(nodes), std::move(flows))}, {});
    };

    auto r = build({makeNode("A", Task{}), makeNode("A", Task{})}, {});
    CHECK_FALSE(r.model);
    CHECK(codesOf(r.diagnostics) == std::vector<std::string>{"E-DUP-ID"});

    r = build({makeNode("A", Task{})}, {seq("F", "A", "Missing")});
    CHECK_FALSE(r.model);
    CHECK(codesOf(r.diagnostics) == std::vector<std::string>{"E-REF"});

    r = build({makeNode("A", Task{}, "NoLane")}, {});
    CHECK_FALSE(r.model);
    CHECK(codesOf(r.diagnostics) == std::vector<std::string>{"E-STRUCT"});

    r = build({makeNode("S", StartEvent{}), makeNode("A", Task{})}, {seq("F", "A", "S")});
    CHECK(codesOf(r.diagnostics) == std::vector<std::string>{"E-STRUCT"});

    Gateway xorAgentic{GatewayKind::Exclusive, AgenticCoordination{CollaborationSpec{CollaborationMode::Competition}, {}}};
    r = build({makeNode("X", xorAgentic)}, {});
    CHECK(codesOf(r.diagnostics) == std::vector<std::string>{"E-XOR-AGENTIC"});

    try {
        ProcessModel("D", {onePool({makeNode("X", xorAgentic)}, {})}, {});
        FAIL("constructed an agentic exclusive gateway");
    } catch (const ModelError& e) {
        CHECK(e.code() == ErrorCode::InvalidModel);
        CHECK(e.diagnostics().size() == 1);
    }
}

TEST_CASE("findMergeFor on the running example")
{
    auto m = fixtureModel();
    auto region = findMergeFor(m, "Gateway_ProposePatches");
    CHECK(region.mergingGatewayId == "Gateway_MergePatches");
    REQUIRE(region.branches.size() == 2);
    CHECK(region.branches[0] ==
          std::vector<ElementId>{"Gateway_ProposePatches", "Task_ProposePatchA", "Gateway_MergePatches"});
    CHECK(region.participantLaneIds == std::set<ElementId>{"Lane_AgentCoder", "Lane_AgentCoder2"});

    auto roles = regionRoles(m, region);
    CHECK(roles.at("Lane_AgentReviewer").role == RegionRole::Manager);
    CHECK(roles.at("Lane_AgentCoder").role == RegionRole::Worker);

    try {
        findMergeFor(m, "Gateway_Valid");
        FAIL("exclusive gateway accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidModel);
    }
}

TEST_CASE("findMergeFor reports missing and malformed regions")
{
    auto expectCode = [](const ProcessModel& m, ErrorCode code) {
        try {
            findMergeFor(m, "G");
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.code() == code);
        }
    };

    // No merging gateway at all.
    ProcessModel none("D", {onePool({makeNode("G", collab()), makeNode("A", Task{}), makeNode("B", Task{}),
                                     makeNode("E", EndEvent{})},
                                    {seq("F1", "G", "A"), seq("F2", "G", "B"), seq("F3", "A", "E"), seq("F4", "B", "E")})},
                      {});
    expectCode(none, ErrorCode::NoMatchingMerge);

    // The merge is entered from outside the region.
    ProcessModel leak("D", {onePool({makeNode("S", StartEvent{}), makeNode("G", collab()), makeNode("A", Task{}),
                                     makeNode("M", merge()), makeNode("E", EndEvent{})},
                                    {seq("F0", "S", "G"), seq("F1", "G", "A"), seq("F2", "G", "M"), seq("F3", "A", "M"),
                                     seq("F4", "M", "E"), seq("F5", "S", "M")})},
                      {});
    expectCode(leak, ErrorCode::MalformedRegion);

    // A branch node splits.
    ProcessModel split("D", {onePool({makeNode("G", collab()), makeNode("A", Task{}), makeNode("M", merge()),
                                      makeNode("E", EndEvent{})},
                                     {seq("F1", "G", "A"), seq("F2", "A", "M"), seq("F3", "A", "M"), seq("F4", "M", "E")})},
                       {});
    expectCode(split, ErrorCode::MalformedRegion);
}

TEST_CASE("findMergeFor agrees with a simple-path oracle on random graphs")
{
    std::mt19937_64 rng(2024);
    int checked = 0, found = 0, malformed = 0, missing = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        int n = std::uniform_int_distribution<int>(3, 9)(rng);
        std::vector<FlowNode> nodes;
        nodes.push_back(makeNode("N0", collab()));
        for (int i = 1; i < n; ++i) {
            int kind = std::uniform_int_distribution<int>(0, 9)(rng);
            std::string id = "N" + std::to_string(i);
            if (kind < 4)
                nodes.push_back(makeNode(id, merge()));
            else if (kind < 6)
                nodes.push_back(makeNode(id, Gateway{GatewayKind::Parallel, std::nullopt}));
            else
                nodes.push_back(makeNode(id, Task{}));
        }
        std::vector<SequenceFlow> flows;
        auto add = [&](int from, int to) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "F%03zu", flows.size());
            flows.push_back(seq(buf, "N" + std::to_string(from), "N" + std::to_string(to)));
        };
        std::bernoulli_distribution forward(0.35), back(0.06);
        add(0, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == 0 && j == 1)
                    continue;
                if ((j > i && forward(rng)) || (j < i && j > 0 && back(rng)))
                    add(i, j);
            }

        ProcessModel m("D", {onePool(nodes, flows)}, {});
        auto expected = regionOracle(m, "N0");
        ++checked;
        try {
            auto region = findMergeFor(m, "N0");
            REQUIRE(expected.merge);
            REQUIRE_FALSE(expected.malformed);
            CHECK(region.mergingGatewayId == *expected.merge);
            CHECK(region.branches == expected.branches);
            ++found;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoMatchingMerge) {
                CHECK_FALSE(expected.merge);
                ++missing;
            } else {
                REQUIRE(e.code() == ErrorCode::MalformedRegion);
                CHECK(expected.merge);
                CHECK(expected.malformed);
                ++malformed;
            }
        }
    }
    CHECK(checked == 1500);
    // The generator must exercise all three outcomes.
    CHECK(found > 20);
    CHECK(malformed > 20);
    CHECK(missing > 20);
}

TEST_CASE("post-dominators of a diamond")
{
    ProcessModel m("D", {onePool({makeNode("S", StartEvent{}), makeNode("G", collab()), makeNode("A", Task{}),
                                  makeNode("B", Task{}), makeNode("M", merge()), makeNode("E", EndEvent{})},
                                 {seq("F0", "S", "G"), seq("F1", "G", "A"), seq("F2", "G", "B"), seq("F3", "A", "M"),
                                  seq("F4", "B", "M"), seq("F5", "M", "E")})},
                   {});
    auto pdom = postDominators(m, m.pools()[0]);
    CHECK(pdom.at("G") == std::set<ElementId>{"G", "M", "E"});
    CHECK(pdom.at("A") == std::set<ElementId>{"A", "M", "E"});
    CHECK(pdom.at("E") == std::set<ElementId>{"E"});
}

}
