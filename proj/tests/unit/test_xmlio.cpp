#include "doctest.h"

#include "support.hpp"

#include "hagent/xmlio.hpp"

using namespace hagent;
using namespace hagent::test;

TEST_SUITE("xmlio") {

TEST_CASE("the running example parses into the expected model")
{
    auto parsed = parseModel(readFixture("bug-triage.bpmn"));
    REQUIRE(parsed.model);
    CHECK(parsed.diagnostics.empty());
    const auto& m = *parsed.model;
    CHECK(m.pools().size() == 1);
    CHECK(m.allLanes().size() == 5);

    const Lane* reviewer = m.findLane("Lane_AgentReviewer");
    REQUIRE(reviewer);
    REQUIRE(reviewer->agentic);
    CHECK(reviewer->agentic->role.isManager());
    CHECK(reviewer->agentic->trust == TrustScore::make(90));
    CHECK_FALSE(m.findLane("Lane_Maintainer")->isAgentic());

    const auto* check = m.findNode("Task_CheckValidity")->agenticTask();
    REQUIRE(check);
    REQUIRE(check->reflection);
    CHECK(std::holds_alternative<SelfReflection>(check->reflection->kind));
    CHECK(check->reflection->maxRounds == 3);

    const auto* split = m.findNode("Gateway_ProposePatches")->agenticGateway();
    REQUIRE(split);
    CHECK(split->collaboration() == CollaborationMode::RoleCooperation);
    const auto* join = m.findNode("Gateway_MergePatches")->agenticGateway();
    REQUIRE(join);
    CHECK(join->merge() == MergeStrategy::RoleLeaderDriven);

    CHECK(m.findNode("Task_ProposePatchA")->agenticTask()->trust == TrustScore::make(80));
    CHECK(m.findSequenceFlow("Flow_04")->condition == "label == \"valid\"");
}

TEST_CASE("the running example round-trips")
{
    auto first = parseModel(readFixture("bug-triage.bpmn"));
    REQUIRE(first.model);
    auto text = serializeModel(*first.model);
    auto second = parseModel(text);
    REQUIRE(second.model);
    CHECK(second.diagnostics.empty());
    CHECK(*second.model == *first.model);
    CHECK(serializeModel(*second.model) == text);
}

TEST_CASE("generated models round-trip byte for byte")
{
    for (int i = 0; i < 14; ++i) {
        CAPTURE(i);
        ProcessModel m = generateModel(i, 1000 + i);
        auto text = serializeModel(m);
        CHECK(serializeModel(m) == text);
        auto parsed = parseModel(text);
        REQUIRE_MESSAGE(parsed.model, formatDiagnostics(parsed.diagnostics));
        CHECK(*parsed.model == m);
        CHECK(serializeModel(*parsed.model) == text);
    }
}

TEST_CASE("foreign extension content survives untouched")
{
    std::string doc = R"(<?xml version="1.0" encoding="UTF-8"?>
<bpmn:definitions xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL" xmlns:acme="urn:acme" id="D">
  <bpmn:process id="P">
    <bpmn:task id="T" acme:tag="x">
      <bpmn:extensionElements>
        <acme:config><acme:item n="1"/></acme:config>
      </bpmn:extensionElements>
    </bpmn:task>
  </bpmn:process>
</bpmn:definitions>)";
    auto parsed = parseModel(doc);
    REQUIRE(parsed.model);
    CHECK(parsed.diagnostics.empty());
    const auto* task = parsed.model->findNode("T");
    REQUIRE(task);
    REQUIRE(task->ext.foreignElements.size() == 1);
    CHECK(task->ext.foreignElements[0] == "<acme:config><acme:item n=\"1\"/></acme:config>");
    REQUIRE(task->ext.attributes.size() == 1);
    CHECK(task->ext.attributes[0].first == "acme:tag");

    auto again = parseModel(serializeModel(*parsed.model));
    REQUIRE(again.model);
    CHECK(*again.model == *parsed.model);
}

TEST_CASE("unsupported standard elements are kept and reported")
{
    std::string doc = R"(<bpmn:definitions xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL" id="D">
  <bpmn:process id="P">
    <bpmn:startEvent id="S"/>
    <bpmn:intermediateThrowEvent id="Throw"/>
  </bpmn:process>
</bpmn:definitions>)";
    auto parsed = parseModel(doc);
    REQUIRE(parsed.model);
    REQUIRE(parsed.diagnostics.size() == 1);
    CHECK(parsed.diagnostics[0].code == "W-UNSUPPORTED");
    CHECK(parsed.diagnostics[0].severity == Severity::Warning);
    auto text = serializeModel(*parsed.model);
    CHECK(text.find("<bpmn:intermediateThrowEvent id=\"Throw\"/>") != std::string::npos);
}

TEST_CASE("malformed documents yield diagnostics and no model")
{
    auto parsed = parseModel("<bpmn:definitions");
    CHECK_FALSE(parsed.model);
    REQUIRE(parsed.diagnostics.size() == 1);
    CHECK(parsed.diagnostics[0].code == "E-XML");

    parsed = parseModel("<other/>");
    CHECK_FALSE(parsed.model);
    CHECK(parsed.diagnostics.at(0).code == "E-STRUCT");
}

TEST_CASE("extension values are checked while parsing")
{
    auto doc = readFixture("bug-triage.bpmn");
    auto edit = [&](const std::string& from, const std::string& to) {
        auto copy = doc;
        auto at = copy.find(from);
        REQUIRE(at != std::string::npos);
        return copy.replace(at, from.size(), to);
    };
    auto codes = [](const ParseResult& r) {
        std::vector<std::string> out;
        for (const auto& d : r.diagnostics)
            out.push_back(d.code);
        return out;
    };

    auto r = parseModel(edit("trustScore=\"90\"", "trustScore=\"190\""));
    CHECK_FALSE(r.model);
    CHECK(codes(r) == std::vector<std::string>{"E-TRUST-RANGE"});

    r = parseModel(edit("strategy=\"role.leaderDriven\"", "strategy=\"voting.plurality\""));
    CHECK_FALSE(r.model);
    CHECK(codes(r) == std::vector<std::string>{"E-HAGENT"});

    r = parseModel(edit("mode=\"self\"", "mode=\"mirror\""));
    CHECK_FALSE(r.model);
    CHECK(codes(r) == std::vector<std::string>{"E-HAGENT"});
}

}
