#include <string>

#include "hagent/xml.hpp"
#include "hagent/xmlio.hpp"

namespace hagent {

namespace {

using Attrs = xml::Writer::Attributes;

void enumeration(xml::Writer& w, const std::string& name, const std::string& doc,
                 const std::vector<std::string_view>& literals)
{
    w.open("xsd:simpleType", {{"name", name}});
    w.open("xsd:annotation");
    w.textElement("xsd:documentation", doc);
    w.close("xsd:annotation");
    w.open("xsd:restriction", {{"base", "xsd:string"}});
    for (auto literal : literals)
        w.empty("xsd:enumeration", {{"value", std::string(literal)}});
    w.close("xsd:restriction");
    w.close("xsd:simpleType");
}

struct AttributeDecl {
    std::string name;
    std::string type;
    bool required;
};

void complexType(xml::Writer& w, const std::string& name, const std::vector<AttributeDecl>& attributes)
{
    w.open("xsd:complexType", {{"name", name}});
    for (const auto& a : attributes)
        w.empty("xsd:attribute", {{"name", a.name}, {"type", a.type}, {"use", a.required ? "required" : "optional"}});
    w.close("xsd:complexType");
}

/// A global element with the profile stereotype it realises and the BPMN
/// types it may extend.
void element(xml::Writer& w, const std::string& name, const std::string& type, const std::string& stereotypes,
             const std::string& extends, const std::string& doc)
{
    w.open("xsd:element", {{"name", name}, {"type", type}});
    w.open("xsd:annotation");
    w.textElement("xsd:appinfo", stereotypes, {{"source", std::string(kHagentNamespace) + "#stereotype"}});
    w.textElement("xsd:appinfo", extends, {{"source", std::string(kHagentNamespace) + "#extends"}});
    w.textElement("xsd:documentation", doc);
    w.close("xsd:annotation");
    w.close("xsd:element");
}

std::string buildSchema()
{
    xml::Writer w;
    w.declaration();
    w.open("xsd:schema", {{"xmlns:xsd", std::string(kXsdNamespace)},
                          {"xmlns:hagent", std::string(kHagentNamespace)},
                          {"targetNamespace", std::string(kHagentNamespace)},
                          {"elementFormDefault", "qualified"},
                          {"attributeFormDefault", "unqualified"},
                          {"version", "1.0"}});
    w.open("xsd:annotation");
    w.textElement("xsd:documentation",
                  "Human-agentic workflow extension for BPMN 2.0. Every element below is placed inside the "
                  "bpmn:extensionElements of the BPMN element it extends.");
    w.close("xsd:annotation");

    w.open("xsd:simpleType", {{"name", "tTrustScore"}});
    w.open("xsd:annotation");
    w.textElement("xsd:documentation", "Trustworthiness as a percentage.");
    w.close("xsd:annotation");
    w.open("xsd:restriction", {{"base", "xsd:int"}});
    w.empty("xsd:minInclusive", {{"value", "0"}});
    w.empty("xsd:maxInclusive", {{"value", "100"}});
    w.close("xsd:restriction");
    w.close("xsd:simpleType");

    enumeration(w, "tStandardRole", "Predefined agent roles.", {"manager", "worker"});

    w.open("xsd:simpleType", {{"name", "tCustomRole"}});
    w.open("xsd:annotation");
    w.textElement("xsd:documentation", "Any further role; treated like a worker when looking for a manager.");
    w.close("xsd:annotation");
    w.open("xsd:restriction", {{"base", "xsd:string"}});
    w.empty("xsd:minLength", {{"value", "1"}});
    w.close("xsd:restriction");
    w.close("xsd:simpleType");

    w.open("xsd:simpleType", {{"name", "tAgentRole"}});
    w.empty("xsd:union", {{"memberTypes", "hagent:tStandardRole hagent:tCustomRole"}});
    w.close("xsd:simpleType");

    enumeration(w, "tReflectionMode", "SelfReflection, CrossReflection and HumanReflection.",
                {"self", "cross", "human"});

    std::vector<std::string_view> modes;
    for (auto m : kAllCollaborationModes)
        modes.push_back(collaborationToken(m));
    enumeration(w, "tCollaborationMode", "Competition and the voting, role and debate cooperation modes.", modes);

    std::vector<std::string_view> strategies;
    for (auto s : kAllMergeStrategies)
        strategies.push_back(mergeToken(s));
    enumeration(w, "tMergeStrategy",
                "VotingStrategy (majority, absolute, minority), RoleStrategy (leaderDriven, composed) and "
                "CompetitionStrategy (fastest, mostComplete).",
                strategies);

    w.open("xsd:simpleType", {{"name", "tLaneRefList"}});
    w.open("xsd:annotation");
    w.textElement("xsd:documentation", "Comma-separated lane identifiers.");
    w.close("xsd:annotation");
    w.open("xsd:restriction", {{"base", "xsd:string"}});
    w.empty("xsd:pattern", {{"value", "[^,\\s]+(,[^,\\s]+)*"}});
    w.close("xsd:restriction");
    w.close("xsd:simpleType");

    complexType(w, "tAgentProfile",
                {{"role", "hagent:tAgentRole", true}, {"trustScore", "hagent:tTrustScore", false}});
    complexType(w, "tReflection", {{"mode", "hagent:tReflectionMode", true},
                                   {"maxRounds", "xsd:positiveInteger", false},
                                   {"reviewers", "hagent:tLaneRefList", false},
                                   {"human", "xsd:NCName", false}});
    complexType(w, "tUncertainty", {{"trustScore", "hagent:tTrustScore", true}});
    complexType(w, "tCollaboration", {{"mode", "hagent:tCollaborationMode", true}});
    complexType(w, "tMerge", {{"strategy", "hagent:tMergeStrategy", true}});

    element(w, "agentProfile", "hagent:tAgentProfile", "AgenticLane Profile", "bpmn:tLane",
            "Role and trust score of the agent represented by a lane.");
    element(w, "reflection", "hagent:tReflection", "AgenticTask ReflectionMode", "bpmn:tTask",
            "Reflection strategy of an agentic task. 'reviewers' applies to cross reflection, 'human' to human "
            "reflection; maxRounds bounds the refinement loop (3 when absent).");
    element(w, "uncertainty", "hagent:tUncertainty", "Uncertainty",
            "bpmn:tTask bpmn:tInclusiveGateway bpmn:tParallelGateway bpmn:tMessageFlow",
            "Trust score of a task output, an agentic gateway or an agentic message flow.");
    element(w, "collaboration", "hagent:tCollaboration", "AgenticOR AgenticAND AgenticMessageFlow CollaborationMode",
            "bpmn:tInclusiveGateway bpmn:tParallelGateway bpmn:tMessageFlow",
            "Collaboration mode set by a diverging agentic gateway or an outgoing agentic message flow.");
    element(w, "merge", "hagent:tMerge", "AgenticOR AgenticAND AgenticMessageFlow MergingStrategy",
            "bpmn:tInclusiveGateway bpmn:tParallelGateway bpmn:tMessageFlow",
            "Merging strategy of a merging agentic gateway or an incoming agentic message flow.");

    w.close("xsd:schema");
    return w.take();
}

} // namespace

std::string exportExtensionSchema()
{
    static const std::string schema = buildSchema();
    return schema;
}

} // namespace hagent
