#include "hagent/xmlio.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "hagent/xml.hpp"

namespace hagent {

namespace {

using xml::Element;

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<long long> parseInteger(std::string_view text)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        return std::nullopt;
    return value;
}

std::vector<std::string> splitList(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = text.find(',', start);
        out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

/// Local name of the first tag in raw markup, used to order preserved children.
std::string_view rawLocalName(std::string_view markup)
{
    auto start = markup.find('<');
    if (start == std::string_view::npos)
        return {};
    auto end = markup.find_first_of(" \t\r\n/>", start + 1);
    auto qname = markup.substr(start + 1, end == std::string_view::npos ? std::string_view::npos : end - start - 1);
    auto colon = qname.find(':');
    return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

/// Owner kinds for extension content; each accepts a fixed set of hagent elements.
enum class Owner { Lane, Task, Gateway, MessageFlow, Other };

struct HagentContent {
    std::optional<AgentProfile> profile;
    std::optional<ReflectionMode> reflection;
    std::optional<TrustScore> uncertainty;
    std::optional<CollaborationMode> collaboration;
    std::optional<MergeStrategy> merge;
    bool any = false;
    bool failed = false;
};

class DocumentReader {
public:
    DocumentReader(std::string_view source, std::vector<Diagnostic>& diagnostics)
        : source_(source), diags_(diagnostics)
    {
    }

    ParseResult read(const xml::Document& doc)
    {
        ParseResult result;
        const Element& root = doc.root;
        if (!root.is(kBpmnNamespace, "definitions")) {
            error("E-STRUCT", std::nullopt, "root element is not a BPMN 2.0 'definitions' element");
            return result;
        }

        for (const auto& [prefix, uri] : doc.declarations) {
            bool standard = (prefix == "bpmn" && uri == kBpmnNamespace) ||
                            (prefix == "hagent" && uri == kHagentNamespace) ||
                            (prefix == "xsi" && uri == kXsiNamespace);
            bool clashes = prefix == "bpmn" || prefix == "hagent" || prefix == "xsi";
            if (!standard && !clashes)
                info_.namespaces.emplace_back(prefix, uri);
        }

        std::string modelId;
        for (const auto& a : root.attributes) {
            if (a.ns.empty() && a.local == "id")
                modelId = a.value;
            else if (!rejectHagentAttribute(a, std::nullopt))
                info_.attributes.emplace_back(a.qname, a.value);
        }

        const Element* collaboration = nullptr;
        std::vector<const Element*> processes;
        for (const auto& child : root.children) {
            if (child.is(kBpmnNamespace, "collaboration") && !collaboration) {
                collaboration = &child;
            } else if (child.is(kBpmnNamespace, "process")) {
                processes.push_back(&child);
            } else {
                if (child.ns == kBpmnNamespace)
                    unsupported(child, std::nullopt);
                info_.rootOpaque.push_back(raw(child));
            }
        }

        std::vector<MessageFlow> messageFlows;
        std::vector<Pool> pools;
        std::map<std::string, std::size_t> poolByProcess;
        if (collaboration)
            readCollaboration(*collaboration, pools, messageFlows);

        for (std::size_t i = 0; i < pools.size(); ++i)
            if (!pools[i].processId.empty())
                poolByProcess.emplace(pools[i].processId, i);

        std::set<std::size_t> filled;
        for (const Element* proc : processes) {
            const std::string* pid = proc->attr("id");
            std::string processId = pid ? *pid : std::string();
            auto it = poolByProcess.find(processId);
            if (it == poolByProcess.end() || filled.count(it->second)) {
                Pool pool;
                pool.id = "Participant_" + processId;
                pool.processId = processId;
                pools.push_back(std::move(pool));
                it = poolByProcess.insert_or_assign(processId, pools.size() - 1).first;
            }
            filled.insert(it->second);
            readProcess(*proc, pools[it->second]);
        }

        for (std::size_t i = 0; i < pools.size(); ++i) {
            auto& pool = pools[i];
            if (filled.count(i))
                continue;
            if (!pool.processId.empty()) {
                error("E-REF", pool.id, "participant '" + pool.id + "' references unknown process '" +
                                            pool.processId + "'");
                continue;
            }
            // Black-box participant: give it an explicit empty process.
            pool.processId = pool.id + "_process";
            pool.laneSetId = pool.id + "_laneSet";
            Lane lane;
            lane.id = pool.id + "_lane";
            lane.name = pool.name;
            pool.lanes.push_back(std::move(lane));
        }

        if (hasErrors(diags_))
            return result;

        auto built = ProcessModel::tryBuild(modelId, std::move(pools), std::move(messageFlows), std::move(info_));
        diags_.insert(diags_.end(), built.diagnostics.begin(), built.diagnostics.end());
        result.model = std::move(built.model);
        return result;
    }

private:
    std::string raw(const Element& el) const { return std::string(source_.substr(el.begin, el.end - el.begin)); }

    void error(std::string code, std::optional<std::string> id, std::string message)
    {
        diags_.push_back(makeError(std::move(code), std::move(id), std::move(message)));
    }

    void unsupported(const Element& el, const std::optional<std::string>& owner)
    {
        const std::string* id = el.attr("id");
        diags_.push_back(makeWarning("W-UNSUPPORTED", id ? std::optional(*id) : owner,
                                     "unsupported element '" + el.local + "' preserved as-is"));
    }

    /// Extension data written as a bare attribute on a BPMN element.
    bool rejectHagentAttribute(const xml::Attribute& a, const std::optional<std::string>& owner)
    {
        if (a.ns != kHagentNamespace)
            return false;
        error("E-HAGENT", owner, "extension attribute '" + a.qname + "' must be carried inside extensionElements");
        return true;
    }

    /// Splits attributes into the interpreted ones and preserved extras.
    std::map<std::string, std::string> attributes(const Element& el, std::initializer_list<std::string_view> known,
                                                  Extensions& ext, const std::optional<std::string>& owner)
    {
        std::map<std::string, std::string> out;
        for (const auto& a : el.attributes) {
            if (rejectHagentAttribute(a, owner))
                continue;
            bool isKnown = a.ns.empty() && std::find(known.begin(), known.end(), a.local) != known.end();
            if (isKnown)
                out[a.local] = a.value;
            else
                ext.attributes.emplace_back(a.qname, a.value);
        }
        return out;
    }

    void opaqueChild(const Element& child, Extensions& ext, const std::optional<std::string>& owner)
    {
        if (!(child.ns == kBpmnNamespace && child.local == "documentation"))
            unsupported(child, owner);
        ext.opaqueChildren.push_back(raw(child));
    }

    std::optional<TrustScore> trustAttribute(const std::string& value, const std::optional<std::string>& owner)
    {
        auto parsed = parseInteger(trim(value));
        if (!parsed) {
            error("E-HAGENT", owner, "trustScore '" + value + "' is not an integer");
            return std::nullopt;
        }
        if (!TrustScore::inRange(*parsed)) {
            error("E-TRUST-RANGE", owner, "trustScore " + value + " outside 0..100");
            return std::nullopt;
        }
        return TrustScore::make(static_cast<int>(*parsed));
    }

    /// Reads one hagent element, checking its attribute set.
    void readHagent(const Element& el, Owner owner, HagentContent& content, const std::optional<std::string>& ownerId)
    {
        static const std::map<std::string, std::set<std::string>, std::less<>> allowed = {
            {"agentProfile", {"role", "trustScore"}},
            {"reflection", {"mode", "maxRounds", "reviewers", "human"}},
            {"uncertainty", {"trustScore"}},
            {"collaboration", {"mode"}},
            {"merge", {"strategy"}},
        };
        auto fail = [&](const std::string& message) {
            error("E-HAGENT", ownerId, message);
            content.failed = true;
        };

        auto spec = allowed.find(el.local);
        bool permitted = spec != allowed.end();
        if (permitted) {
            switch (owner) {
            case Owner::Lane: permitted = el.local == "agentProfile"; break;
            case Owner::Task: permitted = el.local == "reflection" || el.local == "uncertainty"; break;
            case Owner::Gateway:
            case Owner::MessageFlow:
                permitted = el.local == "collaboration" || el.local == "merge" || el.local == "uncertainty";
                break;
            case Owner::Other: permitted = false; break;
            }
        }
        if (!permitted) {
            fail("extension element 'hagent:" + el.local + "' is not allowed here");
            return;
        }
        content.any = true;

        std::map<std::string, std::string> attrs;
        for (const auto& a : el.attributes) {
            if (!a.ns.empty() || !spec->second.count(a.local)) {
                fail("unknown attribute '" + a.qname + "' on 'hagent:" + el.local + "'");
                continue;
            }
            attrs[a.local] = a.value;
        }
        if (!el.children.empty() || !trim(el.text).empty())
            fail("'hagent:" + el.local + "' must be empty");

        auto required = [&](const char* name) -> const std::string* {
            auto it = attrs.find(name);
            if (it == attrs.end()) {
                fail("'hagent:" + el.local + "' requires attribute '" + name + "'");
                return nullptr;
            }
            return &it->second;
        };
        auto once = [&](bool alreadySet) {
            if (alreadySet)
                fail("duplicate 'hagent:" + el.local + "'");
            return !alreadySet;
        };

        if (el.local == "agentProfile") {
            if (!once(content.profile.has_value()))
                return;
            const std::string* role = required("role");
            if (!role)
                return;
            AgentProfile profile;
            if (*role == "manager")
                profile.role = AgentRole::manager();
            else if (*role == "worker")
                profile.role = AgentRole::worker();
            else if (trim(*role).empty())
                return fail("agent role must not be empty");
            else
                profile.role = AgentRole::custom(*role);
            if (auto it = attrs.find("trustScore"); it != attrs.end()) {
                profile.trust = trustAttribute(it->second, ownerId);
                if (!profile.trust)
                    content.failed = true;
            }
            content.profile = std::move(profile);
        } else if (el.local == "reflection") {
            if (!once(content.reflection.has_value()))
                return;
            const std::string* mode = required("mode");
            if (!mode)
                return;
            ReflectionMode refl;
            auto reviewers = attrs.find("reviewers");
            auto human = attrs.find("human");
            if (*mode == "self") {
                refl.kind = SelfReflection{};
                if (reviewers != attrs.end() || human != attrs.end())
                    return fail("self reflection takes neither 'reviewers' nor 'human'");
            } else if (*mode == "cross") {
                if (reviewers == attrs.end())
                    return fail("cross reflection requires 'reviewers'");
                if (human != attrs.end())
                    return fail("cross reflection does not take 'human'");
                CrossReflection cross;
                cross.reviewerLaneIds = splitList(reviewers->second);
                for (const auto& r : cross.reviewerLaneIds)
                    if (r.empty())
                        return fail("empty entry in 'reviewers'");
                refl.kind = std::move(cross);
            } else if (*mode == "human") {
                if (human == attrs.end() || trim(human->second).empty())
                    return fail("human reflection requires 'human'");
                if (reviewers != attrs.end())
                    return fail("human reflection does not take 'reviewers'");
                refl.kind = HumanReflection{trim(human->second)};
            } else {
                return fail("unknown reflection mode '" + *mode + "'");
            }
            if (auto it = attrs.find("maxRounds"); it != attrs.end()) {
                auto rounds = parseInteger(trim(it->second));
                if (!rounds || *rounds < 1 || *rounds > 1'000'000)
                    return fail("maxRounds '" + it->second + "' is not a positive integer");
                refl.maxRounds = static_cast<int>(*rounds);
            }
            content.reflection = std::move(refl);
        } else if (el.local == "uncertainty") {
            if (!once(content.uncertainty.has_value()))
                return;
            if (const std::string* value = required("trustScore")) {
                content.uncertainty = trustAttribute(*value, ownerId);
                if (!content.uncertainty)
                    content.failed = true;
            }
        } else if (el.local == "collaboration") {
            if (!once(content.collaboration.has_value()))
                return;
            if (const std::string* mode = required("mode")) {
                content.collaboration = parseCollaborationToken(*mode);
                if (!content.collaboration)
                    fail("unknown collaboration mode '" + *mode + "'");
            }
        } else if (el.local == "merge") {
            if (!once(content.merge.has_value()))
                return;
            if (const std::string* strategy = required("strategy")) {
                content.merge = parseMergeToken(*strategy);
                if (!content.merge)
                    fail("unknown merge strategy '" + *strategy + "'");
            }
        }
    }

    HagentContent extensionElements(const Element& el, Owner owner, Extensions& ext,
                                    const std::optional<std::string>& ownerId)
    {
        HagentContent content;
        for (const auto& child : el.children) {
            if (child.ns == kHagentNamespace)
                readHagent(child, owner, content, ownerId);
            else
                ext.foreignElements.push_back(raw(child));
        }
        return content;
    }

    std::optional<AgenticCoordination> coordination(const HagentContent& c, const std::optional<std::string>& ownerId)
    {
        if (!c.any || c.failed)
            return std::nullopt;
        if (c.collaboration && c.merge) {
            error("E-HAGENT", ownerId, "an element either opens (collaboration) or merges (merge) a collaboration, not both");
            return std::nullopt;
        }
        if (!c.collaboration && !c.merge) {
            error("E-HAGENT", ownerId, "agentic coordination requires 'hagent:collaboration' or 'hagent:merge'");
            return std::nullopt;
        }
        AgenticCoordination info;
        if (c.collaboration)
            info.spec = CollaborationSpec{*c.collaboration};
        else
            info.spec = MergeSpec{*c.merge};
        info.trust = c.uncertainty;
        return info;
    }

    void readCollaboration(const Element& collab, std::vector<Pool>& pools, std::vector<MessageFlow>& flows)
    {
        auto attrs = attributes(collab, {"id"}, info_.collaborationExt, std::nullopt);
        info_.collaborationId = attrs["id"];
        std::optional<std::string> collabId = info_.collaborationId;

        for (const auto& child : collab.children) {
            if (child.is(kBpmnNamespace, "participant")) {
                Pool pool;
                auto a = attributes(child, {"id", "name", "processRef"}, pool.participantExt, std::nullopt);
                pool.id = a["id"];
                pool.name = a["name"];
                pool.processId = a["processRef"];
                for (const auto& sub : child.children) {
                    if (sub.is(kBpmnNamespace, "participantMultiplicity"))
                        pool.multiInstance = true;
                    else if (sub.is(kBpmnNamespace, "extensionElements"))
                        extensionElements(sub, Owner::Other, pool.participantExt, pool.id);
                    else
                        opaqueChild(sub, pool.participantExt, pool.id);
                }
                pools.push_back(std::move(pool));
            } else if (child.is(kBpmnNamespace, "messageFlow")) {
                MessageFlow flow;
                auto a = attributes(child, {"id", "name", "sourceRef", "targetRef"}, flow.ext, std::nullopt);
                flow.id = a["id"];
                flow.name = a["name"];
                flow.sourceRef = a["sourceRef"];
                flow.targetRef = a["targetRef"];
                for (const auto& sub : child.children) {
                    if (sub.is(kBpmnNamespace, "extensionElements"))
                        flow.agentic = coordination(extensionElements(sub, Owner::MessageFlow, flow.ext, flow.id), flow.id);
                    else
                        opaqueChild(sub, flow.ext, flow.id);
                }
                flows.push_back(std::move(flow));
            } else if (child.is(kBpmnNamespace, "extensionElements")) {
                extensionElements(child, Owner::Other, info_.collaborationExt, collabId);
            } else {
                opaqueChild(child, info_.collaborationExt, collabId);
            }
        }
    }

    void readProcess(const Element& proc, Pool& pool)
    {
        auto attrs = attributes(proc, {"id", "name"}, pool.processExt, std::nullopt);
        pool.processId = attrs["id"];
        pool.processName = attrs["name"];
        std::optional<std::string> pid = pool.processId;

        std::map<std::string, std::string> laneOfNode;
        bool sawLaneSet = false;

        for (const auto& child : proc.children) {
            const std::string& name = child.local;
            if (child.ns != kBpmnNamespace) {
                opaqueChild(child, pool.processExt, pid);
            } else if (name == "laneSet" && !sawLaneSet) {
                sawLaneSet = true;
                readLaneSet(child, pool, laneOfNode);
            } else if (name == "startEvent" || name == "endEvent" || name == "task" || name == "subProcess" ||
                       name == "exclusiveGateway" || name == "inclusiveGateway" || name == "parallelGateway" ||
                       name == "complexGateway") {
                pool.nodes.push_back(readNode(child));
            } else if (name == "sequenceFlow") {
                pool.sequenceFlows.push_back(readSequenceFlow(child));
            } else if (name == "textAnnotation" || name == "association" || name == "group" || name == "dataObject") {
                pool.artifacts.push_back(readArtifact(child));
            } else if (name == "extensionElements") {
                extensionElements(child, Owner::Other, pool.processExt, pid);
            } else {
                opaqueChild(child, pool.processExt, pid);
            }
        }

        if (!sawLaneSet) {
            pool.laneSetId = pool.processId + "_laneSet";
            Lane lane;
            lane.id = pool.processId + "_lane";
            pool.lanes.push_back(std::move(lane));
            for (auto& node : pool.nodes)
                node.laneId = pool.lanes.front().id;
            return;
        }
        for (auto& node : pool.nodes)
            if (auto it = laneOfNode.find(node.id); it != laneOfNode.end())
                node.laneId = it->second;
        std::set<std::string> nodeIds;
        for (const auto& node : pool.nodes)
            nodeIds.insert(node.id);
        for (const auto& [nodeId, laneId] : laneOfNode)
            if (!nodeIds.count(nodeId))
                error("E-REF", laneId, "lane '" + laneId + "' references unknown flow node '" + nodeId + "'");
    }

    void readLaneSet(const Element& set, Pool& pool, std::map<std::string, std::string>& laneOfNode)
    {
        for (const auto& a : set.attributes)
            if (a.ns.empty() && a.local == "id")
                pool.laneSetId = a.value;
        for (const auto& child : set.children) {
            if (!child.is(kBpmnNamespace, "lane")) {
                opaqueChild(child, pool.processExt, pool.processId);
                continue;
            }
            Lane lane;
            auto a = attributes(child, {"id", "name"}, lane.ext, std::nullopt);
            lane.id = a["id"];
            lane.name = a["name"];
            for (const auto& sub : child.children) {
                if (sub.is(kBpmnNamespace, "flowNodeRef")) {
                    auto nodeId = trim(sub.text);
                    auto [it, inserted] = laneOfNode.emplace(nodeId, lane.id);
                    if (!inserted)
                        error("E-STRUCT", nodeId, "flow node '" + nodeId + "' is placed in more than one lane");
                } else if (sub.is(kBpmnNamespace, "extensionElements")) {
                    auto content = extensionElements(sub, Owner::Lane, lane.ext, lane.id);
                    if (!content.failed)
                        lane.agentic = content.profile;
                } else {
                    opaqueChild(sub, lane.ext, lane.id);
                }
            }
            pool.lanes.push_back(std::move(lane));
        }
    }

    FlowNode readNode(const Element& el)
    {
        FlowNode node;
        const std::string& kind = el.local;
        auto a = attributes(el, {"id", "name"}, node.ext, std::nullopt);
        node.id = a["id"];
        node.name = a["name"];

        Owner owner = Owner::Other;
        if (kind == "task")
            owner = Owner::Task;
        else if (kind.find("Gateway") != std::string::npos)
            owner = Owner::Gateway;

        HagentContent content;
        std::vector<std::string> body;
        for (const auto& child : el.children) {
            if (child.is(kBpmnNamespace, "incoming") || child.is(kBpmnNamespace, "outgoing"))
                continue; // derived from sequence flows
            if (child.is(kBpmnNamespace, "extensionElements"))
                content = extensionElements(child, owner, node.ext, node.id);
            else if (kind == "subProcess")
                body.push_back(raw(child));
            else
                opaqueChild(child, node.ext, node.id);
        }

        if (kind == "startEvent") {
            node.kind = StartEvent{};
        } else if (kind == "endEvent") {
            node.kind = EndEvent{};
        } else if (kind == "task") {
            Task task;
            if (content.any && !content.failed)
                task.agentic = AgenticTaskInfo{content.reflection, content.uncertainty};
            node.kind = std::move(task);
        } else if (kind == "subProcess") {
            SubProcess sub;
            for (std::size_t i = 0; i < body.size(); ++i) {
                if (i)
                    sub.body += '\n';
                sub.body += body[i];
            }
            node.kind = std::move(sub);
        } else {
            Gateway gw;
            if (kind == "exclusiveGateway") gw.kind = GatewayKind::Exclusive;
            else if (kind == "inclusiveGateway") gw.kind = GatewayKind::Inclusive;
            else if (kind == "parallelGateway") gw.kind = GatewayKind::Parallel;
            else gw.kind = GatewayKind::Complex;
            gw.agentic = coordination(content, node.id);
            node.kind = std::move(gw);
        }
        return node;
    }

    SequenceFlow readSequenceFlow(const Element& el)
    {
        SequenceFlow flow;
        auto a = attributes(el, {"id", "name", "sourceRef", "targetRef"}, flow.ext, std::nullopt);
        flow.id = a["id"];
        flow.name = a["name"];
        flow.sourceRef = a["sourceRef"];
        flow.targetRef = a["targetRef"];
        for (const auto& child : el.children) {
            if (child.is(kBpmnNamespace, "conditionExpression"))
                flow.condition = child.text;
            else if (child.is(kBpmnNamespace, "extensionElements"))
                extensionElements(child, Owner::Other, flow.ext, flow.id);
            else
                opaqueChild(child, flow.ext, flow.id);
        }
        return flow;
    }

    Artifact readArtifact(const Element& el)
    {
        Artifact art;
        const std::string& kind = el.local;
        std::map<std::string, std::string> a;
        if (kind == "association")
            a = attributes(el, {"id", "sourceRef", "targetRef"}, art.ext, std::nullopt);
        else if (kind == "group")
            a = attributes(el, {"id", "categoryValueRef"}, art.ext, std::nullopt);
        else if (kind == "dataObject")
            a = attributes(el, {"id", "name"}, art.ext, std::nullopt);
        else
            a = attributes(el, {"id"}, art.ext, std::nullopt);
        art.id = a["id"];
        art.name = a["name"];

        Annotation annotation;
        for (const auto& child : el.children) {
            if (kind == "textAnnotation" && child.is(kBpmnNamespace, "text"))
                annotation.text = child.text;
            else if (child.is(kBpmnNamespace, "extensionElements"))
                extensionElements(child, Owner::Other, art.ext, art.id);
            else
                opaqueChild(child, art.ext, art.id);
        }

        if (kind == "textAnnotation") {
            art.kind = std::move(annotation);
        } else if (kind == "association") {
            art.kind = Association{a["sourceRef"], a["targetRef"]};
        } else if (kind == "group") {
            Group group;
            if (auto it = a.find("categoryValueRef"); it != a.end())
                group.categoryValueRef = it->second;
            art.kind = std::move(group);
        } else {
            art.kind = DataObject{};
        }
        return art;
    }

    std::string_view source_;
    std::vector<Diagnostic>& diags_;
    DocumentInfo info_;
};

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

using Attrs = xml::Writer::Attributes;

class DocumentWriter {
public:
    std::string write(const ProcessModel& model)
    {
        const auto& doc = model.document();
        out_.declaration();

        Attrs rootAttrs{{"xmlns:bpmn", std::string(kBpmnNamespace)}, {"xmlns:xsi", std::string(kXsiNamespace)}};
        if (hasAgenticContent(model))
            rootAttrs.emplace_back("xmlns:hagent", std::string(kHagentNamespace));
        for (const auto& [prefix, uri] : doc.namespaces)
            rootAttrs.emplace_back(prefix.empty() ? "xmlns" : "xmlns:" + prefix, uri);
        if (!model.id().empty())
            rootAttrs.emplace_back("id", model.id());
        rootAttrs.insert(rootAttrs.end(), doc.attributes.begin(), doc.attributes.end());
        out_.open("bpmn:definitions", rootAttrs);

        writeCollaboration(model);
        for (const auto& pool : model.pools())
            writeProcess(model, pool);
        for (const auto& blob : doc.rootOpaque)
            out_.raw(blob);

        out_.close("bpmn:definitions");
        return out_.take();
    }

private:
    static bool hasAgenticContent(const ProcessModel& model)
    {
        for (const auto* lane : model.allLanes())
            if (lane->agentic)
                return true;
        for (const auto* node : model.allNodes())
            if (node->agenticTask() || node->agenticGateway())
                return true;
        for (const auto& flow : model.messageFlows())
            if (flow.agentic)
                return true;
        return false;
    }

    static Attrs with(Attrs base, const Extensions& ext)
    {
        base.insert(base.end(), ext.attributes.begin(), ext.attributes.end());
        return base;
    }

    static void named(Attrs& attrs, const std::string& name)
    {
        if (!name.empty())
            attrs.emplace_back("name", name);
    }

    static Attrs trustAttr(const std::optional<TrustScore>& trust)
    {
        if (!trust)
            return {};
        return {{"trustScore", std::to_string(trust->value())}};
    }

    /// Opens `name`, or emits it empty when `hasBody` is false.
    void element(std::string_view name, const Attrs& attrs, bool hasBody, const std::function<void()>& body)
    {
        if (!hasBody) {
            out_.empty(name, attrs);
            return;
        }
        out_.open(name, attrs);
        body();
        out_.close(name);
    }

    void documentationFirst(const Extensions& ext)
    {
        for (const auto& blob : ext.opaqueChildren)
            if (rawLocalName(blob) == "documentation")
                out_.raw(blob);
    }

    void remainingOpaque(const Extensions& ext)
    {
        for (const auto& blob : ext.opaqueChildren)
            if (rawLocalName(blob) != "documentation")
                out_.raw(blob);
    }

    /// Writes `<bpmn:extensionElements>` when there is anything to put in it.
    void extensionElements(const Extensions& ext, const std::function<void()>& hagent, bool hasHagent)
    {
        if (!hasHagent && ext.foreignElements.empty())
            return;
        out_.open("bpmn:extensionElements");
        if (hasHagent)
            hagent();
        for (const auto& blob : ext.foreignElements)
            out_.raw(blob);
        out_.close("bpmn:extensionElements");
    }

    void coordination(const AgenticCoordination& info)
    {
        if (auto mode = info.collaboration())
            out_.empty("hagent:collaboration", {{"mode", std::string(collaborationToken(*mode))}});
        if (auto strategy = info.merge())
            out_.empty("hagent:merge", {{"strategy", std::string(mergeToken(*strategy))}});
        if (info.trust)
            out_.empty("hagent:uncertainty", trustAttr(info.trust));
    }

    void standardBody(const Extensions& ext, const std::function<void()>& hagent, bool hasHagent)
    {
        documentationFirst(ext);
        extensionElements(ext, hagent, hasHagent);
        remainingOpaque(ext);
    }

    static bool hasBody(const Extensions& ext, bool hasHagent)
    {
        return hasHagent || !ext.foreignElements.empty() || !ext.opaqueChildren.empty();
    }

    void writeCollaboration(const ProcessModel& model)
    {
        const auto& doc = model.document();
        Attrs attrs;
        if (!doc.collaborationId.empty())
            attrs.emplace_back("id", doc.collaborationId);
        bool body = !model.pools().empty() || !model.messageFlows().empty() || hasBody(doc.collaborationExt, false);
        element("bpmn:collaboration", with(attrs, doc.collaborationExt), body, [&] {
            standardBody(doc.collaborationExt, [] {}, false);
            for (const auto& pool : model.pools()) {
                Attrs a{{"id", pool.id}};
                named(a, pool.name);
                a.emplace_back("processRef", pool.processId);
                element("bpmn:participant", with(a, pool.participantExt),
                        pool.multiInstance || hasBody(pool.participantExt, false), [&] {
                            standardBody(pool.participantExt, [] {}, false);
                            if (pool.multiInstance)
                                out_.empty("bpmn:participantMultiplicity", {{"minimum", "2"}});
                        });
            }
            for (const auto& flow : model.messageFlows()) {
                Attrs a{{"id", flow.id}};
                named(a, flow.name);
                a.emplace_back("sourceRef", flow.sourceRef);
                a.emplace_back("targetRef", flow.targetRef);
                bool agentic = flow.agentic.has_value();
                element("bpmn:messageFlow", with(a, flow.ext), hasBody(flow.ext, agentic), [&] {
                    standardBody(flow.ext, [&] { coordination(*flow.agentic); }, agentic);
                });
            }
        });
    }

    void writeProcess(const ProcessModel& model, const Pool& pool)
    {
        Attrs attrs{{"id", pool.processId}};
        named(attrs, pool.processName);
        out_.open("bpmn:process", with(attrs, pool.processExt));
        documentationFirst(pool.processExt);
        extensionElements(pool.processExt, [] {}, false);

        Attrs laneSetAttrs;
        if (!pool.laneSetId.empty())
            laneSetAttrs.emplace_back("id", pool.laneSetId);
        element("bpmn:laneSet", laneSetAttrs, !pool.lanes.empty(), [&] {
            for (const auto& lane : pool.lanes) {
                Attrs a{{"id", lane.id}};
                named(a, lane.name);
                bool agentic = lane.agentic.has_value();
                element("bpmn:lane", with(a, lane.ext), hasBody(lane.ext, agentic) || !lane.nodes.empty(), [&] {
                    standardBody(lane.ext, [&] {
                        Attrs p{{"role", lane.agentic->role.text()}};
                        auto t = trustAttr(lane.agentic->trust);
                        p.insert(p.end(), t.begin(), t.end());
                        out_.empty("hagent:agentProfile", p);
                    }, agentic);
                    for (const auto& nodeId : lane.nodes)
                        out_.textElement("bpmn:flowNodeRef", nodeId);
                });
            }
        });

        for (const auto& node : pool.nodes)
            writeNode(model, node);

        for (const auto& flow : pool.sequenceFlows) {
            Attrs a{{"id", flow.id}};
            named(a, flow.name);
            a.emplace_back("sourceRef", flow.sourceRef);
            a.emplace_back("targetRef", flow.targetRef);
            element("bpmn:sequenceFlow", with(a, flow.ext), hasBody(flow.ext, false) || flow.condition.has_value(), [&] {
                standardBody(flow.ext, [] {}, false);
                if (flow.condition)
                    out_.textElement("bpmn:conditionExpression", *flow.condition,
                                     {{"xsi:type", "bpmn:tFormalExpression"}});
            });
        }

        for (const auto& art : pool.artifacts)
            writeArtifact(art);

        remainingOpaque(pool.processExt);
        out_.close("bpmn:process");
    }

    void writeNode(const ProcessModel& model, const FlowNode& node)
    {
        std::string tag = "bpmn:";
        if (node.isStart()) tag += "startEvent";
        else if (node.isEnd()) tag += "endEvent";
        else if (node.task()) tag += "task";
        else if (node.subProcess()) tag += "subProcess";
        else tag += gatewayElementName(node.gateway()->kind);

        Attrs a{{"id", node.id}};
        named(a, node.name);

        const AgenticTaskInfo* taskInfo = node.agenticTask();
        const AgenticGatewayInfo* gatewayInfo = node.agenticGateway();
        bool agentic = taskInfo || gatewayInfo;
        auto in = model.incoming(node.id);
        auto out = model.outgoing(node.id);
        bool body = hasBody(node.ext, agentic) || !in.empty() || !out.empty() ||
                    (node.subProcess() && !node.subProcess()->body.empty());

        element(tag, with(a, node.ext), body, [&] {
            standardBody(node.ext, [&] {
                if (taskInfo) {
                    if (taskInfo->reflection)
                        reflection(*taskInfo->reflection);
                    if (taskInfo->trust)
                        out_.empty("hagent:uncertainty", trustAttr(taskInfo->trust));
                }
                if (gatewayInfo)
                    coordination(*gatewayInfo);
            }, agentic);
            for (const auto* f : in)
                out_.textElement("bpmn:incoming", f->id);
            for (const auto* f : out)
                out_.textElement("bpmn:outgoing", f->id);
            if (const auto* sub = node.subProcess(); sub && !sub->body.empty())
                out_.raw(sub->body);
        });
    }

    void reflection(const ReflectionMode& refl)
    {
        Attrs a;
        if (std::holds_alternative<SelfReflection>(refl.kind)) {
            a.emplace_back("mode", "self");
        } else if (const auto* cross = std::get_if<CrossReflection>(&refl.kind)) {
            a.emplace_back("mode", "cross");
            std::string list;
            for (const auto& r : cross->reviewerLaneIds)
                list += (list.empty() ? "" : ",") + r;
            a.emplace_back("reviewers", list);
        } else {
            a.emplace_back("mode", "human");
            a.emplace_back("human", std::get<HumanReflection>(refl.kind).humanLaneId);
        }
        a.emplace_back("maxRounds", std::to_string(refl.maxRounds));
        out_.empty("hagent:reflection", a);
    }

    void writeArtifact(const Artifact& art)
    {
        Attrs a{{"id", art.id}};
        std::string tag;
        bool extra = false;
        if (const auto* annotation = std::get_if<Annotation>(&art.kind)) {
            tag = "bpmn:textAnnotation";
            extra = true;
            element(tag, with(a, art.ext), true, [&] {
                standardBody(art.ext, [] {}, false);
                out_.textElement("bpmn:text", annotation->text);
            });
            return;
        }
        if (const auto* assoc = std::get_if<Association>(&art.kind)) {
            tag = "bpmn:association";
            a.emplace_back("sourceRef", assoc->sourceRef);
            a.emplace_back("targetRef", assoc->targetRef);
        } else if (const auto* group = std::get_if<Group>(&art.kind)) {
            tag = "bpmn:group";
            if (group->categoryValueRef)
                a.emplace_back("categoryValueRef", *group->categoryValueRef);
        } else {
            tag = "bpmn:dataObject";
            named(a, art.name);
        }
        element(tag, with(a, art.ext), extra || hasBody(art.ext, false), [&] { standardBody(art.ext, [] {}, false); });
    }

    xml::Writer out_;
};

} // namespace

ParseResult parseModel(std::string_view document)
{
    ParseResult result;
    auto parsed = xml::parse(document);
    if (!parsed.document) {
        const auto& err = *parsed.error;
        result.diagnostics.push_back(makeError("E-XML", std::nullopt,
                                               "line " + std::to_string(err.line) + ", column " +
                                                   std::to_string(err.column) + ": " + err.message));
        return result;
    }
    DocumentReader reader(document, result.diagnostics);
    auto read = reader.read(*parsed.document);
    result.model = std::move(read.model);
    return result;
}

std::string serializeModel(const ProcessModel& model)
{
    return DocumentWriter().write(model);
}

} // namespace hagent
