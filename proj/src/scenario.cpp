#include <initializer_list>
#include <limits>

#include "json.hpp"

#include "hagent/error.hpp"
#include "hagent/simulate.hpp"

namespace hagent {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
    throw Error(ErrorCode::BadScenario, where + ": " + what);
}

void onlyKeys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object())
        bad(where, "expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (auto a : allowed)
            known = known || item.key() == a;
        if (!known)
            bad(where, "unknown key '" + item.key() + "'");
    }
}

std::string text(const json& j, const std::string& where)
{
    if (!j.is_string())
        bad(where, "expected a string");
    return j.get<std::string>();
}

long long integer(const json& j, const std::string& where, long long lo, long long hi)
{
    if (!j.is_number_integer())
        bad(where, "expected an integer");
    if (j.is_number_unsigned() && j.get<unsigned long long>() > static_cast<unsigned long long>(hi))
        bad(where, "out of range");
    long long v = j.get<long long>();
    if (v < lo || v > hi)
        bad(where, std::to_string(v) + " is outside " + std::to_string(lo) + ".." + std::to_string(hi));
    return v;
}

constexpr long long kMaxLatency = std::numeric_limits<int>::max();

std::vector<Verdict> verdicts(const json& j, const std::string& where)
{
    if (!j.is_array())
        bad(where, "expected an array");
    std::vector<Verdict> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto v = text(j[i], where + "[" + std::to_string(i) + "]");
        if (v == "revise")
            out.push_back(Verdict::Revise);
        else if (v == "accept")
            out.push_back(Verdict::Accept);
        else
            bad(where, "verdict must be 'revise' or 'accept', got '" + v + "'");
    }
    return out;
}

ScriptedOutput output(const json& j, const std::string& where)
{
    onlyKeys(j, where, {"label", "payload", "confidence", "latencyMs", "completeness"});
    ScriptedOutput o;
    if (!j.contains("label"))
        bad(where, "missing 'label'");
    o.label = text(j["label"], where + ".label");
    if (o.label.empty())
        bad(where, "label must not be empty");
    if (j.contains("payload"))
        o.payload = text(j["payload"], where + ".payload");
    if (j.contains("confidence"))
        o.confidence = TrustScore::make(static_cast<int>(integer(j["confidence"], where + ".confidence", 0, 100)));
    if (j.contains("latencyMs"))
        o.latencyMs = integer(j["latencyMs"], where + ".latencyMs", 0, kMaxLatency);
    if (j.contains("completeness"))
        o.completeness = static_cast<int>(integer(j["completeness"], where + ".completeness", 0, 100));
    return o;
}

ScriptedBehavior behavior(const json& j, const std::string& where)
{
    onlyKeys(j, where, {"outputs", "verdicts", "vote", "latencyMs", "completeness", "latencyJitterMs"});
    ScriptedBehavior b;
    if (j.contains("outputs")) {
        const auto& list = j["outputs"];
        if (!list.is_array())
            bad(where + ".outputs", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            b.outputs.push_back(output(list[i], where + ".outputs[" + std::to_string(i) + "]"));
    }
    if (j.contains("verdicts"))
        b.reflectionVerdicts = verdicts(j["verdicts"], where + ".verdicts");
    if (j.contains("vote"))
        b.vote = text(j["vote"], where + ".vote");
    if (j.contains("latencyMs"))
        b.latencyMs = integer(j["latencyMs"], where + ".latencyMs", 0, kMaxLatency);
    if (j.contains("completeness"))
        b.completeness = static_cast<int>(integer(j["completeness"], where + ".completeness", 0, 100));
    if (j.contains("latencyJitterMs"))
        b.latencyJitterMs = integer(j["latencyJitterMs"], where + ".latencyJitterMs", 0, kMaxLatency);
    return b;
}

std::map<ElementId, std::string> labelMap(const json& j, const std::string& where)
{
    if (!j.is_object())
        bad(where, "expected an object");
    std::map<ElementId, std::string> out;
    for (const auto& item : j.items())
        out[item.key()] = text(item.value(), where + "." + item.key());
    return out;
}

LaneScript laneScript(const json& j, const std::string& where)
{
    onlyKeys(j, where, {"verdicts", "picks", "votes"});
    LaneScript s;
    if (j.contains("verdicts"))
        s.verdicts = verdicts(j["verdicts"], where + ".verdicts");
    if (j.contains("picks"))
        s.picks = labelMap(j["picks"], where + ".picks");
    if (j.contains("votes"))
        s.votes = labelMap(j["votes"], where + ".votes");
    return s;
}

} // namespace

ScenarioPolicy parseScenario(std::string_view source)
{
    json root;
    try {
        root = json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::BadScenario, std::string("scenario is not valid JSON: ") + e.what());
    }
    onlyKeys(root, "scenario", {"seed", "tasks", "lanes"});

    ScenarioPolicy policy;
    if (root.contains("seed")) {
        const auto& s = root["seed"];
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
            bad("seed", "expected a non-negative integer");
        policy.seed = s.get<std::uint64_t>();
    }
    if (root.contains("tasks")) {
        if (!root["tasks"].is_object())
            bad("tasks", "expected an object");
        for (const auto& item : root["tasks"].items())
            policy.perTask[item.key()] = behavior(item.value(), "tasks." + item.key());
    }
    if (root.contains("lanes")) {
        if (!root["lanes"].is_object())
            bad("lanes", "expected an object");
        for (const auto& item : root["lanes"].items())
            policy.perLane[item.key()] = laneScript(item.value(), "lanes." + item.key());
    }
    return policy;
}

} // namespace hagent
