#include "doctest.h"

#include <set>

#include "support.hpp"

#include "hagent/validate.hpp"
#include "hagent/xmlio.hpp"

using namespace hagent;
using namespace hagent::test;

TEST_SUITE("validate") {

TEST_CASE("the catalog is sorted and every code has a trigger fixture")
{
    const auto& catalog = ruleCatalog();
    REQUIRE(catalog.size() == 16);
    std::vector<std::string> codes;
    for (const auto& rule : catalog) {
        codes.push_back(std::string(rule.code));
        CHECK((rule.code[0] == 'E') == (rule.severity == Severity::Error));
        CHECK((rule.check != nullptr) == (rule.stage == RuleStage::Model));
        CHECK(findRule(rule.code) == &rule);
    }
    CHECK(std::is_sorted(codes.begin(), codes.end()));
    CHECK(codes == ruleFixtureCodes());
    CHECK(findRule("E-NOPE") == nullptr);
}

TEST_CASE("each rule fixture triggers exactly its own diagnostic")
{
    for (const auto& code : ruleFixtureCodes()) {
        CAPTURE(code);
        auto doc = readFixture("rules/" + code + ".bpmn");
        auto diagnostics = ruleFixtureDiagnostics(code, doc);
        REQUIRE_MESSAGE(diagnostics.size() == 1, formatDiagnostics(diagnostics));
        CHECK(diagnostics[0].code == code);
        CHECK(diagnostics[0].severity == findRule(code)->severity);
    }
}

TEST_CASE("each rule fixture is cleared by its one-edit fix")
{
    for (const auto& code : ruleFixtureCodes()) {
        CAPTURE(code);
        auto doc = readFixture("rules/" + code + ".bpmn");
        auto fixed = applyFix(doc, readFixture("rules/" + code + ".fix.json"));
        auto diagnostics = ruleFixtureDiagnostics(code, fixed);
        CHECK_MESSAGE(diagnostics.empty(), formatDiagnostics(diagnostics));
    }
}

TEST_CASE("the running example is clean and the broken variant lacks a manager")
{
    auto clean = checkDocument(readFixture("bug-triage.bpmn"));
    REQUIRE(clean.model);
    CHECK(clean.diagnostics.empty());

    auto broken = checkDocument(readFixture("broken-no-manager.bpmn"));
    REQUIRE(broken.model);
    REQUIRE(broken.diagnostics.size() == 1);
    CHECK(broken.diagnostics[0].code == "E-MGR");
    CHECK(broken.diagnostics[0].elementId == "Gateway_MergePatches");
}

TEST_CASE("diagnostics are ordered by code then element")
{
    std::vector<Diagnostic> ds{makeWarning("W-NO-TRUST", "b", ""), makeError("E-REF", "z", ""),
                               makeError("E-REF", std::nullopt, ""), makeError("E-REF", "a", "first"),
                               makeError("E-REF", "a", "second")};
    sortDiagnostics(ds);
    CHECK(ds[0].elementId == std::nullopt);
    CHECK(ds[1].message == "first");
    CHECK(ds[2].message == "second");
    CHECK(ds[3].elementId == "z");
    CHECK(ds[4].code == "W-NO-TRUST");
    CHECK(formatDiagnostic(ds[0]) == "E-REF -: ");
}

TEST_CASE("validation is a pure function of the model")
{
    for (int i = 0; i < 7; ++i) {
        auto m = generateModel(i, 77 + i);
        auto a = validateModel(m);
        auto b = validateModel(m);
        CHECK(a == b);
        for (const auto& d : a)
            CHECK(findRule(d.code) != nullptr);
    }
}

}
