// hagent: validate, simulate and render human-agentic BPMN models.
//
// Exit codes: 0 success, 1 domain error (invalid model, failed
// simulation, unreadable input), 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hagent/error.hpp"
#include "hagent/render.hpp"
#include "hagent/simulate.hpp"
#include "hagent/validate.hpp"
#include "hagent/xmlio.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Failure {
    std::string message;
};

std::string readFile(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure{"cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeOutput(const std::string& path, const std::string& data)
{
    if (path.empty() || path == "-") {
        std::cout << data;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << data))
        throw Failure{"cannot write " + path};
}

/// Parses and validates; prints diagnostics to `diag`. Returns the model
/// only when there are no errors.
std::optional<hagent::ProcessModel> load(const std::string& path, std::ostream& diag, bool& warned)
{
    auto result = hagent::checkDocument(readFile(path));
    diag << hagent::formatDiagnostics(result.diagnostics);
    warned = !result.diagnostics.empty();
    if (hagent::hasErrors(result.diagnostics))
        return std::nullopt;
    return std::move(result.model);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Validate, simulate and render BPMN models with human-agentic extensions", "hagent"};
    app.require_subcommand(1);

    std::string input, output, scenarioPath, hintsPath;
    bool strict = false;
    std::optional<std::uint64_t> seed;

    auto* validate = app.add_subcommand("validate", "Report diagnostics; exit 1 if any error is found");
    validate->add_option("file", input, "BPMN document")->required();
    validate->add_flag("--strict", strict, "Treat warnings as errors");

    auto* simulate = app.add_subcommand("simulate", "Run the model under a scripted scenario and print the trace");
    simulate->add_option("file", input, "BPMN document")->required();
    simulate->add_option("--scenario", scenarioPath, "Scenario JSON file")->required();
    simulate->add_option("--seed", seed, "Seed overriding the scenario's seed");
    simulate->add_option("--trace", output, "Trace output file (default: stdout)");

    auto* render = app.add_subcommand("render", "Render the model as SVG");
    render->add_option("file", input, "BPMN document")->required();
    render->add_option("-o,--output", output, "SVG output file (default: stdout)");
    render->add_option("--hints", hintsPath, "Layout hints JSON file");

    auto* exportXsd = app.add_subcommand("export-xsd", "Write the extension XML Schema");
    exportXsd->add_option("-o,--output", output, "Schema output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (validate->parsed()) {
            bool warned = false;
            auto model = load(input, std::cout, warned);
            return model && !(strict && warned) ? kOk : kFailed;
        }
        if (simulate->parsed()) {
            bool warned = false;
            auto model = load(input, std::cerr, warned);
            if (!model)
                return kFailed;
            auto scenario = hagent::parseScenario(readFile(scenarioPath));
            if (seed)
                scenario.seed = *seed;
            auto trace = hagent::runSimulation(*model, scenario);
            std::cerr << hagent::formatDiagnostics(trace.warnings);
            writeOutput(output, hagent::formatTrace(trace));
            return kOk;
        }
        if (render->parsed()) {
            bool warned = false;
            auto model = load(input, std::cerr, warned);
            if (!model)
                return kFailed;
            std::optional<hagent::LayoutHints> hints;
            if (!hintsPath.empty())
                hints = hagent::parseLayoutHints(readFile(hintsPath));
            writeOutput(output, hagent::renderSVG(*model, hints));
            return kOk;
        }
        if (exportXsd->parsed()) {
            writeOutput(output, hagent::exportExtensionSchema());
            return kOk;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return kFailed;
    } catch (const hagent::Error& e) {
        std::cerr << "error: " << hagent::errorCodeName(e.code()) << ": " << e.what() << "\n";
        return kFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
