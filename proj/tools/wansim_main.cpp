#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wansim/emit.hpp"
#include "wansim/errors.hpp"
#include "wansim/scenario.hpp"

namespace {

using nlohmann::json;

// Machine-readable diagnostics go to stderr; stdout carries results only.
void report_error(const std::string& kind, const std::string& message) {
    json diagnostic{{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << diagnostic.dump() << "\n";
}

int run_command(const std::string& scenario_file, const std::string& out_dir) {
    wansim::Scenario scenario = wansim::load_scenario(scenario_file);
    wansim::AccountingConfig accounting = scenario.accounting;
    wansim::ScenarioOutputs outputs = wansim::run_scenario(std::move(scenario));
    wansim::write_outputs(outputs, accounting, out_dir);
    std::cout << "wrote " << out_dir << "/timeline.csv, completions.json, ledger.json, reports.json\n";
    return 0;
}

int route_command(const std::string& topology_file, const std::string& src,
                  const std::string& dst) {
    std::ifstream in(topology_file);
    if (!in) {
        wansim::fail_validation("MissingFile", "cannot open '" + topology_file + "'");
    }
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        wansim::fail_validation("MalformedDocument", "'" + topology_file + "' is not valid JSON");
    }
    wansim::Topology topo = wansim::load_topology(doc);
    wansim::Path path = wansim::shortest_path(topo, src, dst);
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        std::cout << (i ? " " : "") << path.hops[i];
    }
    std::cout << "\n";
    return 0;
}

int validate_command(const std::string& scenario_file) {
    wansim::load_scenario(scenario_file);
    std::cout << "ok\n";
    return 0;
}

int report_command(const std::string& ledger_file, const std::string& group,
                   double threshold, int min_samples) {
    std::ifstream in(ledger_file);
    if (!in) {
        wansim::fail_validation("MissingFile", "cannot open '" + ledger_file + "'");
    }
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        wansim::fail_validation("MalformedDocument", "'" + ledger_file + "' is not valid JSON");
    }
    auto [entries, adjustments] = wansim::parse_ledger(doc);

    std::vector<wansim::PromiseReport> reports;
    for (const auto& entry : entries) {
        if (wansim::reconcilable(entry) && entry.promised_bytes > 0.0) {
            reports.push_back(wansim::reconcile(entry, threshold));
        }
    }
    wansim::Grouping grouping;
    if (group == "route") {
        grouping = wansim::Grouping::route;
    } else if (group == "segment") {
        grouping = wansim::Grouping::segment;
    } else if (group == "site") {
        grouping = wansim::Grouping::site;
    } else {
        wansim::fail_validation("MalformedArguments", "--group must be route, segment or site");
    }
    std::cout << wansim::emit_systematic(
                     wansim::aggregate(reports, entries, grouping, min_samples, threshold))
                     .dump(2)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Promise-based WAN bandwidth scheduler and fluid-flow transfer simulator"};
    app.require_subcommand(1);

    std::string scenario_file;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run a scenario and write its output files");
    run->add_option("scenario", scenario_file, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();

    std::string topology_file, src, dst;
    auto* route = app.add_subcommand("route", "Print the hop list between two nodes");
    route->add_option("topology", topology_file, "Topology JSON file")->required();
    route->add_option("src", src, "Source node or alias")->required();
    route->add_option("dst", dst, "Destination node or alias")->required();

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", validate_file, "Scenario JSON file")->required();

    std::string ledger_file;
    std::string group = "segment";
    double threshold = 0.05;
    int min_samples = 5;
    auto* report = app.add_subcommand("report", "Re-run reconciliation analytics on a ledger");
    report->add_option("ledger", ledger_file, "ledger.json from a previous run")->required();
    report->add_option("--group", group, "Grouping: route, segment or site");
    report->add_option("--threshold", threshold, "Deficit threshold");
    report->add_option("--min-samples", min_samples, "Minimum promises before flagging");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) {
            return app.exit(err);  // --help
        }
        report_error("MalformedArguments", err.what());
        return 1;
    }

    try {
        if (run->parsed()) {
            return run_command(scenario_file, out_dir);
        }
        if (route->parsed()) {
            return route_command(topology_file, src, dst);
        }
        if (validate->parsed()) {
            return validate_command(validate_file);
        }
        if (report->parsed()) {
            return report_command(ledger_file, group, threshold, min_samples);
        }
    } catch (const wansim::Error& err) {
        report_error(err.kind(), err.message());
        return err.category() == wansim::ErrorCategory::validation ? 1 : 2;
    } catch (const std::exception& err) {
        report_error("Internal", err.what());
        return 2;
    }
    return 0;
}
