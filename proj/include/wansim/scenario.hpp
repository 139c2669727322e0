#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wansim/accounting.hpp"
#include "wansim/flowsim.hpp"
#include "wansim/scheduler.hpp"
#include "wansim/topology.hpp"
#include "wansim/trace.hpp"

namespace wansim {

struct SiteDecl {
    std::string name;
    double bandwidth_limit_bps = 0.0;  // 0 = default to the access-link capacity
    int slot_count = 8;
};

// Everything one simulation needs. Deterministic by construction: there is
// no randomness anywhere in the core, so identical scenarios produce
// identical outputs.
struct Scenario {
    Topology topology;
    std::vector<SiteDecl> sites;
    SchedulerConfig scheduler;
    SimConfig sim;
    AccountingConfig accounting;
    std::vector<TraceRecord> trace;
    std::map<LinkKey, double> degradation;  // per-link efficiency in (0, 1]
};

// Reads a scenario file, resolving its topology and trace references
// relative to the scenario's directory, and validates everything.
Scenario load_scenario(const std::filesystem::path& file);

// Structural and cross-reference checks; run_scenario performs exactly these
// before executing, so a scenario that validates also runs. Canonicalizes
// site and trace endpoint names in place.
void validate_scenario(Scenario& scenario);

std::map<std::string, Site> make_sites(const Scenario& scenario);

struct ScenarioOutputs {
    RunResult run;
    std::vector<PromiseReport> promise_reports;
    std::vector<SystematicReport> route_reports;
    std::vector<SystematicReport> segment_reports;
    std::vector<SystematicReport> site_reports;
};

ScenarioOutputs run_scenario(Scenario scenario);

}  // namespace wansim
