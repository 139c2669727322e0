#pragma once

#include <map>
#include <string>
#include <vector>

#include "wansim/accounting.hpp"
#include "wansim/scheduler.hpp"
#include "wansim/topology.hpp"
#include "wansim/trace.hpp"

namespace wansim {

enum class FlowClass { provisioned, best_effort };

const char* to_string(FlowClass klass);

// A live transfer in the fluid model: a volume drained at a piecewise-
// constant rate. Load generators carry an unbounded volume.
struct Flow {
    std::string id;
    FlowClass klass = FlowClass::best_effort;
    std::string src;
    std::string dst;
    Path path;
    double volume_bytes = kUnbounded;
    double remaining_bytes = kUnbounded;
    double promised_rate_bps = 0.0;       // provisioned flows only
    double demand_cap_bps = kUnbounded;
    double current_rate_bps = 0.0;
    std::string promise_id;               // provisioned flows only
    std::string request_id;
    double started_at = 0.0;
    double moved_bytes = 0.0;             // integral of the achieved rate / 8
};

struct SimConfig {
    double measurement_interval_s = 1.0;
    // Ceiling for a best-effort flow while any active provision shares a link
    // with it; kUnbounded disables the cap.
    double best_effort_cap_under_provision_bps = kUnbounded;
    double best_effort_floor_bps = 0.0;
    bool work_conserving = false;  // provisions may claim a best-effort share on top
    double horizon_s = 86400.0;
};

struct ThroughputSample {
    double at = 0.0;
    std::string flow_id;
    FlowClass klass = FlowClass::best_effort;
    double rate_bps = 0.0;
};

struct CompletionRecord {
    std::string flow_id;
    FlowClass klass = FlowClass::best_effort;
    std::string src;
    std::string dst;
    double volume_bytes = 0.0;
    double started_at = 0.0;
    double completed_at = 0.0;
    std::string request_id;
};

// Instantaneous rate allocation. Provisioned flows receive exactly their
// promised rate (scaled by any per-link efficiency factors); best-effort
// flows split each link's residual capacity max-min fairly via progressive
// filling, each bounded by its demand cap and by the under-provision cap,
// and guaranteed the configured floor whenever feasible (on a link where the
// floors alone do not fit, its flows scale back proportionally instead).
// Throws InfeasibleProvisions when provisioned rates alone exceed a link
// capacity, which indicates a scheduler bug.
std::map<std::string, double> compute_rates(
    const Topology& topo, const std::vector<Flow>& flows, const SimConfig& cfg,
    const std::map<LinkKey, double>& link_efficiency = {});

// remaining * 8 / rate; kUnbounded when the flow is starved or endless.
double predict_completion(const Flow& flow);

struct RunResult {
    std::vector<ThroughputSample> timeline;
    std::vector<CompletionRecord> completions;
    std::vector<PromiseLedgerEntry> ledger;
    std::vector<PromiseAdjustment> adjustments;
};

// Deterministic discrete-event loop: plays the trace through the scheduler,
// evolves flows between events at constant rates, reviews promises on
// arrivals, completions and periodic ticks, and records the throughput
// timeline, completions and the promise ledger. Simultaneous events process
// in a fixed kind order (completions and expiries first, measurement last).
RunResult run(const Topology& topo, Scheduler& scheduler,
              const std::vector<TraceRecord>& trace, const SimConfig& cfg,
              const std::map<LinkKey, double>& link_efficiency = {});

}  // namespace wansim
