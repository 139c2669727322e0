#pragma once

#include <string>
#include <vector>

#include "wansim/scheduler.hpp"

namespace wansim {

struct ThroughputSample;  // flowsim.hpp

// Closed-out record of one promise: what was committed (integrated promised
// rate over the active interval) versus what the network actually carried.
struct PromiseLedgerEntry {
    std::string promise_id;
    std::string request_id;
    Path path;
    double rate_bps = 0.0;        // final promised rate
    double start = 0.0;           // activation time
    double end = 0.0;             // planned end at last adjustment
    double closed_at = 0.0;       // completion / cancellation / expiry time
    double promised_bytes = 0.0;  // integral of the promised rate / 8
    double achieved_bytes = 0.0;  // integral of the delivered rate / 8
    PromiseState state = PromiseState::pending;
    bool activated = false;
};

struct PromiseReport {
    std::string promise_id;
    bool fulfilled = false;
    double utilization = 0.0;  // achieved / promised; may exceed 1
    double deficit = 0.0;      // max(0, 1 - achieved / promised)
};

enum class Grouping { route, segment, site };

const char* to_string(Grouping grouping);

struct SystematicReport {
    Grouping grouping = Grouping::route;
    std::string key;
    int promise_count = 0;
    double mean_deficit = 0.0;
    bool flagged = false;
};

struct AccountingConfig {
    double deficit_threshold = 0.05;
    int min_samples = 5;
};

// Piecewise-constant integral of one flow's rate samples over [t0, t1],
// converted to bytes. Samples must be time-ordered (UnorderedSamples); each
// sample's rate holds until the next sample, the last until t1.
double integrate_samples(const std::vector<ThroughputSample>& samples, double t0, double t1);

// Errors: ZeroPromised when the entry has no promised bytes to compare with.
PromiseReport reconcile(const PromiseLedgerEntry& entry, double deficit_threshold);

// One report per distinct key: the full hop list (route), every link on the
// path (segment), or either endpoint (site). A key is flagged when it has at
// least min_samples promises and their mean deficit exceeds the threshold.
// Output is sorted by key, so the result is permutation-invariant.
std::vector<SystematicReport> aggregate(const std::vector<PromiseReport>& reports,
                                        const std::vector<PromiseLedgerEntry>& ledger,
                                        Grouping grouping, int min_samples,
                                        double deficit_threshold);

// Entries eligible for reconciliation: promises that actually held an active
// interval (completed, or cancelled after activation).
bool reconcilable(const PromiseLedgerEntry& entry);

}  // namespace wansim
