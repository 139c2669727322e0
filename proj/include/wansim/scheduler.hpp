#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wansim/endpoints.hpp"
#include "wansim/topology.hpp"
#include "wansim/units.hpp"

namespace wansim {

struct TransferRequest {
    std::string id;
    std::string src;
    std::string dst;
    double volume_bytes = 0.0;
    int priority = 0;
    double requested_rate_bps = kUnbounded;  // kUnbounded = unspecified
    double deadline_s = kUnbounded;          // kUnbounded = none
    double submitted_at = 0.0;
};

enum class PromiseState { pending, active, completed, cancelled };

// A granted commitment: a rate over [start, end) on a fixed path, sized so
// that rate * (end - start) >= 8 * remaining volume at grant time.
struct Promise {
    std::string id;
    std::string request_id;
    double rate_bps = 0.0;
    double start = 0.0;
    double end = 0.0;
    Path path;
    std::string vpn_id;
    PromiseState state = PromiseState::pending;
    int priority = 0;
    double remaining_bytes = 0.0;  // kept current by the simulation engine
    bool deadline_missed = false;  // granted anyway, flagged
    std::uint64_t seq = 0;         // grant order, for deterministic iteration
};

enum class AdjustReason { demand_change, capacity_freed, preemption_squeeze };

const char* to_string(AdjustReason reason);

struct PromiseAdjustment {
    std::string promise_id;
    double old_rate_bps = 0.0;  // 0 for admissions
    double new_rate_bps = 0.0;
    double new_end = 0.0;
    AdjustReason reason = AdjustReason::demand_change;
    double at = 0.0;
};

struct SchedulerConfig {
    double reserved_fraction = 0.25;  // free-for-all share withheld per link
    std::map<LinkKey, double> reserved_fraction_overrides;
    double minimum_grant_bps = gbps_to_bps(1.0);
    double review_interval_s = 30.0;
    double setup_delay_s = 60.0;
    std::string policy = "greedy_priority";
};

struct ReviewOutcome {
    std::vector<PromiseAdjustment> adjustments;
    std::vector<std::string> granted_promise_ids;
    std::vector<std::string> completed_instantly;  // zero-volume request ids
};

enum class CancelEffect { removed_pending, cancelled_promise };

struct CancelResult {
    CancelEffect effect;
    std::string promise_id;       // set when a promise was cancelled
    bool was_active = false;
};

class Scheduler;

// Allocation policies are pure functions of the observable scheduler state;
// the scheduler applies whatever they propose, in order, enforcing the
// reservation and endpoint invariants.
struct GrantAction {
    std::string request_id;
    Path path;
    double rate_bps = 0.0;
    double start = 0.0;
    double end = 0.0;
    bool deadline_missed = false;
    AdjustReason reason = AdjustReason::demand_change;
};

struct RateAction {  // raise or reduce an existing promise
    std::string promise_id;
    double new_rate_bps = 0.0;
    double new_end = 0.0;
    AdjustReason reason = AdjustReason::capacity_freed;
};

struct PolicyAction {
    enum class Kind { rate_change, grant, instant_complete };
    Kind kind = Kind::rate_change;
    RateAction rate;            // kind == rate_change
    GrantAction grant;          // kind == grant
    std::string request_id;     // kind == instant_complete
};

struct Proposal {
    std::vector<PolicyAction> actions;  // applied in order
};

class SchedulingPolicy {
public:
    virtual ~SchedulingPolicy() = default;
    virtual Proposal propose(const Scheduler& sched, double now) const = 0;
};

// Shipped default: grants the maximum rate available under the reservation,
// raises rate-limited promises when headroom appears, retries deferred
// requests in queue order, and squeezes strictly lower-priority promises
// (never below minimum_grant) to admit blocked high-priority requests.
class GreedyPriorityPolicy : public SchedulingPolicy {
public:
    Proposal propose(const Scheduler& sched, double now) const override;
};

std::unique_ptr<SchedulingPolicy> make_policy(const std::string& name);

// The promise-granting core. Owns endpoint and commitment state; mutated
// only by the single-threaded simulation loop.
class Scheduler {
public:
    Scheduler(const Topology& topo, std::map<std::string, Site> sites, SchedulerConfig cfg);

    // Queues a request, ordered by (priority desc, submitted_at asc, id asc).
    // Errors: DuplicateRequestId, UnknownSite, MalformedRequest.
    void submit(const TransferRequest& request);

    // Default-policy grant computation against current commitments. Returns
    // the would-be promise, or nullopt to defer. Errors: UnknownRequest,
    // NoRoute.
    std::optional<Promise> compute_promise(const std::string& request_id, double now) const;

    // Runs the allocation policy and applies its proposal atomically.
    ReviewOutcome review(double now);

    // Removes a pending request or cancels its promise, releasing the Vpn
    // and all committed capacity. Errors: UnknownRequest.
    CancelResult cancel(const std::string& request_id, double now);

    // True while the request is still queued or holds an open promise.
    bool cancellable(const std::string& request_id) const;

    // Engine hooks driving the promise lifecycle.
    void activate_promise(const std::string& promise_id, double now);
    void close_promise(const std::string& promise_id, PromiseState final_state, double now);
    void set_remaining(const std::string& promise_id, double bytes);

    // Observers.
    const Topology& topology() const { return *topo_; }
    const SchedulerConfig& config() const { return cfg_; }
    const std::map<std::string, Site>& sites() const { return sites_; }
    const std::map<std::string, Vpn>& vpns() const { return vpns_; }
    const std::map<std::string, Promise>& promises() const { return promises_; }
    const Promise& promise(const std::string& id) const;
    const std::vector<std::string>& pending_requests() const { return queue_; }
    const TransferRequest& request(const std::string& id) const;
    double reserved_fraction(const LinkKey& link) const;
    double link_promised(const LinkKey& link) const;
    double site_promised(const std::string& site) const;
    // Schedulable headroom on a link: (1 - reserved_fraction) * capacity
    // minus rates already promised across it.
    double link_headroom(const LinkKey& link) const;
    double site_headroom(const std::string& site) const;

private:
    friend class GreedyPriorityPolicy;

    std::optional<Promise> plan_grant(const TransferRequest& request, double now,
                                      const std::map<LinkKey, double>& link_promised,
                                      const std::map<std::string, double>& site_promised,
                                      const std::map<std::string, int>& slots_taken) const;
    void apply_grant(const GrantAction& grant, double now, ReviewOutcome& outcome);
    void apply_rate_change(const RateAction& action, double now, ReviewOutcome& outcome);
    void check_invariants() const;
    void sort_queue();

    const Topology* topo_;
    SchedulerConfig cfg_;
    std::map<std::string, Site> sites_;
    std::map<std::string, Vpn> vpns_;
    std::map<std::string, Promise> promises_;
    std::map<std::string, TransferRequest> requests_;
    std::map<std::string, std::string> request_promise_;
    enum class RequestStatus { queued, granted, completed, cancelled };
    std::map<std::string, RequestStatus> request_status_;
    std::vector<std::string> queue_;  // pending request ids, kept in grant order
    std::map<LinkKey, double> link_promised_;     // pending + active promises
    std::map<std::string, double> site_promised_; // pending + active promises
    std::uint64_t next_seq_ = 0;
    std::unique_ptr<SchedulingPolicy> policy_;
};

// Seconds needed to move `volume_bytes` at `rate_bps`: 8 * volume / rate.
// Errors: NonPositiveRate.
double transfer_duration(double volume_bytes, double rate_bps);

}  // namespace wansim
