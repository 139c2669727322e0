#include "wansim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wansim/errors.hpp"

namespace wansim {

namespace {

constexpr double kRelEps = 1e-9;

// Relative slack for admission comparisons so that exact-fit grants are not
// rejected over the last floating-point ulp.
bool at_least(double value, double bound) {
    return value >= bound - std::abs(bound) * kRelEps - 1e-3;
}

}  // namespace

const char* to_string(AdjustReason reason) {
    switch (reason) {
        case AdjustReason::demand_change: return "demand_change";
        case AdjustReason::capacity_freed: return "capacity_freed";
        case AdjustReason::preemption_squeeze: return "preemption_squeeze";
    }
    return "unknown";
}

double transfer_duration(double volume_bytes, double rate_bps) {
    if (!(rate_bps > 0.0)) {
        fail_validation("NonPositiveRate", "transfer duration needs a positive rate");
    }
    if (volume_bytes < 0.0) {
        fail_validation("NegativeVolume", "transfer duration needs a non-negative volume");
    }
    return kBitsPerByte * volume_bytes / rate_bps;
}

std::unique_ptr<SchedulingPolicy> make_policy(const std::string& name) {
    if (name == "greedy_priority") {
        return std::make_unique<GreedyPriorityPolicy>();
    }
    fail_validation("UnknownPolicy", "no scheduling policy named '" + name + "'");
}

Scheduler::Scheduler(const Topology& topo, std::map<std::string, Site> sites, SchedulerConfig cfg)
    : topo_(&topo), cfg_(std::move(cfg)), sites_(std::move(sites)) {
    if (!(cfg_.reserved_fraction >= 0.0 && cfg_.reserved_fraction < 1.0)) {
        fail_validation("MalformedConfig", "reserved_fraction must lie in [0, 1)");
    }
    for (const auto& [link, fraction] : cfg_.reserved_fraction_overrides) {
        if (!topo_->has_link(link)) {
            fail_validation("UnknownLink",
                            "reserved_fraction override for unknown link " + link.a + " -- " + link.b);
        }
        if (!(fraction >= 0.0 && fraction < 1.0)) {
            fail_validation("MalformedConfig", "reserved_fraction override must lie in [0, 1)");
        }
    }
    if (!(cfg_.minimum_grant_bps > 0.0)) {
        fail_validation("MalformedConfig", "minimum_grant must be positive");
    }
    for (const auto& [name, site] : sites_) {
        if (!topo_->has_node(name) || topo_->node_kind(name) != NodeKind::site) {
            fail_validation("UnknownSite", "declared site '" + name + "' is not a site node");
        }
        (void)site;
    }
    policy_ = make_policy(cfg_.policy);
}

double Scheduler::reserved_fraction(const LinkKey& link) const {
    auto it = cfg_.reserved_fraction_overrides.find(link);
    return it != cfg_.reserved_fraction_overrides.end() ? it->second : cfg_.reserved_fraction;
}

double Scheduler::link_promised(const LinkKey& link) const {
    auto it = link_promised_.find(link);
    return it != link_promised_.end() ? it->second : 0.0;
}

double Scheduler::site_promised(const std::string& site) const {
    auto it = site_promised_.find(site);
    return it != site_promised_.end() ? it->second : 0.0;
}

double Scheduler::link_headroom(const LinkKey& link) const {
    return (1.0 - reserved_fraction(link)) * topo_->link_capacity(link) - link_promised(link);
}

double Scheduler::site_headroom(const std::string& site) const {
    return sites_.at(site).bandwidth_limit_bps - site_promised(site);
}

const Promise& Scheduler::promise(const std::string& id) const {
    auto it = promises_.find(id);
    if (it == promises_.end()) {
        fail_runtime("UnknownPromise", "no promise '" + id + "'");
    }
    return it->second;
}

const TransferRequest& Scheduler::request(const std::string& id) const {
    auto it = requests_.find(id);
    if (it == requests_.end()) {
        fail_validation("UnknownRequest", "no request '" + id + "'");
    }
    return it->second;
}

void Scheduler::sort_queue() {
    std::sort(queue_.begin(), queue_.end(), [this](const std::string& x, const std::string& y) {
        const TransferRequest& rx = requests_.at(x);
        const TransferRequest& ry = requests_.at(y);
        if (rx.priority != ry.priority) return rx.priority > ry.priority;
        if (rx.submitted_at != ry.submitted_at) return rx.submitted_at < ry.submitted_at;
        return rx.id < ry.id;
    });
}

void Scheduler::submit(const TransferRequest& request) {
    if (requests_.count(request.id)) {
        fail_validation("DuplicateRequestId", "request id '" + request.id + "' already used");
    }
    if (!sites_.count(request.src)) {
        fail_validation("UnknownSite", "request '" + request.id + "' names unknown site '" +
                                           request.src + "'");
    }
    if (!sites_.count(request.dst)) {
        fail_validation("UnknownSite", "request '" + request.id + "' names unknown site '" +
                                           request.dst + "'");
    }
    if (request.src == request.dst || request.volume_bytes < 0.0 || request.priority < 0) {
        fail_validation("MalformedRequest", "request '" + request.id + "' violates invariants");
    }
    requests_.emplace(request.id, request);
    request_status_.emplace(request.id, RequestStatus::queued);
    queue_.push_back(request.id);
    sort_queue();
}

std::optional<Promise> Scheduler::plan_grant(const TransferRequest& request, double now,
                                             const std::map<LinkKey, double>& link_promised,
                                             const std::map<std::string, double>& site_promised,
                                             const std::map<std::string, int>& slots_taken) const {
    if (request.volume_bytes == 0.0) {
        return std::nullopt;  // completes instantly at the next review, no promise
    }
    Path path = shortest_path(*topo_, request.src, request.dst);

    // Slots are admission tokens: with none free on either side the request
    // waits in the queue like any other deferral.
    for (const std::string* site_name : {&request.src, &request.dst}) {
        const Site& site = sites_.at(*site_name);
        int free_slots = 0;
        for (int i = 1; i < site.slot_count; ++i) {
            free_slots += site.slot_vpn[static_cast<std::size_t>(i)].empty() ? 1 : 0;
        }
        auto taken = slots_taken.find(*site_name);
        if (taken != slots_taken.end()) {
            free_slots -= taken->second;
        }
        if (free_slots <= 0) {
            return std::nullopt;
        }
    }

    double grantable = kUnbounded;
    for (const auto& link : path.links()) {
        double promised = 0.0;
        if (auto it = link_promised.find(link); it != link_promised.end()) promised = it->second;
        double schedulable = (1.0 - reserved_fraction(link)) * topo_->link_capacity(link);
        grantable = std::min(grantable, schedulable - promised);
    }
    for (const std::string* site_name : {&request.src, &request.dst}) {
        double promised = 0.0;
        if (auto it = site_promised.find(*site_name); it != site_promised.end()) {
            promised = it->second;
        }
        grantable = std::min(grantable, sites_.at(*site_name).bandwidth_limit_bps - promised);
    }
    grantable = std::min(grantable, request.requested_rate_bps);

    if (!at_least(grantable, cfg_.minimum_grant_bps)) {
        return std::nullopt;
    }

    Promise promise;
    promise.request_id = request.id;
    promise.rate_bps = grantable;
    promise.start = now + cfg_.setup_delay_s;
    promise.end = promise.start + transfer_duration(request.volume_bytes, grantable);
    promise.path = path;
    promise.state = PromiseState::pending;
    promise.priority = request.priority;
    promise.remaining_bytes = request.volume_bytes;
    promise.deadline_missed =
        request.deadline_s != kUnbounded && promise.end > request.deadline_s;
    return promise;
}

std::optional<Promise> Scheduler::compute_promise(const std::string& request_id, double now) const {
    auto status = request_status_.find(request_id);
    if (status == request_status_.end() || status->second != RequestStatus::queued) {
        fail_validation("UnknownRequest", "request '" + request_id + "' is not pending");
    }
    return plan_grant(requests_.at(request_id), now, link_promised_, site_promised_, {});
}

void Scheduler::apply_grant(const GrantAction& grant, double now, ReviewOutcome& outcome) {
    const TransferRequest& req = requests_.at(grant.request_id);

    std::string promise_id = "p" + std::to_string(++next_seq_);
    std::string vpn_id = "v" + std::to_string(next_seq_);

    Site& a = sites_.at(req.src);
    Site& b = sites_.at(req.dst);
    Vpn vpn = attach_vpn(*topo_, a, b, grant.path, grant.rate_bps, now, cfg_.setup_delay_s, vpn_id);
    vpn.setup_complete_at = grant.start;
    vpns_.emplace(vpn_id, vpn);

    Promise promise;
    promise.id = promise_id;
    promise.request_id = req.id;
    promise.rate_bps = grant.rate_bps;
    promise.start = grant.start;
    promise.end = grant.end;
    promise.path = grant.path;
    promise.vpn_id = vpn_id;
    promise.state = PromiseState::pending;
    promise.priority = req.priority;
    promise.remaining_bytes = req.volume_bytes;
    promise.deadline_missed = grant.deadline_missed;
    promise.seq = next_seq_;
    promises_.emplace(promise_id, promise);
    request_promise_.emplace(req.id, promise_id);
    request_status_[req.id] = RequestStatus::granted;
    queue_.erase(std::remove(queue_.begin(), queue_.end(), req.id), queue_.end());

    for (const auto& link : grant.path.links()) {
        link_promised_[link] += grant.rate_bps;
    }
    site_promised_[req.src] += grant.rate_bps;
    site_promised_[req.dst] += grant.rate_bps;

    outcome.adjustments.push_back(PromiseAdjustment{
        promise_id, 0.0, grant.rate_bps, grant.end, grant.reason, now});
    outcome.granted_promise_ids.push_back(promise_id);
}

void Scheduler::apply_rate_change(const RateAction& action, double now, ReviewOutcome& outcome) {
    Promise& promise = promises_.at(action.promise_id);
    if (promise.state != PromiseState::pending && promise.state != PromiseState::active) {
        fail_runtime("BadPromiseState", "rate change on closed promise '" + promise.id + "'");
    }
    if (!(action.new_rate_bps > 0.0)) {
        fail_runtime("BadAdjustment", "promises shrink to minimum_grant, never to zero");
    }
    double delta = action.new_rate_bps - promise.rate_bps;
    for (const auto& link : promise.path.links()) {
        link_promised_[link] += delta;
    }
    site_promised_[promise.path.hops.front()] += delta;
    site_promised_[promise.path.hops.back()] += delta;

    outcome.adjustments.push_back(PromiseAdjustment{
        promise.id, promise.rate_bps, action.new_rate_bps, action.new_end, action.reason, now});

    promise.rate_bps = action.new_rate_bps;
    promise.end = action.new_end;
    vpns_.at(promise.vpn_id).rate_bps = action.new_rate_bps;
}

ReviewOutcome Scheduler::review(double now) {
    Proposal proposal = policy_->propose(*this, now);
    ReviewOutcome outcome;
    for (const auto& action : proposal.actions) {
        switch (action.kind) {
            case PolicyAction::Kind::rate_change:
                apply_rate_change(action.rate, now, outcome);
                break;
            case PolicyAction::Kind::grant:
                apply_grant(action.grant, now, outcome);
                break;
            case PolicyAction::Kind::instant_complete:
                queue_.erase(std::remove(queue_.begin(), queue_.end(), action.request_id),
                             queue_.end());
                request_status_[action.request_id] = RequestStatus::completed;
                outcome.completed_instantly.push_back(action.request_id);
                break;
        }
    }
    check_invariants();
    return outcome;
}

bool Scheduler::cancellable(const std::string& request_id) const {
    auto status = request_status_.find(request_id);
    return status != request_status_.end() && (status->second == RequestStatus::queued ||
                                               status->second == RequestStatus::granted);
}

CancelResult Scheduler::cancel(const std::string& request_id, double now) {
    auto status = request_status_.find(request_id);
    if (status == request_status_.end()) {
        fail_validation("UnknownRequest", "no request '" + request_id + "'");
    }
    if (status->second == RequestStatus::queued) {
        queue_.erase(std::remove(queue_.begin(), queue_.end(), request_id), queue_.end());
        status->second = RequestStatus::cancelled;
        return CancelResult{CancelEffect::removed_pending, "", false};
    }
    if (status->second != RequestStatus::granted) {
        // Completed or already cancelled: nothing left to cancel.
        fail_validation("UnknownRequest", "request '" + request_id + "' has no cancellable work");
    }
    const std::string& promise_id = request_promise_.at(request_id);
    bool was_active = promises_.at(promise_id).state == PromiseState::active;
    close_promise(promise_id, PromiseState::cancelled, now);
    status->second = RequestStatus::cancelled;
    return CancelResult{CancelEffect::cancelled_promise, promise_id, was_active};
}

void Scheduler::activate_promise(const std::string& promise_id, double now) {
    Promise& promise = promises_.at(promise_id);
    if (promise.state != PromiseState::pending) {
        fail_runtime("BadPromiseState", "promise '" + promise_id + "' is not pending");
    }
    promise.state = PromiseState::active;
    activate_vpn(vpns_.at(promise.vpn_id));
    (void)now;
}

void Scheduler::close_promise(const std::string& promise_id, PromiseState final_state, double now) {
    Promise& promise = promises_.at(promise_id);
    if (promise.state != PromiseState::pending && promise.state != PromiseState::active) {
        fail_runtime("BadPromiseState", "promise '" + promise_id + "' already closed");
    }
    if (final_state != PromiseState::completed && final_state != PromiseState::cancelled) {
        fail_runtime("BadPromiseState", "promises close as completed or cancelled");
    }
    for (const auto& link : promise.path.links()) {
        link_promised_[link] -= promise.rate_bps;
        if (std::abs(link_promised_[link]) < 1e-6) link_promised_[link] = 0.0;
    }
    for (const std::string* site : {&promise.path.hops.front(), &promise.path.hops.back()}) {
        site_promised_[*site] -= promise.rate_bps;
        if (std::abs(site_promised_[*site]) < 1e-6) site_promised_[*site] = 0.0;
    }
    Vpn& vpn = vpns_.at(promise.vpn_id);
    release_vpn(vpn, sites_.at(vpn.site_a), sites_.at(vpn.site_b), now);
    promise.state = final_state;
    if (final_state == PromiseState::completed) {
        request_status_[promise.request_id] = RequestStatus::completed;
    }
}

void Scheduler::set_remaining(const std::string& promise_id, double bytes) {
    promises_.at(promise_id).remaining_bytes = bytes;
}

void Scheduler::check_invariants() const {
    for (const auto& [link, promised] : link_promised_) {
        double schedulable = (1.0 - reserved_fraction(link)) * topo_->link_capacity(link);
        if (promised > schedulable * (1.0 + kRelEps) + 1e-3) {
            fail_runtime("ReservationViolated",
                         "promised rates exceed schedulable share on " + link.a + " -- " + link.b);
        }
    }
    for (const auto& [site, promised] : site_promised_) {
        if (promised > sites_.at(site).bandwidth_limit_bps * (1.0 + kRelEps) + 1e-3) {
            fail_runtime("EndpointViolated", "promised rates exceed bandwidth limit at " + site);
        }
    }
}

// ---------------------------------------------------------------------------
// Default policy.

namespace {

// Scratch view of commitments that a proposal mutates as it is planned, so
// that sequential application by the scheduler matches what was computed.
struct ScratchState {
    std::map<LinkKey, double> link_promised;
    std::map<std::string, double> site_promised;
    std::map<std::string, int> slots_taken;
    std::map<std::string, double> rates;  // promise id -> planned rate

    explicit ScratchState(const Scheduler& sched) {
        for (const auto& [id, promise] : sched.promises()) {
            if (promise.state == PromiseState::pending || promise.state == PromiseState::active) {
                rates[id] = promise.rate_bps;
                for (const auto& link : promise.path.links()) {
                    link_promised[link] += promise.rate_bps;
                }
                site_promised[promise.path.hops.front()] += promise.rate_bps;
                site_promised[promise.path.hops.back()] += promise.rate_bps;
            }
        }
    }

    void add(const Path& path, double delta) {
        for (const auto& link : path.links()) {
            link_promised[link] += delta;
        }
        site_promised[path.hops.front()] += delta;
        site_promised[path.hops.back()] += delta;
    }
};

double scratch_link_headroom(const Scheduler& sched, const ScratchState& scratch,
                             const LinkKey& link) {
    double promised = 0.0;
    if (auto it = scratch.link_promised.find(link); it != scratch.link_promised.end()) {
        promised = it->second;
    }
    return (1.0 - sched.reserved_fraction(link)) * sched.topology().link_capacity(link) - promised;
}

double scratch_site_headroom(const Scheduler& sched, const ScratchState& scratch,
                             const std::string& site) {
    double promised = 0.0;
    if (auto it = scratch.site_promised.find(site); it != scratch.site_promised.end()) {
        promised = it->second;
    }
    return sched.sites().at(site).bandwidth_limit_bps - promised;
}

double path_headroom(const Scheduler& sched, const ScratchState& scratch, const Path& path) {
    double headroom = kUnbounded;
    for (const auto& link : path.links()) {
        headroom = std::min(headroom, scratch_link_headroom(sched, scratch, link));
    }
    headroom = std::min(headroom, scratch_site_headroom(sched, scratch, path.hops.front()));
    headroom = std::min(headroom, scratch_site_headroom(sched, scratch, path.hops.back()));
    return headroom;
}

double recompute_end(const Promise& promise, double new_rate, double now) {
    double from = promise.state == PromiseState::active ? now : promise.start;
    return from + transfer_duration(promise.remaining_bytes, new_rate);
}

// Promises in ascending (priority, seq) order whose path shares a link or an
// endpoint site with `path` and whose priority is strictly below `priority`.
std::vector<const Promise*> squeeze_victims(const Scheduler& sched, const Path& path,
                                            int priority) {
    std::set<LinkKey> contested_links;
    for (const auto& link : path.links()) {
        contested_links.insert(link);
    }
    std::set<std::string> contested_sites{path.hops.front(), path.hops.back()};

    std::vector<const Promise*> victims;
    for (const auto& [id, promise] : sched.promises()) {
        if (promise.state != PromiseState::pending && promise.state != PromiseState::active) {
            continue;
        }
        if (promise.priority >= priority) {
            continue;
        }
        bool shares = contested_sites.count(promise.path.hops.front()) ||
                      contested_sites.count(promise.path.hops.back());
        for (const auto& link : promise.path.links()) {
            shares = shares || contested_links.count(link) > 0;
        }
        if (shares) {
            victims.push_back(&promise);
        }
    }
    std::sort(victims.begin(), victims.end(), [](const Promise* x, const Promise* y) {
        if (x->priority != y->priority) return x->priority < y->priority;
        return x->seq < y->seq;
    });
    return victims;
}

}  // namespace

Proposal GreedyPriorityPolicy::propose(const Scheduler& sched, double now) const {
    Proposal proposal;
    ScratchState scratch(sched);
    const SchedulerConfig& cfg = sched.config();

    // Phase 1 -- raise: active promises still below their request's ceiling
    // absorb headroom on their path.
    std::vector<const Promise*> active;
    for (const auto& [id, promise] : sched.promises()) {
        if (promise.state == PromiseState::active) {
            active.push_back(&promise);
        }
    }
    std::sort(active.begin(), active.end(),
              [](const Promise* x, const Promise* y) { return x->seq < y->seq; });
    for (const Promise* promise : active) {
        double ceiling = sched.request(promise->request_id).requested_rate_bps;
        double current = scratch.rates.at(promise->id);
        // Only rate-limited requests have a ceiling to grow toward; promises
        // granted without a requested rate already took the maximum available.
        if (ceiling == kUnbounded || current >= ceiling) {
            continue;
        }
        double headroom = path_headroom(sched, scratch, promise->path);
        double new_rate = std::min(ceiling, current + headroom);
        if (new_rate > current * (1.0 + 1e-9) && new_rate - current > 1.0) {
            PolicyAction action;
            action.kind = PolicyAction::Kind::rate_change;
            action.rate = RateAction{promise->id, new_rate,
                                     recompute_end(*promise, new_rate, now),
                                     AdjustReason::capacity_freed};
            proposal.actions.push_back(action);
            scratch.add(promise->path, new_rate - current);
            scratch.rates[promise->id] = new_rate;
        }
    }

    // Phases 2 and 3 -- admit deferred requests in queue order; when a
    // strictly higher-priority request still does not fit, squeeze
    // lower-priority promises on the contested resources down toward
    // minimum_grant until it does.
    for (const std::string& request_id : sched.pending_requests()) {
        const TransferRequest& request = sched.request(request_id);
        if (request.volume_bytes == 0.0) {
            PolicyAction action;
            action.kind = PolicyAction::Kind::instant_complete;
            action.request_id = request_id;
            proposal.actions.push_back(action);
            continue;
        }

        auto admit = [&](const Promise& plan, AdjustReason reason) {
            PolicyAction action;
            action.kind = PolicyAction::Kind::grant;
            action.grant = GrantAction{request_id, plan.path,    plan.rate_bps,
                                       plan.start, plan.end,     plan.deadline_missed,
                                       reason};
            proposal.actions.push_back(action);
            scratch.add(plan.path, plan.rate_bps);
            scratch.slots_taken[request.src] += 1;
            scratch.slots_taken[request.dst] += 1;
        };

        std::optional<Promise> plan;
        try {
            plan = sched.plan_grant(request, now, scratch.link_promised, scratch.site_promised,
                                    scratch.slots_taken);
        } catch (const Error&) {
            continue;  // no route; the request stays queued
        }
        if (plan) {
            admit(*plan, AdjustReason::demand_change);
            continue;
        }

        Path path;
        try {
            path = shortest_path(sched.topology(), request.src, request.dst);
        } catch (const Error&) {
            continue;
        }
        std::vector<const Promise*> victims = squeeze_victims(sched, path, request.priority);
        if (victims.empty()) {
            continue;
        }

        // Ceiling the squeeze can reach with every victim at minimum_grant.
        double max_grantable = request.requested_rate_bps;
        auto victim_slack_on = [&](auto resource_contains) {
            double slack = 0.0;
            for (const Promise* victim : victims) {
                double rate = scratch.rates.at(victim->id);
                if (resource_contains(*victim) && rate > cfg.minimum_grant_bps) {
                    slack += rate - cfg.minimum_grant_bps;
                }
            }
            return slack;
        };
        for (const auto& link : path.links()) {
            double slack = victim_slack_on([&](const Promise& victim) {
                for (const auto& vl : victim.path.links()) {
                    if (vl == link) return true;
                }
                return false;
            });
            max_grantable =
                std::min(max_grantable, scratch_link_headroom(sched, scratch, link) + slack);
        }
        for (const std::string* site : {&request.src, &request.dst}) {
            double slack = victim_slack_on([&](const Promise& victim) {
                return victim.path.hops.front() == *site || victim.path.hops.back() == *site;
            });
            max_grantable =
                std::min(max_grantable, scratch_site_headroom(sched, scratch, *site) + slack);
        }
        if (max_grantable < cfg.minimum_grant_bps * (1.0 - kRelEps)) {
            continue;  // even a full squeeze cannot fit it
        }

        // Plan reductions, lowest priority first, until the target fits.
        double target = max_grantable;
        std::map<LinkKey, double> need_link;
        std::map<std::string, double> need_site;
        for (const auto& link : path.links()) {
            need_link[link] = target - scratch_link_headroom(sched, scratch, link);
        }
        for (const std::string* site : {&request.src, &request.dst}) {
            need_site[*site] = target - scratch_site_headroom(sched, scratch, *site);
        }
        auto max_need = [&](const Promise& victim) {
            double need = 0.0;
            for (const auto& vl : victim.path.links()) {
                if (auto it = need_link.find(vl); it != need_link.end()) {
                    need = std::max(need, it->second);
                }
            }
            for (const std::string* site :
                 {&victim.path.hops.front(), &victim.path.hops.back()}) {
                if (auto it = need_site.find(*site); it != need_site.end()) {
                    need = std::max(need, it->second);
                }
            }
            return need;
        };
        for (const Promise* victim : victims) {
            double need = max_need(*victim);
            if (need <= 1e-3) {
                continue;
            }
            double rate = scratch.rates.at(victim->id);
            double cut = std::min(rate - cfg.minimum_grant_bps, need);
            if (cut <= 0.0) {
                continue;
            }
            double new_rate = rate - cut;
            PolicyAction action;
            action.kind = PolicyAction::Kind::rate_change;
            action.rate = RateAction{victim->id, new_rate,
                                     recompute_end(*victim, new_rate, now),
                                     AdjustReason::preemption_squeeze};
            proposal.actions.push_back(action);
            scratch.add(victim->path, -cut);
            scratch.rates[victim->id] = new_rate;
            for (const auto& vl : victim->path.links()) {
                if (auto it = need_link.find(vl); it != need_link.end()) {
                    it->second -= cut;
                }
            }
            for (const std::string* site :
                 {&victim->path.hops.front(), &victim->path.hops.back()}) {
                if (auto it = need_site.find(*site); it != need_site.end()) {
                    it->second -= cut;
                }
            }
        }

        plan = sched.plan_grant(request, now, scratch.link_promised, scratch.site_promised,
                                scratch.slots_taken);
        if (plan) {
            admit(*plan, AdjustReason::preemption_squeeze);
        }
    }

    return proposal;
}

}  // namespace wansim
