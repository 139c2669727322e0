#include "wansim/flowsim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <set>

#include "wansim/errors.hpp"

namespace wansim {

const char* to_string(FlowClass klass) {
    return klass == FlowClass::provisioned ? "provisioned" : "best_effort";
}

double predict_completion(const Flow& flow) {
    if (flow.remaining_bytes == kUnbounded) {
        return kUnbounded;
    }
    if (flow.remaining_bytes <= 0.0) {
        return 0.0;
    }
    if (!(flow.current_rate_bps > 0.0)) {
        return kUnbounded;
    }
    return flow.remaining_bytes * kBitsPerByte / flow.current_rate_bps;
}

// ---------------------------------------------------------------------------
// Rate allocation.

namespace {

constexpr double kRateEps = 1e-3;  // bps; vanishing against Gb/s-scale rates

struct Participant {
    const Flow* flow;
    std::vector<LinkKey> links;
    double alloc = 0.0;
    double cap = kUnbounded;
    bool frozen = false;
    bool extra = false;  // work-conserving top-up for a provisioned flow
};

}  // namespace

std::map<std::string, double> compute_rates(const Topology& topo,
                                            const std::vector<Flow>& flows,
                                            const SimConfig& cfg,
                                            const std::map<LinkKey, double>& link_efficiency) {
    std::map<std::string, double> rates;
    std::map<LinkKey, double> available;  // residual after provisioned usage
    std::set<LinkKey> provision_links;

    for (const Flow& flow : flows) {
        if (flow.klass != FlowClass::provisioned) {
            continue;
        }
        double efficiency = 1.0;
        for (const auto& link : flow.path.links()) {
            if (auto it = link_efficiency.find(link); it != link_efficiency.end()) {
                efficiency *= it->second;
            }
        }
        double rate = std::min(flow.promised_rate_bps * efficiency, flow.demand_cap_bps);
        rates[flow.id] = rate;
        for (const auto& link : flow.path.links()) {
            provision_links.insert(link);
            if (!available.count(link)) {
                available[link] = topo.link_capacity(link);
            }
            available[link] -= rate;
            if (available[link] < -kRateEps) {
                fail_runtime("InfeasibleProvisions",
                             "provisioned rates exceed capacity on " + link.a + " -- " + link.b);
            }
            available[link] = std::max(available[link], 0.0);
        }
    }

    std::vector<Participant> parts;
    for (const Flow& flow : flows) {
        if (flow.klass == FlowClass::best_effort) {
            Participant part;
            part.flow = &flow;
            part.links = flow.path.links();
            part.cap = flow.demand_cap_bps;
            bool under_provision = false;
            for (const auto& link : part.links) {
                under_provision = under_provision || provision_links.count(link) > 0;
            }
            if (under_provision) {
                part.cap = std::min(part.cap, cfg.best_effort_cap_under_provision_bps);
            }
            parts.push_back(std::move(part));
        } else if (cfg.work_conserving) {
            Participant part;
            part.flow = &flow;
            part.links = flow.path.links();
            part.extra = true;
            part.cap = flow.demand_cap_bps == kUnbounded
                           ? kUnbounded
                           : std::max(0.0, flow.demand_cap_bps - rates.at(flow.id));
            parts.push_back(std::move(part));
        }
    }

    for (const Participant& part : parts) {
        for (const auto& link : part.links) {
            if (!available.count(link)) {
                available[link] = topo.link_capacity(link);
            }
        }
    }

    // Floor stage: every best-effort flow is owed min(floor, cap). On links
    // where the floors alone exceed the residual, the flows of that link get
    // an equal proportional share of it instead and freeze there.
    if (cfg.best_effort_floor_bps > 0.0) {
        std::map<LinkKey, double> floor_demand;
        for (const Participant& part : parts) {
            if (part.extra) continue;
            double floor = std::min(cfg.best_effort_floor_bps, part.cap);
            for (const auto& link : part.links) {
                floor_demand[link] += floor;
            }
        }
        for (Participant& part : parts) {
            if (part.extra) continue;
            double floor = std::min(cfg.best_effort_floor_bps, part.cap);
            double scale = 1.0;
            for (const auto& link : part.links) {
                double demand = floor_demand[link];
                if (demand > available[link] + kRateEps) {
                    scale = std::min(scale, available[link] / demand);
                }
            }
            part.alloc = floor * scale;
            if (scale < 1.0 || part.alloc >= part.cap - kRateEps) {
                part.frozen = true;
            }
        }
        for (const Participant& part : parts) {
            for (const auto& link : part.links) {
                available[link] = std::max(0.0, available[link] - part.alloc);
            }
        }
    } else {
        for (Participant& part : parts) {
            if (part.cap <= kRateEps) {
                part.frozen = true;
            }
        }
    }

    // Progressive filling: raise all unfrozen allocations uniformly until a
    // demand cap or a link saturates, freeze what bound, repeat.
    std::size_t max_rounds = 2 * (parts.size() + available.size()) + 4;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        std::map<LinkKey, int> active_count;
        double step = kUnbounded;
        bool any_unfrozen = false;
        for (const Participant& part : parts) {
            if (part.frozen) continue;
            any_unfrozen = true;
            step = std::min(step, part.cap - part.alloc);
            for (const auto& link : part.links) {
                active_count[link] += 1;
            }
        }
        if (!any_unfrozen) {
            break;
        }
        for (const auto& [link, count] : active_count) {
            step = std::min(step, available[link] / count);
        }
        step = std::max(step, 0.0);

        for (Participant& part : parts) {
            if (part.frozen) continue;
            part.alloc += step;
            for (const auto& link : part.links) {
                available[link] = std::max(0.0, available[link] - step);
            }
        }
        bool froze = false;
        for (Participant& part : parts) {
            if (part.frozen) continue;
            if (part.alloc >= part.cap - kRateEps) {
                part.frozen = true;
                froze = true;
                continue;
            }
            for (const auto& link : part.links) {
                if (available[link] <= kRateEps) {
                    part.frozen = true;
                    froze = true;
                    break;
                }
            }
        }
        if (!froze) {
            break;  // numerical stall; allocations are already feasible
        }
    }

    for (const Participant& part : parts) {
        if (part.extra) {
            rates[part.flow->id] += part.alloc;
        } else {
            rates[part.flow->id] = part.alloc;
        }
    }
    for (const Flow& flow : flows) {
        if (!rates.count(flow.id)) {
            rates[flow.id] = 0.0;
        }
    }
    return rates;
}

// ---------------------------------------------------------------------------
// Event loop.

namespace {

// Total order for simultaneous events: capacity is freed (completions,
// expiries) before it is allocated (arrivals, reviews); measurement observes
// the settled state last.
enum class EvKind : int {
    flow_completion = 0,
    promise_expiry = 1,
    setup_complete = 2,
    request_arrival = 3,
    request_cancel = 4,
    review_tick = 5,
    load_start = 6,
    load_stop = 7,
    measurement_tick = 8,
};

struct Event {
    double at = 0.0;
    EvKind kind = EvKind::review_tick;
    std::uint64_t seq = 0;
    std::string id;             // flow, promise or trace id
    std::uint64_t version = 0;  // staleness guard for predictions
    int trace_index = -1;
};

struct EventAfter {
    bool operator()(const Event& x, const Event& y) const {
        if (x.at != y.at) return x.at > y.at;
        if (x.kind != y.kind) return static_cast<int>(x.kind) > static_cast<int>(y.kind);
        return x.seq > y.seq;
    }
};

struct LedgerTrack {
    PromiseLedgerEntry entry;
    double mark = 0.0;  // promised-rate accrual boundary
    double rate = 0.0;  // current promised rate
    bool open = false;
};

class Engine {
public:
    Engine(const Topology& topo, Scheduler& sched, const std::vector<TraceRecord>& trace,
           const SimConfig& cfg, const std::map<LinkKey, double>& efficiency)
        : topo_(topo), sched_(sched), trace_(trace), cfg_(cfg), efficiency_(efficiency) {}

    RunResult run();

private:
    void push(double at, EvKind kind, std::string id, std::uint64_t version = 0,
              int trace_index = -1) {
        queue_.push(Event{at, kind, ++seq_, std::move(id), version, trace_index});
    }

    bool stale(const Event& ev) const;
    void advance(double to);
    void dispatch(const Event& ev);
    void review_now();
    void recompute();
    void schedule_completion();
    void schedule_ticks();
    void emit_sample(const Flow& flow, double rate);
    void close_flow(const std::string& flow_id, bool completed);
    void accrue_promised(LedgerTrack& track, double to);
    void close_track(const std::string& promise_id, PromiseState state, double at);
    LedgerTrack& track(const std::string& promise_id);
    void finalize(RunResult& result);

    const Topology& topo_;
    Scheduler& sched_;
    const std::vector<TraceRecord>& trace_;
    const SimConfig cfg_;
    std::map<LinkKey, double> efficiency_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0;
    std::map<std::string, Flow> flows_;
    std::map<std::string, std::uint64_t> flow_version_;
    std::map<std::string, double> emitted_rate_;
    std::vector<LedgerTrack> tracks_;              // in grant order
    std::map<std::string, std::size_t> track_index_;
    double scheduled_completion_at_ = kUnbounded;
    std::string scheduled_completion_flow_;
    std::uint64_t scheduled_completion_version_ = 0;
    double scheduled_measurement_ = -1.0;
    double scheduled_review_ = -1.0;

    std::vector<ThroughputSample> timeline_;
    std::vector<CompletionRecord> completions_;
    std::vector<PromiseAdjustment> adjustments_;
};

LedgerTrack& Engine::track(const std::string& promise_id) {
    return tracks_.at(track_index_.at(promise_id));
}

void Engine::accrue_promised(LedgerTrack& t, double to) {
    if (t.open && to > t.mark) {
        t.entry.promised_bytes += t.rate * (to - t.mark) / kBitsPerByte;
        t.mark = to;
    }
}

void Engine::close_track(const std::string& promise_id, PromiseState state, double at) {
    LedgerTrack& t = track(promise_id);
    accrue_promised(t, at);
    t.open = false;
    t.entry.closed_at = at;
    t.entry.state = state;
}

bool Engine::stale(const Event& ev) const {
    switch (ev.kind) {
        case EvKind::flow_completion: {
            auto it = flows_.find(ev.id);
            return it == flows_.end() || flow_version_.at(ev.id) != ev.version;
        }
        case EvKind::promise_expiry: {
            const auto& promises = sched_.promises();
            auto it = promises.find(ev.id);
            return it == promises.end() || it->second.state != PromiseState::active ||
                   it->second.end != ev.at;
        }
        case EvKind::setup_complete: {
            const auto& promises = sched_.promises();
            auto it = promises.find(ev.id);
            return it == promises.end() || it->second.state != PromiseState::pending;
        }
        default:
            return false;
    }
}

void Engine::advance(double to) {
    if (to <= now_) {
        return;
    }
    double dt = to - now_;
    for (auto& [id, flow] : flows_) {
        if (!(flow.current_rate_bps > 0.0)) {
            continue;
        }
        double moved = flow.current_rate_bps * dt / kBitsPerByte;
        flow.moved_bytes += moved;
        if (flow.remaining_bytes != kUnbounded) {
            flow.remaining_bytes = std::max(0.0, flow.remaining_bytes - moved);
        }
        if (!flow.promise_id.empty()) {
            track(flow.promise_id).entry.achieved_bytes += moved;
        }
    }
    now_ = to;
}

void Engine::emit_sample(const Flow& flow, double rate) {
    timeline_.push_back(ThroughputSample{now_, flow.id, flow.klass, rate});
    emitted_rate_[flow.id] = rate;
}

void Engine::recompute() {
    std::vector<Flow> snapshot;
    snapshot.reserve(flows_.size());
    for (const auto& [id, flow] : flows_) {
        snapshot.push_back(flow);
    }
    std::map<std::string, double> rates = compute_rates(topo_, snapshot, cfg_, efficiency_);

    std::map<LinkKey, double> usage;
    for (auto& [id, flow] : flows_) {
        double rate = rates.at(id);
        if (flow.current_rate_bps != rate) {
            flow.current_rate_bps = rate;
            flow_version_[id] += 1;
        }
        auto it = emitted_rate_.find(id);
        if (it == emitted_rate_.end() || it->second != rate) {
            emit_sample(flow, rate);
        }
        for (const auto& link : flow.path.links()) {
            usage[link] += rate;
        }
    }
    for (const auto& [link, used] : usage) {
        double capacity = topo_.link_capacity(link);
        if (used > capacity * (1.0 + 1e-9) + kRateEps) {
            fail_runtime("ConservationViolated",
                         "allocated rates exceed capacity on " + link.a + " -- " + link.b);
        }
    }
}

void Engine::schedule_completion() {
    double best = kUnbounded;
    const Flow* next = nullptr;
    for (const auto& [id, flow] : flows_) {
        double dt = predict_completion(flow);
        if (dt < best) {
            best = dt;
            next = &flow;
        }
    }
    if (!next) {
        return;
    }
    double at = now_ + best;
    std::uint64_t version = flow_version_[next->id];
    if (scheduled_completion_flow_ == next->id && scheduled_completion_version_ == version &&
        scheduled_completion_at_ == at) {
        return;
    }
    scheduled_completion_flow_ = next->id;
    scheduled_completion_version_ = version;
    scheduled_completion_at_ = at;
    push(at, EvKind::flow_completion, next->id, version);
}

void Engine::schedule_ticks() {
    if (cfg_.measurement_interval_s > 0.0 && !flows_.empty()) {
        double interval = cfg_.measurement_interval_s;
        double next = (std::floor(now_ / interval + 1e-9) + 1.0) * interval;
        if (next <= cfg_.horizon_s && next != scheduled_measurement_) {
            scheduled_measurement_ = next;
            push(next, EvKind::measurement_tick, "");
        }
    }
    bool review_work = !sched_.pending_requests().empty();
    for (const auto& [id, promise] : sched_.promises()) {
        review_work = review_work || promise.state == PromiseState::pending ||
                      promise.state == PromiseState::active;
    }
    if (cfg_.horizon_s >= 0.0 && review_work && sched_.config().review_interval_s > 0.0) {
        double interval = sched_.config().review_interval_s;
        double next = (std::floor(now_ / interval + 1e-9) + 1.0) * interval;
        if (next <= cfg_.horizon_s && next != scheduled_review_) {
            scheduled_review_ = next;
            push(next, EvKind::review_tick, "");
        }
    }
}

void Engine::close_flow(const std::string& flow_id, bool completed) {
    Flow& flow = flows_.at(flow_id);
    if (completed) {
        completions_.push_back(CompletionRecord{flow.id, flow.klass, flow.src, flow.dst,
                                                flow.volume_bytes, flow.started_at, now_,
                                                flow.request_id});
    }
    emit_sample(flow, 0.0);
    if (!flow.promise_id.empty()) {
        close_track(flow.promise_id, completed ? PromiseState::completed : PromiseState::cancelled,
                    now_);
        sched_.close_promise(flow.promise_id,
                             completed ? PromiseState::completed : PromiseState::cancelled, now_);
    }
    flows_.erase(flow_id);
    flow_version_.erase(flow_id);
    emitted_rate_.erase(flow_id);
}

void Engine::review_now() {
    for (const auto& [id, flow] : flows_) {
        if (!flow.promise_id.empty()) {
            sched_.set_remaining(flow.promise_id, flow.remaining_bytes);
        }
    }
    ReviewOutcome outcome = sched_.review(now_);
    for (const auto& adjustment : outcome.adjustments) {
        adjustments_.push_back(adjustment);
        if (adjustment.old_rate_bps == 0.0) {
            continue;  // admissions are handled through granted_promise_ids
        }
        const Promise& promise = sched_.promise(adjustment.promise_id);
        LedgerTrack& t = track(adjustment.promise_id);
        accrue_promised(t, now_);
        t.rate = adjustment.new_rate_bps;
        t.entry.rate_bps = adjustment.new_rate_bps;
        t.entry.end = adjustment.new_end;
        if (promise.state == PromiseState::active) {
            Flow& flow = flows_.at(promise.request_id);
            flow.promised_rate_bps = adjustment.new_rate_bps;
            push(adjustment.new_end, EvKind::promise_expiry, adjustment.promise_id);
        }
    }
    for (const std::string& promise_id : outcome.granted_promise_ids) {
        const Promise& promise = sched_.promise(promise_id);
        LedgerTrack t;
        t.entry.promise_id = promise_id;
        t.entry.request_id = promise.request_id;
        t.entry.path = promise.path;
        t.entry.rate_bps = promise.rate_bps;
        t.entry.start = promise.start;
        t.entry.end = promise.end;
        t.entry.state = PromiseState::pending;
        t.rate = promise.rate_bps;
        track_index_.emplace(promise_id, tracks_.size());
        tracks_.push_back(std::move(t));
        push(promise.start, EvKind::setup_complete, promise_id);
    }
    for (const std::string& request_id : outcome.completed_instantly) {
        const TransferRequest& request = sched_.request(request_id);
        completions_.push_back(CompletionRecord{request_id, FlowClass::provisioned, request.src,
                                                request.dst, 0.0, now_, now_, request_id});
    }
}

void Engine::dispatch(const Event& ev) {
    switch (ev.kind) {
        case EvKind::flow_completion: {
            Flow& flow = flows_.at(ev.id);
            // Drain arithmetic leaves at most rounding dust behind.
            flow.remaining_bytes = 0.0;
            close_flow(ev.id, true);
            review_now();
            break;
        }
        case EvKind::promise_expiry: {
            const Promise& promise = sched_.promise(ev.id);
            std::string flow_id = promise.request_id;
            close_track(ev.id, PromiseState::completed, now_);
            sched_.close_promise(ev.id, PromiseState::completed, now_);
            auto it = flows_.find(flow_id);
            if (it != flows_.end()) {
                // The promised window closed with volume still in flight; the
                // transfer carries on as free-for-all traffic.
                Flow& flow = it->second;
                flow.klass = FlowClass::best_effort;
                flow.promise_id.clear();
                flow.promised_rate_bps = 0.0;
                flow.demand_cap_bps = kUnbounded;
                flow_version_[flow_id] += 1;
            }
            review_now();
            break;
        }
        case EvKind::setup_complete: {
            sched_.activate_promise(ev.id, now_);
            const Promise& promise = sched_.promise(ev.id);
            const TransferRequest& request = sched_.request(promise.request_id);
            LedgerTrack& t = track(ev.id);
            t.open = true;
            t.mark = now_;
            t.entry.start = now_;
            t.entry.state = PromiseState::active;
            t.entry.activated = true;

            Flow flow;
            flow.id = request.id;
            flow.klass = FlowClass::provisioned;
            flow.src = promise.path.hops.front();
            flow.dst = promise.path.hops.back();
            flow.path = promise.path;
            flow.volume_bytes = request.volume_bytes;
            flow.remaining_bytes = promise.remaining_bytes;
            flow.promised_rate_bps = promise.rate_bps;
            flow.promise_id = ev.id;
            flow.request_id = request.id;
            flow.started_at = now_;
            flows_.emplace(flow.id, std::move(flow));
            flow_version_.emplace(request.id, 0);
            push(promise.end, EvKind::promise_expiry, ev.id);
            break;
        }
        case EvKind::request_arrival: {
            sched_.submit(trace_[static_cast<std::size_t>(ev.trace_index)].request);
            review_now();
            break;
        }
        case EvKind::request_cancel: {
            if (!sched_.cancellable(ev.id)) {
                break;  // already completed or cancelled; nothing to withdraw
            }
            CancelResult result = sched_.cancel(ev.id, now_);
            if (result.effect == CancelEffect::cancelled_promise) {
                const Promise& promise = sched_.promise(result.promise_id);
                close_track(result.promise_id, PromiseState::cancelled, now_);
                auto it = flows_.find(promise.request_id);
                if (it != flows_.end()) {
                    Flow& flow = it->second;
                    emit_sample(flow, 0.0);
                    flows_.erase(it);
                    flow_version_.erase(promise.request_id);
                    emitted_rate_.erase(promise.request_id);
                }
            }
            review_now();
            break;
        }
        case EvKind::review_tick: {
            review_now();
            break;
        }
        case EvKind::load_start: {
            const TraceRecord& record = trace_[static_cast<std::size_t>(ev.trace_index)];
            Flow flow;
            flow.id = record.id;
            flow.klass = FlowClass::best_effort;
            flow.src = topo_.resolve(record.src);
            flow.dst = topo_.resolve(record.dst);
            flow.path = shortest_path(topo_, record.src, record.dst);
            flow.demand_cap_bps = record.demand_cap_bps;
            flow.started_at = now_;
            flows_.emplace(flow.id, std::move(flow));
            flow_version_.emplace(record.id, 0);
            break;
        }
        case EvKind::load_stop: {
            auto it = flows_.find(ev.id);
            if (it == flows_.end()) {
                fail_runtime("MalformedTrace", "load_stop for unknown load '" + ev.id + "'");
            }
            emit_sample(it->second, 0.0);
            flows_.erase(it);
            flow_version_.erase(ev.id);
            emitted_rate_.erase(ev.id);
            break;
        }
        case EvKind::measurement_tick: {
            for (const auto& [id, flow] : flows_) {
                emit_sample(flow, flow.current_rate_bps);
            }
            break;
        }
    }
}

void Engine::finalize(RunResult& result) {
    // Promises still open at the end of the run keep state active; their
    // promised bytes accrue to the stop time.
    for (auto& t : tracks_) {
        if (t.open) {
            accrue_promised(t, now_);
            t.entry.closed_at = now_;
            t.open = false;
        }
    }

    // Timeline rows in (time, flow, class) order; coincident re-emissions
    // collapse to the final value at that instant.
    std::vector<std::size_t> order(timeline_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [this](std::size_t x, std::size_t y) {
        const ThroughputSample& sx = timeline_[x];
        const ThroughputSample& sy = timeline_[y];
        if (sx.at != sy.at) return sx.at < sy.at;
        if (sx.flow_id != sy.flow_id) return sx.flow_id < sy.flow_id;
        if (sx.klass != sy.klass) return to_string(sx.klass) < std::string(to_string(sy.klass));
        return x < y;
    });
    std::vector<ThroughputSample> sorted;
    sorted.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const ThroughputSample& sample = timeline_[order[i]];
        if (!sorted.empty() && sorted.back().at == sample.at &&
            sorted.back().flow_id == sample.flow_id && sorted.back().klass == sample.klass) {
            sorted.back() = sample;  // order[] keeps original sequence within ties
        } else {
            sorted.push_back(sample);
        }
    }

    result.timeline = std::move(sorted);
    result.completions = std::move(completions_);
    result.adjustments = std::move(adjustments_);
    result.ledger.reserve(tracks_.size());
    for (const auto& t : tracks_) {
        result.ledger.push_back(t.entry);
    }
}

RunResult Engine::run() {
    for (std::size_t i = 0; i < trace_.size(); ++i) {
        const TraceRecord& record = trace_[i];
        EvKind kind;
        switch (record.kind) {
            case TraceKind::request: kind = EvKind::request_arrival; break;
            case TraceKind::load_start: kind = EvKind::load_start; break;
            case TraceKind::load_stop: kind = EvKind::load_stop; break;
            case TraceKind::cancel: kind = EvKind::request_cancel; break;
            default: fail_runtime("MalformedTrace", "unknown trace record kind");
        }
        push(record.at, kind, record.id, 0, static_cast<int>(i));
    }

    while (!queue_.empty()) {
        Event ev = queue_.top();
        if (ev.at > cfg_.horizon_s) {
            break;
        }
        queue_.pop();
        if (stale(ev)) {
            continue;
        }
        advance(ev.at);
        dispatch(ev);
        recompute();
        schedule_completion();
        schedule_ticks();
    }
    if (!flows_.empty() && now_ < cfg_.horizon_s) {
        advance(cfg_.horizon_s);
    }

    RunResult result;
    finalize(result);
    return result;
}

}  // namespace

RunResult run(const Topology& topo, Scheduler& scheduler, const std::vector<TraceRecord>& trace,
              const SimConfig& cfg, const std::map<LinkKey, double>& link_efficiency) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].at < trace[i - 1].at) {
            fail_validation("MalformedTrace", "trace events must be time-sorted");
        }
    }
    if (cfg.best_effort_floor_bps > cfg.best_effort_cap_under_provision_bps) {
        fail_validation("MalformedConfig",
                        "best_effort_floor must not exceed best_effort_cap_under_provision");
    }
    Engine engine(topo, scheduler, trace, cfg, link_efficiency);
    return engine.run();
}

}  // namespace wansim
