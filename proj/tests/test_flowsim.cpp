#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "wansim/flowsim.hpp"

using namespace wansim;
using testutil::error_kind;

namespace {

Topology chain(const std::vector<double>& capacities_gbps) {
    Topology topo;
    for (std::size_t i = 0; i <= capacities_gbps.size(); ++i) {
        topo.add_node("n" + std::to_string(i), i == 0 || i == capacities_gbps.size()
                                                   ? NodeKind::site
                                                   : NodeKind::router);
    }
    for (std::size_t i = 0; i < capacities_gbps.size(); ++i) {
        topo.add_link("n" + std::to_string(i), "n" + std::to_string(i + 1),
                      gbps_to_bps(capacities_gbps[i]));
    }
    return topo;
}

Path subpath(std::size_t from, std::size_t to) {
    Path path;
    for (std::size_t i = from; i <= to; ++i) {
        path.hops.push_back("n" + std::to_string(i));
    }
    return path;
}

Flow best_effort(std::string id, Path path, double cap_gbps = 0.0) {
    Flow flow;
    flow.id = std::move(id);
    flow.klass = FlowClass::best_effort;
    flow.src = path.hops.front();
    flow.dst = path.hops.back();
    flow.path = std::move(path);
    if (cap_gbps > 0.0) {
        flow.demand_cap_bps = gbps_to_bps(cap_gbps);
    }
    return flow;
}

Flow provisioned(std::string id, Path path, double rate_gbps) {
    Flow flow;
    flow.id = std::move(id);
    flow.klass = FlowClass::provisioned;
    flow.src = path.hops.front();
    flow.dst = path.hops.back();
    flow.path = std::move(path);
    flow.promised_rate_bps = gbps_to_bps(rate_gbps);
    flow.remaining_bytes = gb_to_bytes(1000);
    flow.volume_bytes = gb_to_bytes(1000);
    flow.promise_id = "p-" + flow.id;
    return flow;
}

// Independent brute-force progressive filling: recomputes every residual
// from scratch each round instead of maintaining incremental state.
std::map<std::string, double> oracle_rates(const Topology& topo, const std::vector<Flow>& flows,
                                           const SimConfig& cfg,
                                           const std::map<LinkKey, double>& efficiency) {
    std::map<std::string, double> fixed;
    std::set<LinkKey> provision_links;
    for (const Flow& flow : flows) {
        if (flow.klass != FlowClass::provisioned) continue;
        double scale = 1.0;
        for (const auto& link : flow.path.links()) {
            provision_links.insert(link);
            auto it = efficiency.find(link);
            if (it != efficiency.end()) scale *= it->second;
        }
        fixed[flow.id] = std::min(flow.promised_rate_bps * scale, flow.demand_cap_bps);
    }

    struct Entry {
        const Flow* flow;
        double alloc = 0.0;
        double cap = kUnbounded;
        bool frozen = false;
    };
    std::vector<Entry> entries;
    for (const Flow& flow : flows) {
        if (flow.klass != FlowClass::best_effort) continue;
        Entry entry;
        entry.flow = &flow;
        entry.cap = flow.demand_cap_bps;
        for (const auto& link : flow.path.links()) {
            if (provision_links.count(link)) {
                entry.cap = std::min(entry.cap, cfg.best_effort_cap_under_provision_bps);
                break;
            }
        }
        entries.push_back(entry);
    }

    auto residual = [&](const LinkKey& link) {
        double value = topo.link_capacity(link);
        for (const Flow& flow : flows) {
            if (flow.klass != FlowClass::provisioned) continue;
            for (const auto& fl : flow.path.links()) {
                if (fl == link) value -= fixed.at(flow.id);
            }
        }
        for (const Entry& entry : entries) {
            for (const auto& fl : entry.flow->path.links()) {
                if (fl == link) value -= entry.alloc;
            }
        }
        return value;
    };

    // Floors, identical semantics: infeasible links share out proportionally.
    if (cfg.best_effort_floor_bps > 0.0) {
        std::map<LinkKey, double> floor_sum;
        for (const Entry& entry : entries) {
            double floor = std::min(cfg.best_effort_floor_bps, entry.cap);
            for (const auto& link : entry.flow->path.links()) {
                floor_sum[link] += floor;
            }
        }
        for (Entry& entry : entries) {
            double floor = std::min(cfg.best_effort_floor_bps, entry.cap);
            double scale = 1.0;
            for (const auto& link : entry.flow->path.links()) {
                double avail = residual(link);
                if (floor_sum[link] > avail + 1e-3) {
                    scale = std::min(scale, avail / floor_sum[link]);
                }
            }
            entry.alloc = floor * scale;
            if (scale < 1.0 || entry.alloc >= entry.cap - 1e-3) entry.frozen = true;
        }
    }

    for (int round = 0; round < 200; ++round) {
        bool any = false;
        double step = kUnbounded;
        for (const Entry& entry : entries) {
            if (entry.frozen) continue;
            any = true;
            step = std::min(step, entry.cap - entry.alloc);
            for (const auto& link : entry.flow->path.links()) {
                int sharing = 0;
                for (const Entry& other : entries) {
                    if (other.frozen) continue;
                    for (const auto& ol : other.flow->path.links()) {
                        if (ol == link) {
                            sharing += 1;
                            break;
                        }
                    }
                }
                step = std::min(step, residual(link) / sharing);
            }
        }
        if (!any) break;
        step = std::max(step, 0.0);
        for (Entry& entry : entries) {
            if (!entry.frozen) entry.alloc += step;
        }
        bool froze = false;
        for (Entry& entry : entries) {
            if (entry.frozen) continue;
            if (entry.alloc >= entry.cap - 1e-3) {
                entry.frozen = true;
                froze = true;
                continue;
            }
            for (const auto& link : entry.flow->path.links()) {
                if (residual(link) <= 1e-3) {
                    entry.frozen = true;
                    froze = true;
                    break;
                }
            }
        }
        if (!froze) break;
    }

    std::map<std::string, double> rates = fixed;
    for (const Entry& entry : entries) {
        rates[entry.flow->id] = entry.alloc;
    }
    return rates;
}

bool close_rel(double x, double y, double rel) {
    double scale = std::max({std::abs(x), std::abs(y), 1.0});
    return std::abs(x - y) <= rel * scale;
}

// Rate of `flow_id` at time t per the step-function reading of the timeline.
double rate_at(const std::vector<ThroughputSample>& timeline, const std::string& flow_id,
               double t) {
    double rate = 0.0;
    for (const auto& sample : timeline) {
        if (sample.flow_id != flow_id) continue;
        if (sample.at > t) break;
        rate = sample.rate_bps;
    }
    return rate;
}

std::vector<ThroughputSample> series_of(const std::vector<ThroughputSample>& timeline,
                                        const std::string& flow_id) {
    std::vector<ThroughputSample> out;
    for (const auto& sample : timeline) {
        if (sample.flow_id == flow_id) out.push_back(sample);
    }
    return out;
}

struct MiniScenario {
    Topology topo;
    std::map<std::string, Site> sites;
    SchedulerConfig scheduler;
    SimConfig sim;
};

// Two 10 Gb/s sites joined over a 100 Gb/s backbone, as in the regression
// replay: the priority service and the capped best-effort share fit together.
MiniScenario backbone_pair() {
    MiniScenario m;
    m.topo.add_node("ucsd", NodeKind::site);
    m.topo.add_node("caltech", NodeKind::site);
    m.topo.add_node("west", NodeKind::router);
    m.topo.add_node("east", NodeKind::router);
    m.topo.add_link("ucsd", "west", gbps_to_bps(100));
    m.topo.add_link("west", "east", gbps_to_bps(100));
    m.topo.add_link("east", "caltech", gbps_to_bps(100));
    m.sites.emplace("ucsd", make_site("ucsd", gbps_to_bps(10), 8));
    m.sites.emplace("caltech", make_site("caltech", gbps_to_bps(10), 8));
    m.scheduler.reserved_fraction = 0.25;
    m.scheduler.minimum_grant_bps = gbps_to_bps(1);
    m.scheduler.review_interval_s = 30.0;
    m.scheduler.setup_delay_s = 60.0;
    m.sim.measurement_interval_s = 1.0;
    m.sim.best_effort_cap_under_provision_bps = gbps_to_bps(5);
    m.sim.best_effort_floor_bps = gbps_to_bps(0.1);
    m.sim.horizon_s = 1200.0;
    return m;
}

std::vector<TraceRecord> regression_trace() {
    std::string text =
        R"({"at": 0, "kind": "load_start", "id": "bg", "src": "ucsd", "dst": "caltech", "demand_cap_gbps": 9.2}
{"at": 60, "kind": "request", "id": "r1", "src": "ucsd", "dst": "caltech", "volume_gb": 750, "priority": 9, "requested_rate_gbps": 7}
)";
    return parse_trace_text(text);
}

}  // namespace

TEST_SUITE("flowsim") {

TEST_CASE("predict_completion") {
    Flow flow = provisioned("f", subpath(0, 1), 7);
    flow.remaining_bytes = gb_to_bytes(750);
    flow.current_rate_bps = gbps_to_bps(7);
    CHECK(predict_completion(flow) == doctest::Approx(6000.0 / 7.0));
    flow.remaining_bytes = 0.0;
    CHECK(predict_completion(flow) == 0.0);
    flow.remaining_bytes = gb_to_bytes(1);
    flow.current_rate_bps = 0.0;
    CHECK(predict_completion(flow) == kUnbounded);
}

TEST_CASE("provision plus capped best effort on one link") {
    Topology topo = chain({10});
    SimConfig cfg;
    cfg.best_effort_cap_under_provision_bps = gbps_to_bps(5);
    cfg.best_effort_floor_bps = gbps_to_bps(0.1);
    std::vector<Flow> flows{provisioned("pri", subpath(0, 1), 7),
                            best_effort("bg", subpath(0, 1))};
    auto rates = compute_rates(topo, flows, cfg);
    // Residual 10 - 7 = 3, below the 5 Gb/s cap: best effort gets 3.
    CHECK(rates.at("pri") == doctest::Approx(gbps_to_bps(7)));
    CHECK(rates.at("bg") == doctest::Approx(gbps_to_bps(3)));
}

TEST_CASE("equal sharing without provisions") {
    Topology topo = chain({10});
    SimConfig cfg;
    std::vector<Flow> flows;
    for (int i = 0; i < 4; ++i) {
        flows.push_back(best_effort("f" + std::to_string(i), subpath(0, 1)));
    }
    auto rates = compute_rates(topo, flows, cfg);
    for (const auto& flow : flows) {
        CHECK(rates.at(flow.id) == doctest::Approx(gbps_to_bps(2.5)));
    }
}

TEST_CASE("bottleneck sharing leaves headroom on the wide link") {
    // A-B at 10, B-C at 4; both flows cross B-C and split it evenly.
    Topology topo = chain({10, 4});
    SimConfig cfg;
    std::vector<Flow> flows{best_effort("ac", subpath(0, 2)), best_effort("bc", subpath(1, 2))};
    auto rates = compute_rates(topo, flows, cfg);
    CHECK(rates.at("ac") == doctest::Approx(gbps_to_bps(2)));
    CHECK(rates.at("bc") == doctest::Approx(gbps_to_bps(2)));
}

TEST_CASE("infeasible provisions abort") {
    Topology topo = chain({10});
    SimConfig cfg;
    std::vector<Flow> flows{provisioned("a", subpath(0, 1), 6),
                            provisioned("b", subpath(0, 1), 6)};
    CHECK(error_kind([&] { compute_rates(topo, flows, cfg); }) == "InfeasibleProvisions");
}

TEST_CASE("floors that do not fit scale back proportionally") {
    Topology topo = chain({10});
    SimConfig cfg;
    cfg.best_effort_cap_under_provision_bps = gbps_to_bps(5);
    cfg.best_effort_floor_bps = gbps_to_bps(2);
    std::vector<Flow> flows{provisioned("pri", subpath(0, 1), 9),
                            best_effort("x", subpath(0, 1)), best_effort("y", subpath(0, 1))};
    auto rates = compute_rates(topo, flows, cfg);
    // Residual 1 cannot carry two 2 Gb/s floors; each flow gets 0.5.
    CHECK(rates.at("x") == doctest::Approx(gbps_to_bps(0.5)));
    CHECK(rates.at("y") == doctest::Approx(gbps_to_bps(0.5)));
}

TEST_CASE("work-conserving provisions may claim the leftover share") {
    Topology topo = chain({10});
    SimConfig cfg;
    cfg.work_conserving = true;
    std::vector<Flow> flows{provisioned("pri", subpath(0, 1), 7)};
    auto rates = compute_rates(topo, flows, cfg);
    CHECK(rates.at("pri") == doctest::Approx(gbps_to_bps(10)));
}

TEST_CASE("random instances match the brute-force oracle") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> link_count(1, 5);
        int links = link_count(rng);
        std::vector<double> capacities;
        for (int i = 0; i < links; ++i) {
            capacities.push_back(5.0 + 95.0 * uniform(rng));
        }
        Topology topo = chain(capacities);

        SimConfig cfg;
        if (uniform(rng) < 0.5) {
            cfg.best_effort_cap_under_provision_bps = gbps_to_bps(1.0 + 9.0 * uniform(rng));
        }
        if (uniform(rng) < 0.3) {
            cfg.best_effort_floor_bps =
                std::min(cfg.best_effort_cap_under_provision_bps, gbps_to_bps(0.5 * uniform(rng)));
        }

        std::map<LinkKey, double> budget;
        for (const auto& [link, capacity] : topo.links()) {
            budget[link] = 0.75 * capacity;
        }
        std::uniform_int_distribution<int> flow_count(1, 6);
        std::vector<Flow> flows;
        int n = flow_count(rng);
        for (int i = 0; i < n; ++i) {
            std::uniform_int_distribution<int> node(0, links);
            int a = node(rng);
            int b = node(rng);
            if (a == b) continue;
            Path path = subpath(static_cast<std::size_t>(std::min(a, b)),
                                static_cast<std::size_t>(std::max(a, b)));
            std::string id = "f" + std::to_string(i);
            if (uniform(rng) < 0.3) {
                double room = kUnbounded;
                for (const auto& link : path.links()) {
                    room = std::min(room, budget[link]);
                }
                if (room > gbps_to_bps(0.2)) {
                    double rate = gbps_to_bps(0.1) + (room - gbps_to_bps(0.1)) * uniform(rng);
                    for (const auto& link : path.links()) {
                        budget[link] -= rate;
                    }
                    Flow flow = provisioned(id, path, bps_to_gbps(rate));
                    flows.push_back(flow);
                    continue;
                }
            }
            flows.push_back(best_effort(id, path, uniform(rng) < 0.3 ? 0.0
                                                                     : 0.5 + 49.5 * uniform(rng)));
        }

        auto fast = compute_rates(topo, flows, cfg);
        auto slow = oracle_rates(topo, flows, cfg, {});
        for (const auto& flow : flows) {
            CHECK_MESSAGE(close_rel(fast.at(flow.id), slow.at(flow.id), 1e-9),
                          "trial ", trial, " flow ", flow.id, " fast=", fast.at(flow.id),
                          " oracle=", slow.at(flow.id));
        }

        // Conservation on every link.
        for (const auto& [link, capacity] : topo.links()) {
            double used = 0.0;
            for (const auto& flow : flows) {
                for (const auto& fl : flow.path.links()) {
                    if (fl == link) used += fast.at(flow.id);
                }
            }
            CHECK(used <= capacity * (1 + 1e-9) + 1e-3);
        }

        // Max-min certificate (floor-free instances): a best-effort flow held
        // below its cap sits on a saturated link where it is among the
        // largest shares.
        if (cfg.best_effort_floor_bps == 0.0) {
            for (const auto& flow : flows) {
                if (flow.klass != FlowClass::best_effort) continue;
                double cap = flow.demand_cap_bps;
                for (const auto& link : flow.path.links()) {
                    bool shares_provision = false;
                    for (const auto& other : flows) {
                        if (other.klass != FlowClass::provisioned) continue;
                        for (const auto& ol : other.path.links()) {
                            if (ol == link) shares_provision = true;
                        }
                    }
                    if (shares_provision) {
                        cap = std::min(cap, cfg.best_effort_cap_under_provision_bps);
                    }
                }
                double rate = fast.at(flow.id);
                if (rate >= cap - 1e-3) continue;
                bool certified = false;
                for (const auto& link : flow.path.links()) {
                    double used = 0.0;
                    double best_peer = 0.0;
                    for (const auto& other : flows) {
                        for (const auto& ol : other.path.links()) {
                            if (ol == link) {
                                used += fast.at(other.id);
                                if (other.klass == FlowClass::best_effort) {
                                    best_peer = std::max(best_peer, fast.at(other.id));
                                }
                            }
                        }
                    }
                    if (used >= topo.link_capacity(link) - 1e-3 && rate >= best_peer - 1e-3) {
                        certified = true;
                        break;
                    }
                }
                CHECK_MESSAGE(certified, "trial ", trial, " flow ", flow.id,
                              " lacks a max-min bottleneck certificate");
            }
        }
    }
}

TEST_CASE("regression replay: capped best effort around a 7 Gb/s provision") {
    MiniScenario m = backbone_pair();
    Scheduler sched(m.topo, m.sites, m.scheduler);
    RunResult result = run(m.topo, sched, regression_trace(), m.sim);

    // Provision active at t=120, done after 6000/7 seconds.
    REQUIRE(result.completions.size() >= 1);
    const CompletionRecord* priority = nullptr;
    for (const auto& record : result.completions) {
        if (record.flow_id == "r1") priority = &record;
    }
    REQUIRE(priority != nullptr);
    CHECK(priority->started_at == doctest::Approx(120.0));
    CHECK(priority->completed_at == doctest::Approx(120.0 + 6000.0 / 7.0).epsilon(1e-9));

    CHECK(rate_at(result.timeline, "bg", 30.0) == doctest::Approx(gbps_to_bps(9.2)));
    CHECK(rate_at(result.timeline, "bg", 500.0) == doctest::Approx(gbps_to_bps(5.0)));
    CHECK(rate_at(result.timeline, "bg", 1100.0) == doctest::Approx(gbps_to_bps(9.2)));
    CHECK(rate_at(result.timeline, "r1", 500.0) == doctest::Approx(gbps_to_bps(7.0)));

    REQUIRE(result.ledger.size() == 1);
    const PromiseLedgerEntry& entry = result.ledger[0];
    CHECK(entry.state == PromiseState::completed);
    CHECK(entry.promised_bytes == doctest::Approx(gb_to_bytes(750)).epsilon(1e-9));
    CHECK(entry.achieved_bytes == doctest::Approx(gb_to_bytes(750)).epsilon(1e-9));
}

TEST_CASE("an empty trace produces an empty run") {
    MiniScenario m = backbone_pair();
    Scheduler sched(m.topo, m.sites, m.scheduler);
    RunResult result = run(m.topo, sched, {}, m.sim);
    CHECK(result.timeline.empty());
    CHECK(result.completions.empty());
    CHECK(result.ledger.empty());
}

TEST_CASE("sequential provisions on a shared segment serialize") {
    Topology topo;
    topo.add_node("ucsd", NodeKind::site);
    topo.add_node("caltech", NodeKind::site);
    topo.add_link("ucsd", "caltech", gbps_to_bps(10));
    std::map<std::string, Site> sites{
        {"ucsd", make_site("ucsd", gbps_to_bps(10), 8)},
        {"caltech", make_site("caltech", gbps_to_bps(10), 8)}};
    SchedulerConfig scfg;
    scfg.setup_delay_s = 60.0;
    SimConfig cfg;
    cfg.horizon_s = 4000.0;
    Scheduler sched(topo, sites, scfg);
    auto trace = parse_trace_text(
        R"({"at": 0, "kind": "request", "id": "r1", "src": "ucsd", "dst": "caltech", "volume_gb": 750, "priority": 5, "requested_rate_gbps": 7}
{"at": 1, "kind": "request", "id": "r2", "src": "ucsd", "dst": "caltech", "volume_gb": 750, "priority": 5, "requested_rate_gbps": 7}
)");
    RunResult result = run(topo, sched, trace, cfg);
    REQUIRE(result.completions.size() == 2);
    double first_done = 60.0 + 6000.0 / 7.0;  // arrival at t=0, setup 60 s
    CHECK(result.completions[0].flow_id == "r1");
    CHECK(result.completions[0].completed_at == doctest::Approx(first_done).epsilon(1e-9));
    // r2 is granted only at r1's completion review, and then needs setup.
    CHECK(result.completions[1].flow_id == "r2");
    CHECK(result.completions[1].started_at ==
          doctest::Approx(first_done + 60.0).epsilon(1e-9));
    CHECK(result.completions[1].completed_at ==
          doctest::Approx(first_done + 60.0 + 6000.0 / 7.0).epsilon(1e-9));
}

TEST_CASE("free-for-all may exceed the reserved fraction when idle") {
    Topology topo = chain({10});
    std::map<std::string, Site> sites{{"n0", make_site("n0", gbps_to_bps(10), 8)},
                                      {"n1", make_site("n1", gbps_to_bps(10), 8)}};
    SchedulerConfig scfg;
    SimConfig cfg;
    cfg.horizon_s = 20.0;
    Scheduler sched(topo, sites, scfg);
    auto trace = parse_trace_text(
        R"({"at": 0, "kind": "load_start", "id": "bg", "src": "n0", "dst": "n1"}
)");
    RunResult result = run(topo, sched, trace, cfg);
    // With no provisions the single flow takes the full link: 10 Gb/s,
    // four times the 25% reservation.
    CHECK(rate_at(result.timeline, "bg", 10.0) == doctest::Approx(gbps_to_bps(10)));
}

TEST_CASE("volume accounting: integrated timeline equals the transferred volume") {
    MiniScenario m = backbone_pair();
    Scheduler sched(m.topo, m.sites, m.scheduler);
    RunResult result = run(m.topo, sched, regression_trace(), m.sim);
    const CompletionRecord* priority = nullptr;
    for (const auto& record : result.completions) {
        if (record.flow_id == "r1") priority = &record;
    }
    REQUIRE(priority != nullptr);
    double integrated = integrate_samples(series_of(result.timeline, "r1"),
                                          priority->started_at, priority->completed_at);
    CHECK(close_rel(integrated, priority->volume_bytes, 1e-6));
}

TEST_CASE("per-link conservation holds at every sample instant") {
    MiniScenario m = backbone_pair();
    Scheduler sched(m.topo, m.sites, m.scheduler);
    RunResult result = run(m.topo, sched, regression_trace(), m.sim);
    std::set<double> instants;
    for (const auto& sample : result.timeline) {
        instants.insert(sample.at);
    }
    std::map<std::string, Path> paths{
        {"bg", shortest_path(m.topo, "ucsd", "caltech")},
        {"r1", shortest_path(m.topo, "ucsd", "caltech")}};
    for (double t : instants) {
        std::map<LinkKey, double> used;
        for (const auto& [flow_id, path] : paths) {
            double rate = rate_at(result.timeline, flow_id, t);
            for (const auto& link : path.links()) {
                used[link] += rate;
            }
        }
        for (const auto& [link, total] : used) {
            CHECK(total <= m.topo.link_capacity(link) * (1 + 1e-9) + 1e-3);
        }
    }
}

TEST_CASE("cancelling an active transfer frees the path mid-flight") {
    MiniScenario m = backbone_pair();
    Scheduler sched(m.topo, m.sites, m.scheduler);
    auto trace = parse_trace_text(
        R"({"at": 0, "kind": "load_start", "id": "bg", "src": "ucsd", "dst": "caltech", "demand_cap_gbps": 9.2}
{"at": 60, "kind": "request", "id": "r1", "src": "ucsd", "dst": "caltech", "volume_gb": 750, "priority": 9, "requested_rate_gbps": 7}
{"at": 300, "kind": "cancel", "id": "r1"}
)");
    RunResult result = run(m.topo, sched, trace, m.sim);
    bool r1_completed = false;
    for (const auto& record : result.completions) {
        r1_completed = r1_completed || record.flow_id == "r1";
    }
    CHECK_FALSE(r1_completed);
    REQUIRE(result.ledger.size() == 1);
    CHECK(result.ledger[0].state == PromiseState::cancelled);
    CHECK(result.ledger[0].activated);
    CHECK(result.ledger[0].closed_at == doctest::Approx(300.0));
    // 180 s at 7 Gb/s promised and delivered before the cancellation.
    CHECK(result.ledger[0].promised_bytes ==
          doctest::Approx(gbps_to_bps(7) * 180.0 / 8.0).epsilon(1e-9));
    CHECK(close_rel(result.ledger[0].achieved_bytes, result.ledger[0].promised_bytes, 1e-9));
    CHECK(rate_at(result.timeline, "bg", 500.0) == doctest::Approx(gbps_to_bps(9.2)));
}

TEST_CASE("degraded links make a promise under-deliver and the leftover drains best effort") {
    MiniScenario m = backbone_pair();
    Scheduler sched(m.topo, m.sites, m.scheduler);
    std::map<LinkKey, double> efficiency{{LinkKey("west", "east"), 0.9}};
    auto trace = parse_trace_text(
        R"({"at": 0, "kind": "request", "id": "r1", "src": "ucsd", "dst": "caltech", "volume_gb": 750, "priority": 9, "requested_rate_gbps": 7}
)");
    SimConfig cfg = m.sim;
    cfg.horizon_s = 3000.0;
    RunResult result = run(m.topo, sched, trace, cfg, efficiency);
    REQUIRE(result.ledger.size() == 1);
    const PromiseLedgerEntry& entry = result.ledger[0];
    CHECK(entry.state == PromiseState::completed);
    // Promised the full volume, delivered 90% of it within the window.
    CHECK(close_rel(entry.achieved_bytes / entry.promised_bytes, 0.9, 1e-9));
    PromiseReport report = reconcile(entry, 0.05);
    CHECK_FALSE(report.fulfilled);
    CHECK(report.deficit == doctest::Approx(0.1).epsilon(1e-9));
    // The remaining 10% still arrives, just without a promise behind it.
    REQUIRE(result.completions.size() == 1);
    CHECK(result.completions[0].flow_id == "r1");
    CHECK(result.completions[0].klass == FlowClass::best_effort);
    double integrated = integrate_samples(series_of(result.timeline, "r1"),
                                          result.completions[0].started_at,
                                          result.completions[0].completed_at);
    CHECK(close_rel(integrated, gb_to_bytes(750), 1e-6));
}

TEST_CASE("work-conserving runs report utilization above one") {
    Topology topo = chain({10});
    std::map<std::string, Site> sites{{"n0", make_site("n0", gbps_to_bps(10), 8)},
                                      {"n1", make_site("n1", gbps_to_bps(10), 8)}};
    SchedulerConfig scfg;
    SimConfig cfg;
    cfg.work_conserving = true;
    cfg.horizon_s = 2000.0;
    Scheduler sched(topo, sites, scfg);
    auto trace = parse_trace_text(
        R"({"at": 0, "kind": "request", "id": "r1", "src": "n0", "dst": "n1", "volume_gb": 750, "priority": 9, "requested_rate_gbps": 7}
)");
    RunResult result = run(topo, sched, trace, cfg);
    REQUIRE(result.ledger.size() == 1);
    PromiseReport report = reconcile(result.ledger[0], 0.05);
    CHECK(report.utilization > 1.0);
    CHECK(report.fulfilled);
}

TEST_CASE("a mid-flight squeeze reshapes rates, windows and the ledger consistently") {
    Topology topo;
    topo.add_node("ucsd", NodeKind::site);
    topo.add_node("caltech", NodeKind::site);
    topo.add_link("ucsd", "caltech", gbps_to_bps(10));
    std::map<std::string, Site> sites{
        {"ucsd", make_site("ucsd", gbps_to_bps(10), 8)},
        {"caltech", make_site("caltech", gbps_to_bps(10), 8)}};
    SchedulerConfig scfg;
    scfg.setup_delay_s = 60.0;
    SimConfig cfg;
    cfg.horizon_s = 8000.0;
    Scheduler sched(topo, sites, scfg);
    // Low-priority bulk first; an urgent request lands mid-transfer.
    auto trace = parse_trace_text(
        R"({"at": 0, "kind": "request", "id": "bulk", "src": "ucsd", "dst": "caltech", "volume_gb": 750, "priority": 0, "requested_rate_gbps": 7}
{"at": 300, "kind": "request", "id": "urgent", "src": "ucsd", "dst": "caltech", "volume_gb": 100, "priority": 9, "requested_rate_gbps": 6.5}
)");
    RunResult result = run(topo, sched, trace, cfg);

    // bulk: 7 Gb/s for 240 s after setup, squeezed to 1 Gb/s while the
    // urgent transfer runs, raised back to 7 once it completes.
    double urgent_done = 360.0 + 800.0 / 6.5;
    CHECK(rate_at(result.timeline, "bulk", 200.0) == doctest::Approx(gbps_to_bps(7)));
    CHECK(rate_at(result.timeline, "bulk", 301.0) == doctest::Approx(gbps_to_bps(1)));
    CHECK(rate_at(result.timeline, "urgent", 400.0) == doctest::Approx(gbps_to_bps(6.5)));
    CHECK(rate_at(result.timeline, "bulk", urgent_done + 1.0) ==
          doctest::Approx(gbps_to_bps(7)));

    // Two squeeze adjustments (the reduction and the enabled admission),
    // then one capacity_freed raise at the urgent completion.
    int squeezes = 0;
    int raises = 0;
    for (const auto& adjustment : result.adjustments) {
        if (adjustment.reason == AdjustReason::preemption_squeeze) squeezes += 1;
        if (adjustment.reason == AdjustReason::capacity_freed) raises += 1;
    }
    CHECK(squeezes == 2);
    CHECK(raises == 1);

    // Despite the reshaping, both transfers complete and account exactly.
    REQUIRE(result.completions.size() == 2);
    for (const auto& record : result.completions) {
        double integrated = integrate_samples(series_of(result.timeline, record.flow_id),
                                              record.started_at, record.completed_at);
        CHECK(close_rel(integrated, record.volume_bytes, 1e-6));
    }
    // 210 GB at 7 Gb/s, 22.88 GB at 1 Gb/s, and the rest at 7 again.
    const CompletionRecord* bulk = nullptr;
    for (const auto& record : result.completions) {
        if (record.flow_id == "bulk") bulk = &record;
    }
    REQUIRE(bulk != nullptr);
    double squeezed_gb = gbps_to_bps(1) * (urgent_done - 300.0) / 8.0 / 1e9;
    double tail = 8.0 * gb_to_bytes(750.0 - 210.0 - squeezed_gb) / gbps_to_bps(7);
    CHECK(bulk->completed_at == doctest::Approx(urgent_done + tail).epsilon(1e-9));

    // The ledger accrues the promised rate piecewise across both changes and
    // the flow tracks it exactly: no deficit.
    for (const auto& entry : result.ledger) {
        if (entry.request_id == "bulk") {
            CHECK(entry.promised_bytes == doctest::Approx(gb_to_bytes(750)).epsilon(1e-9));
            CHECK(close_rel(entry.achieved_bytes, entry.promised_bytes, 1e-9));
        }
    }
}

TEST_CASE("a squeeze may take from several victims on different links") {
    // Path s1-hub-s2 shares its first link with v1 and its second with v2.
    Topology topo;
    topo.add_node("s1", NodeKind::site);
    topo.add_node("s2", NodeKind::site);
    topo.add_node("s3", NodeKind::site);
    topo.add_node("s4", NodeKind::site);
    topo.add_node("hub", NodeKind::router);
    for (const char* name : {"s1", "s2", "s3", "s4"}) {
        topo.add_link(name, "hub", gbps_to_bps(10));
    }
    std::map<std::string, Site> sites;
    for (const char* name : {"s1", "s2", "s3", "s4"}) {
        sites.emplace(name, make_site(name, gbps_to_bps(10), 8));
    }
    SchedulerConfig scfg;
    Scheduler sched(topo, sites, scfg);

    auto submit = [&](const char* id, const char* src, const char* dst, int priority,
                      double rate_gbps, double at) {
        TransferRequest req;
        req.id = id;
        req.src = src;
        req.dst = dst;
        req.volume_bytes = gb_to_bytes(500);
        req.priority = priority;
        req.requested_rate_bps = gbps_to_bps(rate_gbps);
        req.submitted_at = at;
        sched.submit(req);
    };
    submit("v1", "s1", "s3", 1, 7, 0.0);  // occupies s1--hub
    submit("v2", "s4", "s2", 1, 7, 0.1);  // occupies hub--s2
    sched.review(0.0);
    REQUIRE(sched.pending_requests().empty());

    submit("big", "s1", "s2", 8, 7, 1.0);  // needs both contested links
    ReviewOutcome outcome = sched.review(1.0);
    REQUIRE(outcome.granted_promise_ids.size() == 1);
    const Promise& granted = sched.promise(outcome.granted_promise_ids[0]);
    CHECK(granted.rate_bps == doctest::Approx(gbps_to_bps(6.5)));
    // Both victims were reduced, each only as far as needed.
    int reductions = 0;
    for (const auto& adjustment : outcome.adjustments) {
        if (adjustment.old_rate_bps > 0.0) {
            reductions += 1;
            CHECK(adjustment.new_rate_bps == doctest::Approx(gbps_to_bps(1.0)));
            CHECK(adjustment.reason == AdjustReason::preemption_squeeze);
        }
    }
    CHECK(reductions == 2);
}

TEST_CASE("zero-volume requests complete instantly in a run") {
    Topology topo = chain({10});
    std::map<std::string, Site> sites{{"n0", make_site("n0", gbps_to_bps(10), 8)},
                                      {"n1", make_site("n1", gbps_to_bps(10), 8)}};
    SchedulerConfig scfg;
    SimConfig cfg;
    cfg.horizon_s = 100.0;
    Scheduler sched(topo, sites, scfg);
    auto trace = parse_trace_text(
        R"({"at": 5, "kind": "request", "id": "nothing", "src": "n0", "dst": "n1", "volume_gb": 0, "priority": 5}
)");
    RunResult result = run(topo, sched, trace, cfg);
    REQUIRE(result.completions.size() == 1);
    CHECK(result.completions[0].flow_id == "nothing");
    CHECK(result.completions[0].volume_bytes == 0.0);
    CHECK(result.completions[0].started_at == 5.0);
    CHECK(result.completions[0].completed_at == 5.0);
    CHECK(result.ledger.empty());
}

TEST_CASE("identical runs yield identical timelines") {
    auto once = [] {
        MiniScenario m = backbone_pair();
        Scheduler sched(m.topo, m.sites, m.scheduler);
        return run(m.topo, sched, regression_trace(), m.sim);
    };
    RunResult a = once();
    RunResult b = once();
    REQUIRE(a.timeline.size() == b.timeline.size());
    for (std::size_t i = 0; i < a.timeline.size(); ++i) {
        CHECK(a.timeline[i].at == b.timeline[i].at);
        CHECK(a.timeline[i].flow_id == b.timeline[i].flow_id);
        CHECK(a.timeline[i].rate_bps == b.timeline[i].rate_bps);
    }
}

}  // TEST_SUITE
