#include "wansim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wansim/errors.hpp"

namespace wansim {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        fail_validation("MissingFile", "cannot open '" + file.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& err) {
        fail_validation("MalformedDocument", file.string() + ": " + err.what());
    }
}

double get_number(const json& obj, const char* field, double fallback) {
    if (!obj.contains(field)) {
        return fallback;
    }
    if (!obj[field].is_number()) {
        fail_validation("MalformedScenario", std::string("'") + field + "' must be a number");
    }
    return obj[field].get<double>();
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& file) {
    json doc = read_json_file(file);
    if (!doc.is_object()) {
        fail_validation("MalformedScenario", "scenario must be a JSON object");
    }
    if (doc.contains("format_version") && doc["format_version"].get<int>() != 1) {
        fail_validation("MalformedScenario", "unsupported scenario format_version");
    }
    std::filesystem::path base = file.has_parent_path() ? file.parent_path() : ".";

    Scenario scenario;

    if (!doc.contains("topology")) {
        fail_validation("MalformedScenario", "scenario requires 'topology'");
    }
    if (doc["topology"].is_string()) {
        scenario.topology =
            load_topology(read_json_file(base / doc["topology"].get<std::string>()));
    } else {
        scenario.topology = load_topology(doc["topology"]);
    }

    if (doc.contains("sites")) {
        if (!doc["sites"].is_array()) {
            fail_validation("MalformedScenario", "'sites' must be an array");
        }
        for (const auto& entry : doc["sites"]) {
            SiteDecl site;
            if (!entry.contains("name") || !entry["name"].is_string()) {
                fail_validation("MalformedScenario", "site declaration requires 'name'");
            }
            site.name = entry["name"].get<std::string>();
            site.bandwidth_limit_bps = gbps_to_bps(get_number(entry, "bandwidth_limit_gbps", 0.0));
            site.slot_count = static_cast<int>(get_number(entry, "slot_count", 8));
            scenario.sites.push_back(std::move(site));
        }
    }

    if (doc.contains("scheduler")) {
        const json& sched = doc["scheduler"];
        SchedulerConfig& cfg = scenario.scheduler;
        cfg.reserved_fraction = get_number(sched, "reserved_fraction", cfg.reserved_fraction);
        cfg.minimum_grant_bps =
            gbps_to_bps(get_number(sched, "minimum_grant_gbps", bps_to_gbps(cfg.minimum_grant_bps)));
        cfg.review_interval_s = get_number(sched, "review_interval_s", cfg.review_interval_s);
        cfg.setup_delay_s = get_number(sched, "setup_delay_s", cfg.setup_delay_s);
        if (sched.contains("policy")) {
            cfg.policy = sched["policy"].get<std::string>();
        }
        if (sched.contains("reserved_fraction_overrides")) {
            for (const auto& entry : sched["reserved_fraction_overrides"]) {
                LinkKey key(entry.at("a").get<std::string>(), entry.at("b").get<std::string>());
                cfg.reserved_fraction_overrides[key] = entry.at("fraction").get<double>();
            }
        }
    }

    if (doc.contains("sim")) {
        const json& sim = doc["sim"];
        SimConfig& cfg = scenario.sim;
        cfg.measurement_interval_s =
            get_number(sim, "measurement_interval_s", cfg.measurement_interval_s);
        if (sim.contains("best_effort_cap_under_provision_gbps")) {
            cfg.best_effort_cap_under_provision_bps =
                gbps_to_bps(sim["best_effort_cap_under_provision_gbps"].get<double>());
        }
        cfg.best_effort_floor_bps =
            gbps_to_bps(get_number(sim, "best_effort_floor_gbps", 0.0));
        if (sim.contains("work_conserving")) {
            cfg.work_conserving = sim["work_conserving"].get<bool>();
        }
        cfg.horizon_s = get_number(sim, "horizon_s", cfg.horizon_s);
    }

    if (doc.contains("accounting")) {
        const json& acc = doc["accounting"];
        scenario.accounting.deficit_threshold =
            get_number(acc, "deficit_threshold", scenario.accounting.deficit_threshold);
        scenario.accounting.min_samples =
            static_cast<int>(get_number(acc, "min_samples", scenario.accounting.min_samples));
    }

    if (doc.contains("trace")) {
        if (doc["trace"].is_string()) {
            std::filesystem::path trace_file = base / doc["trace"].get<std::string>();
            std::ifstream in(trace_file);
            if (!in) {
                fail_validation("MissingFile", "cannot open '" + trace_file.string() + "'");
            }
            scenario.trace = parse_trace(in);
        } else if (doc["trace"].is_array()) {
            std::string text;
            for (const auto& entry : doc["trace"]) {
                text += entry.dump();
                text += '\n';
            }
            scenario.trace = parse_trace_text(text);
        } else {
            fail_validation("MalformedScenario", "'trace' must be a path or an array of records");
        }
    }

    if (doc.contains("degradation")) {
        for (const auto& entry : doc["degradation"]) {
            LinkKey key(entry.at("a").get<std::string>(), entry.at("b").get<std::string>());
            scenario.degradation[key] = entry.at("efficiency").get<double>();
        }
    }

    validate_scenario(scenario);
    return scenario;
}

void validate_scenario(Scenario& scenario) {
    const Topology& topo = scenario.topology;

    std::set<std::string> declared_sites;
    for (auto& site : scenario.sites) {
        if (!topo.has_node(site.name) || topo.node_kind(site.name) != NodeKind::site) {
            fail_validation("UnknownSite",
                            "declared site '" + site.name + "' is not a site node in the topology");
        }
        site.name = topo.resolve(site.name);
        if (!declared_sites.insert(site.name).second) {
            fail_validation("MalformedScenario", "site '" + site.name + "' declared twice");
        }
        if (site.slot_count < 2) {
            fail_validation("MalformedScenario",
                            "site '" + site.name + "' needs slot_count >= 2");
        }
        if (site.bandwidth_limit_bps == 0.0) {
            auto incident = topo.incident_links(site.name);
            if (incident.size() != 1) {
                fail_validation("BandwidthLimitRequired",
                                "site '" + site.name +
                                    "' has no single access link; declare bandwidth_limit_gbps");
            }
            site.bandwidth_limit_bps = topo.link_capacity(incident.front());
        }
        if (!(site.bandwidth_limit_bps > 0.0)) {
            fail_validation("MalformedScenario",
                            "site '" + site.name + "' has non-positive bandwidth limit");
        }
    }

    const SchedulerConfig& sched = scenario.scheduler;
    if (!(sched.reserved_fraction >= 0.0 && sched.reserved_fraction < 1.0)) {
        fail_validation("MalformedScenario", "reserved_fraction must lie in [0, 1)");
    }
    for (const auto& [link, fraction] : sched.reserved_fraction_overrides) {
        if (!topo.has_link(link)) {
            fail_validation("UnknownLink", "reserved_fraction override names unknown link " +
                                               link.a + " -- " + link.b);
        }
        if (!(fraction >= 0.0 && fraction < 1.0)) {
            fail_validation("MalformedScenario", "reserved_fraction override must lie in [0, 1)");
        }
    }
    if (!(sched.minimum_grant_bps > 0.0)) {
        fail_validation("MalformedScenario", "minimum_grant_gbps must be positive");
    }
    if (!(sched.review_interval_s > 0.0)) {
        fail_validation("MalformedScenario", "review_interval_s must be positive");
    }
    if (sched.setup_delay_s < 0.0) {
        fail_validation("MalformedScenario", "setup_delay_s must be non-negative");
    }
    make_policy(sched.policy);  // UnknownPolicy

    const SimConfig& sim = scenario.sim;
    if (sim.measurement_interval_s < 0.0) {
        fail_validation("MalformedScenario", "measurement_interval_s must be non-negative");
    }
    if (!(sim.best_effort_cap_under_provision_bps > 0.0)) {
        fail_validation("MalformedScenario",
                        "best_effort_cap_under_provision_gbps must be positive");
    }
    if (sim.best_effort_floor_bps < 0.0 ||
        sim.best_effort_floor_bps > sim.best_effort_cap_under_provision_bps) {
        fail_validation("MalformedScenario",
                        "best_effort_floor_gbps must lie in [0, best_effort_cap_under_provision]");
    }
    if (!(sim.horizon_s > 0.0)) {
        fail_validation("MalformedScenario", "horizon_s must be positive");
    }

    if (!(scenario.accounting.deficit_threshold >= 0.0 &&
          scenario.accounting.deficit_threshold <= 1.0)) {
        fail_validation("MalformedScenario", "deficit_threshold must lie in [0, 1]");
    }
    if (scenario.accounting.min_samples < 1) {
        fail_validation("MalformedScenario", "min_samples must be at least 1");
    }

    for (const auto& [link, efficiency] : scenario.degradation) {
        if (!topo.has_link(link)) {
            fail_validation("UnknownLink",
                            "degradation names unknown link " + link.a + " -- " + link.b);
        }
        if (!(efficiency > 0.0 && efficiency <= 1.0)) {
            fail_validation("MalformedScenario", "degradation efficiency must lie in (0, 1]");
        }
    }

    // Trace cross-references. Flow ids must be unique across requests and
    // loads so that timeline rows stay unambiguous.
    std::set<std::string> request_ids;
    std::set<std::string> load_ids;
    std::set<std::string> flow_ids;
    for (auto& record : scenario.trace) {
        int line = record.line;
        auto where = [line]() { return "trace line " + std::to_string(line) + ": "; };
        switch (record.kind) {
            case TraceKind::request: {
                TransferRequest& req = record.request;
                for (std::string* endpoint : {&req.src, &req.dst}) {
                    if (!declared_sites.count(topo.has_node(*endpoint) ? topo.resolve(*endpoint)
                                                                       : *endpoint)) {
                        fail_validation("UnknownSite",
                                        where() + "request endpoint '" + *endpoint +
                                            "' is not a declared site");
                    }
                    *endpoint = topo.resolve(*endpoint);
                }
                if (req.src == req.dst) {
                    fail_validation("MalformedRecord", where() + "request endpoints must differ");
                }
                request_ids.insert(req.id);
                if (!flow_ids.insert(req.id).second) {
                    fail_validation("DuplicateId",
                                    where() + "id '" + req.id + "' already used by another flow");
                }
                break;
            }
            case TraceKind::load_start: {
                for (std::string* endpoint : {&record.src, &record.dst}) {
                    if (!topo.has_node(*endpoint)) {
                        fail_validation("UnknownNode", where() + "load endpoint '" + *endpoint +
                                                           "' is not in the topology");
                    }
                    *endpoint = topo.resolve(*endpoint);
                }
                shortest_path(topo, record.src, record.dst);  // NoRoute
                load_ids.insert(record.id);
                if (!flow_ids.insert(record.id).second) {
                    fail_validation("DuplicateId",
                                    where() + "id '" + record.id + "' already used by another flow");
                }
                break;
            }
            case TraceKind::load_stop:
                if (!load_ids.count(record.id)) {
                    fail_validation("MalformedRecord",
                                    where() + "load_stop for unknown load '" + record.id + "'");
                }
                break;
            case TraceKind::cancel:
                if (!request_ids.count(record.id)) {
                    fail_validation("MalformedRecord",
                                    where() + "cancel for unknown request '" + record.id + "'");
                }
                break;
        }
    }
}

std::map<std::string, Site> make_sites(const Scenario& scenario) {
    std::map<std::string, Site> sites;
    for (const auto& decl : scenario.sites) {
        sites.emplace(decl.name, make_site(decl.name, decl.bandwidth_limit_bps, decl.slot_count));
    }
    return sites;
}

ScenarioOutputs run_scenario(Scenario scenario) {
    validate_scenario(scenario);
    Scheduler scheduler(scenario.topology, make_sites(scenario), scenario.scheduler);

    ScenarioOutputs outputs;
    outputs.run = run(scenario.topology, scheduler, scenario.trace, scenario.sim,
                      scenario.degradation);

    for (const auto& entry : outputs.run.ledger) {
        if (reconcilable(entry) && entry.promised_bytes > 0.0) {
            outputs.promise_reports.push_back(
                reconcile(entry, scenario.accounting.deficit_threshold));
        }
    }
    const auto& acc = scenario.accounting;
    outputs.route_reports = aggregate(outputs.promise_reports, outputs.run.ledger,
                                      Grouping::route, acc.min_samples, acc.deficit_threshold);
    outputs.segment_reports = aggregate(outputs.promise_reports, outputs.run.ledger,
                                        Grouping::segment, acc.min_samples, acc.deficit_threshold);
    outputs.site_reports = aggregate(outputs.promise_reports, outputs.run.ledger,
                                     Grouping::site, acc.min_samples, acc.deficit_threshold);
    return outputs;
}

}  // namespace wansim
