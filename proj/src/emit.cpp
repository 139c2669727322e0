#include "wansim/emit.hpp"

#include <cstdio>
#include <fstream>

#include "wansim/errors.hpp"

namespace wansim {

using nlohmann::json;

namespace {

std::string fixed6(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

const char* to_string(PromiseState state) {
    switch (state) {
        case PromiseState::pending: return "pending";
        case PromiseState::active: return "active";
        case PromiseState::completed: return "completed";
        case PromiseState::cancelled: return "cancelled";
    }
    return "unknown";
}

PromiseState state_from_string(const std::string& text) {
    if (text == "pending") return PromiseState::pending;
    if (text == "active") return PromiseState::active;
    if (text == "completed") return PromiseState::completed;
    if (text == "cancelled") return PromiseState::cancelled;
    fail_validation("MalformedDocument", "unknown promise state '" + text + "'");
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        fail_runtime("SinkUnwritable", "cannot write '" + file.string() + "'");
    }
    out << content;
    if (!out) {
        fail_runtime("SinkUnwritable", "short write to '" + file.string() + "'");
    }
}

}  // namespace

std::string emit_timeline_csv(const std::vector<ThroughputSample>& timeline) {
    std::string out = "time_s,flow_id,class,rate_gbps\n";
    for (const auto& sample : timeline) {
        out += fixed6(sample.at);
        out += ',';
        out += sample.flow_id;
        out += ',';
        out += to_string(sample.klass);
        out += ',';
        out += fixed6(bps_to_gbps(sample.rate_bps));
        out += '\n';
    }
    return out;
}

json emit_completions(const std::vector<CompletionRecord>& completions) {
    json list = json::array();
    for (const auto& record : completions) {
        list.push_back({{"flow_id", record.flow_id},
                        {"class", to_string(record.klass)},
                        {"src", record.src},
                        {"dst", record.dst},
                        {"volume_gb", bytes_to_gb(record.volume_bytes)},
                        {"started_at_s", record.started_at},
                        {"completed_at_s", record.completed_at},
                        {"request_id", record.request_id}});
    }
    return json{{"format_version", 1}, {"completions", list}};
}

json emit_ledger(const std::vector<PromiseLedgerEntry>& ledger,
                 const std::vector<PromiseAdjustment>& adjustments) {
    json promises = json::array();
    for (const auto& entry : ledger) {
        promises.push_back({{"promise_id", entry.promise_id},
                            {"request_id", entry.request_id},
                            {"state", to_string(entry.state)},
                            {"activated", entry.activated},
                            {"rate_gbps", bps_to_gbps(entry.rate_bps)},
                            {"start_s", entry.start},
                            {"end_s", entry.end},
                            {"closed_at_s", entry.closed_at},
                            {"path", entry.path.hops},
                            {"promised_gb", bytes_to_gb(entry.promised_bytes)},
                            {"achieved_gb", bytes_to_gb(entry.achieved_bytes)}});
    }
    json changes = json::array();
    for (const auto& adjustment : adjustments) {
        changes.push_back({{"promise_id", adjustment.promise_id},
                           {"old_rate_gbps", bps_to_gbps(adjustment.old_rate_bps)},
                           {"new_rate_gbps", bps_to_gbps(adjustment.new_rate_bps)},
                           {"new_end_s", adjustment.new_end},
                           {"reason", to_string(adjustment.reason)},
                           {"at_s", adjustment.at}});
    }
    return json{{"format_version", 1}, {"promises", promises}, {"adjustments", changes}};
}

json emit_systematic(const std::vector<SystematicReport>& reports) {
    json list = json::array();
    for (const auto& report : reports) {
        list.push_back({{"key", report.key},
                        {"promise_count", report.promise_count},
                        {"mean_deficit", report.mean_deficit},
                        {"flagged", report.flagged}});
    }
    return list;
}

json emit_reports(const ScenarioOutputs& outputs, const AccountingConfig& accounting) {
    json promise_reports = json::array();
    for (const auto& report : outputs.promise_reports) {
        promise_reports.push_back({{"promise_id", report.promise_id},
                                   {"fulfilled", report.fulfilled},
                                   {"utilization", report.utilization},
                                   {"deficit", report.deficit}});
    }
    return json{{"format_version", 1},
                {"deficit_threshold", accounting.deficit_threshold},
                {"min_samples", accounting.min_samples},
                {"promise_reports", promise_reports},
                {"systematic",
                 {{"route", emit_systematic(outputs.route_reports)},
                  {"segment", emit_systematic(outputs.segment_reports)},
                  {"site", emit_systematic(outputs.site_reports)}}}};
}

std::pair<std::vector<PromiseLedgerEntry>, std::vector<PromiseAdjustment>> parse_ledger(
    const json& doc) {
    if (!doc.is_object() || !doc.contains("promises") || !doc["promises"].is_array()) {
        fail_validation("MalformedDocument", "ledger requires a 'promises' array");
    }
    std::vector<PromiseLedgerEntry> entries;
    for (const auto& obj : doc["promises"]) {
        PromiseLedgerEntry entry;
        try {
            entry.promise_id = obj.at("promise_id").get<std::string>();
            entry.request_id = obj.at("request_id").get<std::string>();
            entry.state = state_from_string(obj.at("state").get<std::string>());
            entry.activated = obj.at("activated").get<bool>();
            entry.rate_bps = gbps_to_bps(obj.at("rate_gbps").get<double>());
            entry.start = obj.at("start_s").get<double>();
            entry.end = obj.at("end_s").get<double>();
            entry.closed_at = obj.at("closed_at_s").get<double>();
            entry.path.hops = obj.at("path").get<std::vector<std::string>>();
            entry.promised_bytes = gb_to_bytes(obj.at("promised_gb").get<double>());
            entry.achieved_bytes = gb_to_bytes(obj.at("achieved_gb").get<double>());
        } catch (const json::exception& err) {
            fail_validation("MalformedDocument", std::string("ledger entry: ") + err.what());
        }
        entries.push_back(std::move(entry));
    }
    std::vector<PromiseAdjustment> adjustments;
    if (doc.contains("adjustments")) {
        for (const auto& obj : doc["adjustments"]) {
            PromiseAdjustment adjustment;
            try {
                adjustment.promise_id = obj.at("promise_id").get<std::string>();
                adjustment.old_rate_bps = gbps_to_bps(obj.at("old_rate_gbps").get<double>());
                adjustment.new_rate_bps = gbps_to_bps(obj.at("new_rate_gbps").get<double>());
                adjustment.new_end = obj.at("new_end_s").get<double>();
                adjustment.at = obj.at("at_s").get<double>();
                std::string reason = obj.at("reason").get<std::string>();
                if (reason == "demand_change") {
                    adjustment.reason = AdjustReason::demand_change;
                } else if (reason == "capacity_freed") {
                    adjustment.reason = AdjustReason::capacity_freed;
                } else if (reason == "preemption_squeeze") {
                    adjustment.reason = AdjustReason::preemption_squeeze;
                } else {
                    fail_validation("MalformedDocument", "unknown adjustment reason '" + reason + "'");
                }
            } catch (const json::exception& err) {
                fail_validation("MalformedDocument", std::string("ledger adjustment: ") + err.what());
            }
            adjustments.push_back(std::move(adjustment));
        }
    }
    return {std::move(entries), std::move(adjustments)};
}

void write_outputs(const ScenarioOutputs& outputs, const AccountingConfig& accounting,
                   const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        fail_runtime("SinkUnwritable", "cannot create '" + directory.string() + "'");
    }
    write_file(directory / "timeline.csv", emit_timeline_csv(outputs.run.timeline));
    write_file(directory / "completions.json", emit_completions(outputs.run.completions).dump(2) + "\n");
    write_file(directory / "ledger.json",
               emit_ledger(outputs.run.ledger, outputs.run.adjustments).dump(2) + "\n");
    write_file(directory / "reports.json", emit_reports(outputs, accounting).dump(2) + "\n");
}

}  // namespace wansim
