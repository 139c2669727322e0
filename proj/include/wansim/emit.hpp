#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wansim/scenario.hpp"

namespace wansim {

// timeline.csv: header `time_s,flow_id,class,rate_gbps`, rows in
// (time, flow_id) order, directly plottable as step curves.
std::string emit_timeline_csv(const std::vector<ThroughputSample>& timeline);

nlohmann::json emit_completions(const std::vector<CompletionRecord>& completions);
nlohmann::json emit_ledger(const std::vector<PromiseLedgerEntry>& ledger,
                           const std::vector<PromiseAdjustment>& adjustments);
nlohmann::json emit_reports(const ScenarioOutputs& outputs, const AccountingConfig& accounting);
nlohmann::json emit_systematic(const std::vector<SystematicReport>& reports);

// Reads a ledger.json back for standalone re-analysis.
std::pair<std::vector<PromiseLedgerEntry>, std::vector<PromiseAdjustment>> parse_ledger(
    const nlohmann::json& doc);

// Writes timeline.csv, completions.json, ledger.json and reports.json.
// Errors: SinkUnwritable.
void write_outputs(const ScenarioOutputs& outputs, const AccountingConfig& accounting,
                   const std::filesystem::path& directory);

}  // namespace wansim
