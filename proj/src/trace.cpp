#include "wansim/trace.hpp"

#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wansim/errors.hpp"

namespace wansim {

using nlohmann::json;

const char* to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::request: return "request";
        case TraceKind::load_start: return "load_start";
        case TraceKind::load_stop: return "load_stop";
        case TraceKind::cancel: return "cancel";
    }
    return "unknown";
}

namespace {

[[noreturn]] void malformed(int line, const std::string& message) {
    fail_validation("MalformedRecord", "line " + std::to_string(line) + ": " + message);
}

double number_field(const json& obj, const char* field, int line) {
    if (!obj.contains(field) || !obj[field].is_number()) {
        malformed(line, std::string("missing or non-numeric '") + field + "'");
    }
    return obj[field].get<double>();
}

std::string string_field(const json& obj, const char* field, int line) {
    if (!obj.contains(field) || !obj[field].is_string()) {
        malformed(line, std::string("missing or non-string '") + field + "'");
    }
    return obj[field].get<std::string>();
}

TraceRecord parse_record(const json& obj, int line) {
    TraceRecord record;
    record.line = line;
    record.at = number_field(obj, "at", line);
    if (record.at < 0.0) {
        malformed(line, "'at' must be non-negative");
    }
    std::string kind = string_field(obj, "kind", line);
    record.id = string_field(obj, "id", line);

    if (kind == "request") {
        record.kind = TraceKind::request;
        TransferRequest& req = record.request;
        req.id = record.id;
        req.src = string_field(obj, "src", line);
        req.dst = string_field(obj, "dst", line);
        req.submitted_at = record.at;
        double volume_gb = number_field(obj, "volume_gb", line);
        if (volume_gb < 0.0) {
            malformed(line, "'volume_gb' must be non-negative");
        }
        req.volume_bytes = gb_to_bytes(volume_gb);
        double priority = number_field(obj, "priority", line);
        if (priority < 0.0 || priority != static_cast<int>(priority)) {
            malformed(line, "'priority' must be a non-negative integer");
        }
        req.priority = static_cast<int>(priority);
        if (obj.contains("requested_rate_gbps")) {
            double rate = number_field(obj, "requested_rate_gbps", line);
            if (!(rate > 0.0)) {
                malformed(line, "'requested_rate_gbps' must be positive");
            }
            req.requested_rate_bps = gbps_to_bps(rate);
        }
        if (obj.contains("deadline_s")) {
            req.deadline_s = number_field(obj, "deadline_s", line);
        }
    } else if (kind == "load_start") {
        record.kind = TraceKind::load_start;
        record.src = string_field(obj, "src", line);
        record.dst = string_field(obj, "dst", line);
        if (record.src == record.dst) {
            malformed(line, "load endpoints must differ");
        }
        if (obj.contains("demand_cap_gbps")) {
            double cap = number_field(obj, "demand_cap_gbps", line);
            if (!(cap > 0.0)) {
                malformed(line, "'demand_cap_gbps' must be positive");
            }
            record.demand_cap_bps = gbps_to_bps(cap);
        }
    } else if (kind == "load_stop") {
        record.kind = TraceKind::load_stop;
    } else if (kind == "cancel") {
        record.kind = TraceKind::cancel;
    } else {
        malformed(line, "unknown kind '" + kind + "'");
    }
    return record;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
    std::vector<TraceRecord> records;
    std::set<std::pair<TraceKind, std::string>> seen;
    std::string text;
    int line = 0;
    double last_at = 0.0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(text);
        } catch (const json::exception& err) {
            malformed(line, err.what());
        }
        if (!obj.is_object()) {
            malformed(line, "record must be a JSON object");
        }
        TraceRecord record = parse_record(obj, line);
        if (!records.empty() && record.at < last_at) {
            fail_validation("UnsortedTrace",
                            "line " + std::to_string(line) + ": timestamps must be non-decreasing");
        }
        last_at = record.at;
        if (!seen.insert({record.kind, record.id}).second) {
            fail_validation("DuplicateId", "line " + std::to_string(line) + ": duplicate " +
                                               std::string(to_string(record.kind)) + " id '" +
                                               record.id + "'");
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<TraceRecord> parse_trace_text(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

std::string emit_trace(const std::vector<TraceRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        json obj;
        obj["at"] = record.at;
        obj["kind"] = to_string(record.kind);
        obj["id"] = record.id;
        switch (record.kind) {
            case TraceKind::request: {
                const TransferRequest& req = record.request;
                obj["src"] = req.src;
                obj["dst"] = req.dst;
                obj["volume_gb"] = bytes_to_gb(req.volume_bytes);
                obj["priority"] = req.priority;
                if (req.requested_rate_bps != kUnbounded) {
                    obj["requested_rate_gbps"] = bps_to_gbps(req.requested_rate_bps);
                }
                if (req.deadline_s != kUnbounded) {
                    obj["deadline_s"] = req.deadline_s;
                }
                break;
            }
            case TraceKind::load_start:
                obj["src"] = record.src;
                obj["dst"] = record.dst;
                if (record.demand_cap_bps != kUnbounded) {
                    obj["demand_cap_gbps"] = bps_to_gbps(record.demand_cap_bps);
                }
                break;
            case TraceKind::load_stop:
            case TraceKind::cancel:
                break;
        }
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace wansim
