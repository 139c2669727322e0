#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wansim/scheduler.hpp"

namespace wansim {

// One line of the request trace (line-delimited JSON). Kinds:
//   request    -- a prioritized transfer demand (TransferRequest payload)
//   load_start -- begin an unbounded best-effort background flow
//   load_stop  -- end a background flow
//   cancel     -- withdraw a previously submitted request
enum class TraceKind { request, load_start, load_stop, cancel };

const char* to_string(TraceKind kind);

struct TraceRecord {
    double at = 0.0;
    TraceKind kind = TraceKind::request;
    std::string id;
    // request payload
    TransferRequest request;
    // load_start payload
    std::string src;
    std::string dst;
    double demand_cap_bps = kUnbounded;
    int line = 0;  // 1-based source line, for error messages
};

// Parses and validates a JSONL trace: records must be time-sorted and ids
// unique per kind. Errors: MalformedRecord (with line number), UnsortedTrace,
// DuplicateId.
std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> parse_trace_text(const std::string& text);

// Inverse of parse_trace; emits one JSON object per line.
std::string emit_trace(const std::vector<TraceRecord>& records);

}  // namespace wansim
