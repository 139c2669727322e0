#include "wansim/accounting.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wansim/errors.hpp"
#include "wansim/flowsim.hpp"

namespace wansim {

const char* to_string(Grouping grouping) {
    switch (grouping) {
        case Grouping::route: return "route";
        case Grouping::segment: return "segment";
        case Grouping::site: return "site";
    }
    return "unknown";
}

double integrate_samples(const std::vector<ThroughputSample>& samples, double t0, double t1) {
    if (t1 < t0) {
        fail_validation("MalformedInterval", "integration interval is reversed");
    }
    double bits = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0 && samples[i].at < samples[i - 1].at) {
            fail_validation("UnorderedSamples", "throughput samples must be time-ordered");
        }
        double from = std::max(samples[i].at, t0);
        double to = i + 1 < samples.size() ? std::min(samples[i + 1].at, t1) : t1;
        if (to > from) {
            bits += samples[i].rate_bps * (to - from);
        }
    }
    return bits / kBitsPerByte;
}

bool reconcilable(const PromiseLedgerEntry& entry) {
    if (!entry.activated) {
        return false;  // cancelled before activation: no promised interval
    }
    return entry.state == PromiseState::completed || entry.state == PromiseState::cancelled;
}

PromiseReport reconcile(const PromiseLedgerEntry& entry, double deficit_threshold) {
    if (!(entry.promised_bytes > 0.0)) {
        fail_validation("ZeroPromised",
                        "promise '" + entry.promise_id + "' has no promised bytes to reconcile");
    }
    PromiseReport report;
    report.promise_id = entry.promise_id;
    report.utilization = entry.achieved_bytes / entry.promised_bytes;
    report.deficit = std::max(0.0, 1.0 - report.utilization);
    report.fulfilled = report.deficit <= deficit_threshold;
    return report;
}

namespace {

std::vector<std::string> keys_for(const PromiseLedgerEntry& entry, Grouping grouping) {
    std::vector<std::string> keys;
    switch (grouping) {
        case Grouping::route: {
            std::string key;
            for (const auto& hop : entry.path.hops) {
                if (!key.empty()) key += "--";
                key += hop;
            }
            keys.push_back(std::move(key));
            break;
        }
        case Grouping::segment:
            for (const auto& link : entry.path.links()) {
                keys.push_back(link.a + "--" + link.b);
            }
            break;
        case Grouping::site:
            keys.push_back(entry.path.hops.front());
            if (entry.path.hops.size() > 1) {
                keys.push_back(entry.path.hops.back());
            }
            break;
    }
    return keys;
}

}  // namespace

std::vector<SystematicReport> aggregate(const std::vector<PromiseReport>& reports,
                                        const std::vector<PromiseLedgerEntry>& ledger,
                                        Grouping grouping, int min_samples,
                                        double deficit_threshold) {
    std::map<std::string, const PromiseLedgerEntry*> by_promise;
    for (const auto& entry : ledger) {
        by_promise.emplace(entry.promise_id, &entry);
    }

    struct Bucket {
        int count = 0;
        double deficit_sum = 0.0;
    };
    std::map<std::string, Bucket> buckets;
    for (const auto& report : reports) {
        auto it = by_promise.find(report.promise_id);
        if (it == by_promise.end()) {
            fail_validation("UnknownPromise",
                            "report references promise '" + report.promise_id +
                                "' missing from the ledger");
        }
        for (const auto& key : keys_for(*it->second, grouping)) {
            Bucket& bucket = buckets[key];
            bucket.count += 1;
            bucket.deficit_sum += report.deficit;
        }
    }

    std::vector<SystematicReport> out;
    out.reserve(buckets.size());
    for (const auto& [key, bucket] : buckets) {
        SystematicReport report;
        report.grouping = grouping;
        report.key = key;
        report.promise_count = bucket.count;
        report.mean_deficit = bucket.deficit_sum / bucket.count;
        report.flagged =
            bucket.count >= min_samples && report.mean_deficit > deficit_threshold;
        out.push_back(std::move(report));
    }
    return out;
}

}  // namespace wansim
