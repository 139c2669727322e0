#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace wansim {

enum class NodeKind { site, router };

// Unordered node pair, normalized so that a <= b lexicographically. One link
// per pair; capacity is symmetric.
struct LinkKey {
    std::string a;
    std::string b;

    LinkKey() = default;
    LinkKey(std::string x, std::string y);

    auto operator<=>(const LinkKey&) const = default;
};

struct Path {
    std::vector<std::string> hops;

    bool identity() const { return hops.size() <= 1; }
    // The ordered links implied by consecutive hops; empty for identity paths.
    std::vector<LinkKey> links() const;
};

// Immutable after load; all query operations are pure and safe to share
// across threads.
class Topology {
public:
    void add_node(const std::string& name, NodeKind kind,
                  const std::vector<std::string>& aliases = {});
    void add_link(const std::string& a, const std::string& b, double capacity_bps);

    // Resolves canonical names and aliases; throws UnknownNode otherwise.
    const std::string& resolve(const std::string& name) const;
    bool has_node(const std::string& name) const;
    NodeKind node_kind(const std::string& name) const;

    bool has_link(const LinkKey& key) const;
    double link_capacity(const LinkKey& key) const;
    const std::vector<std::string>& neighbors(const std::string& name) const;

    const std::map<std::string, NodeKind>& nodes() const { return nodes_; }
    const std::map<LinkKey, double>& links() const { return links_; }

    // Links incident to a node, used to default a site's bandwidth limit to
    // its access-link capacity.
    std::vector<LinkKey> incident_links(const std::string& name) const;

private:
    std::map<std::string, NodeKind> nodes_;
    std::map<std::string, std::string> aliases_;
    std::map<LinkKey, double> links_;
    std::map<std::string, std::vector<std::string>> adjacency_;
};

// Parses and validates a topology document (see docs/formats.md for the
// schema). Errors: MalformedDocument, DanglingEndpoint, DuplicateLink,
// NonPositiveCapacity.
Topology load_topology(const nlohmann::json& doc);

// Minimum-hop path with unit link weights (Dijkstra). Ties are broken by
// lexicographic comparison of the candidate predecessor at each settled
// node, so results are deterministic. Errors: UnknownNode, NoRoute.
Path shortest_path(const Topology& topo, const std::string& src, const std::string& dst);

// Throws InvalidPath unless every hop exists, consecutive hops are adjacent
// and no node repeats.
void validate_path(const Topology& topo, const Path& path);

// Minimum capacity over the path's links; kUnbounded for identity paths.
double path_bottleneck(const Topology& topo, const Path& path);

}  // namespace wansim
