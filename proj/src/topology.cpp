#include "wansim/topology.hpp"

#include <algorithm>
#include <set>

#include "wansim/errors.hpp"
#include "wansim/units.hpp"

namespace wansim {

LinkKey::LinkKey(std::string x, std::string y) {
    if (x <= y) {
        a = std::move(x);
        b = std::move(y);
    } else {
        a = std::move(y);
        b = std::move(x);
    }
}

std::vector<LinkKey> Path::links() const {
    std::vector<LinkKey> out;
    for (std::size_t i = 1; i < hops.size(); ++i) {
        out.emplace_back(hops[i - 1], hops[i]);
    }
    return out;
}

void Topology::add_node(const std::string& name, NodeKind kind,
                        const std::vector<std::string>& aliases) {
    if (name.empty()) {
        fail_validation("MalformedDocument", "node with empty name");
    }
    if (nodes_.count(name) || aliases_.count(name)) {
        fail_validation("MalformedDocument", "duplicate node name '" + name + "'");
    }
    nodes_.emplace(name, kind);
    adjacency_.emplace(name, std::vector<std::string>{});
    for (const auto& alias : aliases) {
        if (alias.empty() || nodes_.count(alias) || aliases_.count(alias)) {
            fail_validation("MalformedDocument",
                            "alias '" + alias + "' clashes with an existing name");
        }
        aliases_.emplace(alias, name);
    }
}

void Topology::add_link(const std::string& a, const std::string& b, double capacity_bps) {
    if (a == b) {
        fail_validation("MalformedDocument", "self-link at node '" + a + "'");
    }
    if (!nodes_.count(a)) {
        fail_validation("DanglingEndpoint", "link references unknown node '" + a + "'");
    }
    if (!nodes_.count(b)) {
        fail_validation("DanglingEndpoint", "link references unknown node '" + b + "'");
    }
    if (!(capacity_bps > 0.0)) {
        fail_validation("NonPositiveCapacity",
                        "link " + a + " -- " + b + " has non-positive capacity");
    }
    LinkKey key(a, b);
    if (links_.count(key)) {
        fail_validation("DuplicateLink", "duplicate link " + key.a + " -- " + key.b);
    }
    links_.emplace(key, capacity_bps);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    std::sort(adjacency_[a].begin(), adjacency_[a].end());
    std::sort(adjacency_[b].begin(), adjacency_[b].end());
}

const std::string& Topology::resolve(const std::string& name) const {
    auto node = nodes_.find(name);
    if (node != nodes_.end()) {
        return node->first;
    }
    auto alias = aliases_.find(name);
    if (alias != aliases_.end()) {
        return alias->second;
    }
    fail_validation("UnknownNode", "no node or alias named '" + name + "'");
}

bool Topology::has_node(const std::string& name) const {
    return nodes_.count(name) > 0 || aliases_.count(name) > 0;
}

NodeKind Topology::node_kind(const std::string& name) const {
    return nodes_.at(resolve(name));
}

bool Topology::has_link(const LinkKey& key) const { return links_.count(key) > 0; }

double Topology::link_capacity(const LinkKey& key) const {
    auto it = links_.find(key);
    if (it == links_.end()) {
        fail_validation("UnknownLink", "no link " + key.a + " -- " + key.b);
    }
    return it->second;
}

const std::vector<std::string>& Topology::neighbors(const std::string& name) const {
    return adjacency_.at(resolve(name));
}

std::vector<LinkKey> Topology::incident_links(const std::string& name) const {
    const std::string& canonical = resolve(name);
    std::vector<LinkKey> out;
    for (const auto& neighbor : adjacency_.at(canonical)) {
        out.emplace_back(canonical, neighbor);
    }
    return out;
}

namespace {

double require_positive_number(const nlohmann::json& obj, const std::string& field) {
    if (!obj.contains(field) || !obj[field].is_number()) {
        fail_validation("MalformedDocument", "missing or non-numeric '" + field + "'");
    }
    return obj[field].get<double>();
}

std::string require_string(const nlohmann::json& obj, const std::string& field) {
    if (!obj.contains(field) || !obj[field].is_string()) {
        fail_validation("MalformedDocument", "missing or non-string '" + field + "'");
    }
    return obj[field].get<std::string>();
}

}  // namespace

Topology load_topology(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        fail_validation("MalformedDocument", "topology document must be a JSON object");
    }
    if (doc.contains("format_version") && doc["format_version"].get<int>() != 1) {
        fail_validation("MalformedDocument", "unsupported topology format_version");
    }
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
        fail_validation("MalformedDocument", "topology requires a 'nodes' array");
    }
    if (!doc.contains("links") || !doc["links"].is_array()) {
        fail_validation("MalformedDocument", "topology requires a 'links' array");
    }

    Topology topo;
    for (const auto& node : doc["nodes"]) {
        std::string name = require_string(node, "name");
        std::string kind = require_string(node, "kind");
        NodeKind nk;
        if (kind == "site") {
            nk = NodeKind::site;
        } else if (kind == "router") {
            nk = NodeKind::router;
        } else {
            fail_validation("MalformedDocument", "node '" + name + "' has unknown kind '" + kind + "'");
        }
        std::vector<std::string> aliases;
        if (node.contains("aliases")) {
            if (!node["aliases"].is_array()) {
                fail_validation("MalformedDocument", "'aliases' must be an array of strings");
            }
            for (const auto& alias : node["aliases"]) {
                if (!alias.is_string()) {
                    fail_validation("MalformedDocument", "'aliases' must be an array of strings");
                }
                aliases.push_back(alias.get<std::string>());
            }
        }
        topo.add_node(name, nk, aliases);
    }
    for (const auto& link : doc["links"]) {
        std::string a = require_string(link, "a");
        std::string b = require_string(link, "b");
        double capacity_gbps = require_positive_number(link, "capacity_gbps");
        topo.add_link(a, b, gbps_to_bps(capacity_gbps));
    }
    return topo;
}

Path shortest_path(const Topology& topo, const std::string& src, const std::string& dst) {
    const std::string& from = topo.resolve(src);
    const std::string& to = topo.resolve(dst);
    if (from == to) {
        return Path{{from}};
    }

    // Unit-weight Dijkstra. The frontier is ordered by (distance, name) and a
    // node's predecessor is replaced on an equal-distance relaxation only when
    // the new predecessor sorts lexicographically earlier, so the settled
    // predecessor of every node is the smallest among all shortest-path
    // candidates.
    std::map<std::string, int> dist;
    std::map<std::string, std::string> pred;
    std::set<std::pair<int, std::string>> frontier;
    dist[from] = 0;
    frontier.insert({0, from});

    while (!frontier.empty()) {
        auto [d, node] = *frontier.begin();
        frontier.erase(frontier.begin());
        if (node == to) {
            break;
        }
        for (const auto& next : topo.neighbors(node)) {
            auto it = dist.find(next);
            if (it == dist.end()) {
                dist[next] = d + 1;
                pred[next] = node;
                frontier.insert({d + 1, next});
            } else if (d + 1 < it->second) {
                frontier.erase({it->second, next});
                it->second = d + 1;
                pred[next] = node;
                frontier.insert({d + 1, next});
            } else if (d + 1 == it->second && node < pred[next]) {
                pred[next] = node;
            }
        }
    }

    if (!dist.count(to)) {
        fail_validation("NoRoute", "no route from '" + from + "' to '" + to + "'");
    }

    Path path;
    for (std::string node = to; node != from; node = pred.at(node)) {
        path.hops.push_back(node);
    }
    path.hops.push_back(from);
    std::reverse(path.hops.begin(), path.hops.end());
    return path;
}

void validate_path(const Topology& topo, const Path& path) {
    if (path.hops.empty()) {
        fail_validation("InvalidPath", "path has no hops");
    }
    std::set<std::string> seen;
    for (const auto& hop : path.hops) {
        if (!topo.has_node(hop)) {
            fail_validation("InvalidPath", "path hop '" + hop + "' is not a node");
        }
        if (!seen.insert(topo.resolve(hop)).second) {
            fail_validation("InvalidPath", "path repeats node '" + hop + "'");
        }
    }
    for (const auto& link : path.links()) {
        if (!topo.has_link(link)) {
            fail_validation("InvalidPath",
                            "consecutive hops " + link.a + " -- " + link.b + " are not adjacent");
        }
    }
}

double path_bottleneck(const Topology& topo, const Path& path) {
    validate_path(topo, path);
    double bottleneck = kUnbounded;
    for (const auto& link : path.links()) {
        bottleneck = std::min(bottleneck, topo.link_capacity(link));
    }
    return bottleneck;
}

}  // namespace wansim
