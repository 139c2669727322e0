#include "wansim/endpoints.hpp"

#include <algorithm>

#include "wansim/errors.hpp"

namespace wansim {

Site make_site(std::string name, double bandwidth_limit_bps, int slot_count) {
    if (slot_count < 2) {
        fail_validation("MalformedSite",
                        "site '" + name + "' needs at least 2 slots (one is free-for-all)");
    }
    if (!(bandwidth_limit_bps > 0.0)) {
        fail_validation("MalformedSite", "site '" + name + "' has non-positive bandwidth limit");
    }
    Site site;
    site.name = std::move(name);
    site.bandwidth_limit_bps = bandwidth_limit_bps;
    site.slot_count = slot_count;
    site.slot_vpn.assign(static_cast<std::size_t>(slot_count), "");
    return site;
}

int allocate_slot(Site& site, const std::string& vpn_id) {
    for (int i = 1; i < site.slot_count; ++i) {
        if (site.slot_vpn[static_cast<std::size_t>(i)].empty()) {
            site.slot_vpn[static_cast<std::size_t>(i)] = vpn_id;
            return i;
        }
    }
    fail_runtime("NoFreeSlot", "site '" + site.name + "' has no free slot");
}

void release_slot(Site& site, int index) {
    if (index <= 0 || index >= site.slot_count) {
        fail_runtime("BadSlotIndex", "slot index out of range at '" + site.name + "'");
    }
    site.slot_vpn[static_cast<std::size_t>(index)].clear();
}

bool has_free_slot(const Site& site) {
    for (int i = 1; i < site.slot_count; ++i) {
        if (site.slot_vpn[static_cast<std::size_t>(i)].empty()) {
            return true;
        }
    }
    return false;
}

Vpn attach_vpn(const Topology& topo, Site& a, Site& b, const Path& path,
               double rate_bps, double now, double setup_delay, std::string vpn_id) {
    if (a.name == b.name) {
        fail_validation("PathMismatch", "vpn endpoints must be two distinct sites");
    }
    if (path.hops.empty() || topo.resolve(path.hops.front()) != topo.resolve(a.name) ||
        topo.resolve(path.hops.back()) != topo.resolve(b.name)) {
        fail_validation("PathMismatch", "path does not connect '" + a.name + "' to '" + b.name + "'");
    }
    if (!(rate_bps > 0.0)) {
        fail_validation("RateExceedsLimit", "vpn rate must be positive");
    }
    double limit = std::min({a.bandwidth_limit_bps, b.bandwidth_limit_bps,
                             path_bottleneck(topo, path)});
    if (rate_bps > limit * (1.0 + 1e-12)) {
        fail_validation("RateExceedsLimit",
                        "vpn rate exceeds endpoint or segment limit between '" + a.name +
                            "' and '" + b.name + "'");
    }

    Vpn vpn;
    vpn.id = std::move(vpn_id);
    vpn.site_a = a.name;
    vpn.site_b = b.name;
    vpn.slot_a = allocate_slot(a, vpn.id);
    // If the second site has no slot left, roll the first allocation back.
    if (!has_free_slot(b)) {
        release_slot(a, vpn.slot_a);
        fail_runtime("NoFreeSlot", "site '" + b.name + "' has no free slot");
    }
    vpn.slot_b = allocate_slot(b, vpn.id);
    vpn.path = path;
    vpn.rate_bps = rate_bps;
    vpn.state = VpnState::constructing;
    vpn.setup_complete_at = now + setup_delay;
    return vpn;
}

void activate_vpn(Vpn& vpn) {
    if (vpn.state != VpnState::constructing) {
        fail_runtime("BadVpnState", "vpn '" + vpn.id + "' is not constructing");
    }
    vpn.state = VpnState::active;
}

void release_vpn(Vpn& vpn, Site& a, Site& b, double now) {
    if (vpn.state == VpnState::released) {
        fail_runtime("AlreadyReleased", "vpn '" + vpn.id + "' was already released");
    }
    release_slot(a, vpn.slot_a);
    release_slot(b, vpn.slot_b);
    vpn.state = VpnState::released;
    vpn.released_at = now;
}

double site_committed(const Site& site, const std::vector<Vpn>& vpns) {
    double sum = 0.0;
    for (const auto& vpn : vpns) {
        if (vpn.state != VpnState::active) {
            continue;
        }
        if (vpn.site_a == site.name || vpn.site_b == site.name) {
            sum += vpn.rate_bps;
        }
    }
    return sum;
}

}  // namespace wansim
