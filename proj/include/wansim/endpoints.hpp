#pragma once

#include <string>
#include <vector>

#include "wansim/topology.hpp"

namespace wansim {

// A site's transfer endpoint: a fixed table of schedulable slots. Slot 0 is
// permanently reserved for free-for-all traffic and can never be attached to
// a VPN; slots 1..slot_count-1 are admission tokens for provisions.
struct Site {
    std::string name;
    double bandwidth_limit_bps = 0.0;
    int slot_count = 8;
    // slot index -> attached vpn id, "" when free. slot_vpn[0] stays "".
    std::vector<std::string> slot_vpn;
};

Site make_site(std::string name, double bandwidth_limit_bps, int slot_count = 8);

enum class VpnState { constructing, active, released };

// A guaranteed-rate point-to-point provision connecting one slot at each of
// two sites over a fixed path.
struct Vpn {
    std::string id;
    std::string site_a;
    std::string site_b;
    int slot_a = 0;
    int slot_b = 0;
    Path path;
    double rate_bps = 0.0;
    VpnState state = VpnState::constructing;
    double setup_complete_at = 0.0;
    double released_at = 0.0;
};

// Lowest-numbered unattached slot index >= 1; marks it in use.
// Errors: NoFreeSlot.
int allocate_slot(Site& site, const std::string& vpn_id);
void release_slot(Site& site, int index);
bool has_free_slot(const Site& site);

// Allocates one slot at each site and returns a constructing Vpn whose setup
// completes at now + setup_delay. The rate must satisfy
// rate <= min(limit_a, limit_b, path_bottleneck(path)).
// Errors: NoFreeSlot, RateExceedsLimit, PathMismatch.
Vpn attach_vpn(const Topology& topo, Site& a, Site& b, const Path& path,
               double rate_bps, double now, double setup_delay, std::string vpn_id);

void activate_vpn(Vpn& vpn);

// Returns both slots to the free pool. Errors: AlreadyReleased.
void release_vpn(Vpn& vpn, Site& a, Site& b, double now);

// Sum of rates of active Vpns with an endpoint at the site. Constructing
// rates are pending, not active; admission accounting for them lives in the
// scheduler.
double site_committed(const Site& site, const std::vector<Vpn>& vpns);

}  // namespace wansim
