#pragma once
// matching.hpp - exact assignment oracles over markets.
//
// Everything here reduces to bipartite assignment: a player with demand k
// splits into k unit clones, bundle value is additive within demand, and
// maximum welfare is a maximum-value assignment of items to clones. The
// solver is the potential-based Hungarian method on exact rationals, so every
// welfare comparison downstream is exact. Simplified (0/1) markets get a
// cheaper boolean-matching path that also produces Hall certificates.

#include <optional>
#include <vector>

#include "mdm/market.hpp"

namespace mdm {

// Maximum total value of assigning each item of `items` to at most one
// player, player i receiving at most caps[i] items; items may also stay
// unassigned. caps must have one entry per player, each >= 0.
Rational max_assignment_value(const Market& m, Bundle items, const std::vector<int>& caps);

struct AssignmentResult {
    Rational welfare;
    Allocation allocation;  // one welfare-maximizing witness (may contain zero-value assignments)
};
AssignmentResult max_assignment(const Market& m, Bundle items, const std::vector<int>& caps);

// Maximum welfare over all demand-respecting allocations of the whole market.
Rational optimal_welfare(const Market& m);

// Per-player legality data measured against the market optimum:
// legal[i] has bit x set iff some optimal allocation hands item x to player i;
// exclusive[i] iff every optimal allocation does.
struct LegalityInfo {
    Rational max_welfare;
    std::vector<Bundle> legal;
    std::vector<Bundle> exclusive;
};

// Computes LegalityInfo and enforces the standing market assumptions along
// the way: every optimal allocation assigns every item (equivalently,
// removing any item strictly lowers the optimum), and every legally
// assignable item has positive value to that player. Throws ValidationError
// when the input market breaks either.
LegalityInfo legality(const Market& m);

// Whether `forced` (disjoint partial bundles, one per player) extends to an
// optimal allocation O with forced_i contained in O_i for every player.
// False when a forced bundle exceeds the player's demand. The overload with
// `known_optimum` skips recomputing the market optimum on repeated queries.
bool is_extendable(const Market& m, const Allocation& forced, const Rational& known_optimum);
bool is_extendable(const Market& m, const Allocation& forced);

// All optimal allocations, enumerated by a DFS that assigns items in
// ascending order to players in ascending order (a no-owner branch last, so
// markets that break the standing assumption still enumerate exactly).
// Exact-bound pruning keeps the walk inside optimal prefixes. Collects at
// most `limit` allocations; `truncated` reports that more exist.
struct EnumerationResult {
    std::vector<Allocation> allocations;
    bool truncated = false;
};
EnumerationResult enumerate_optimal_allocations(const Market& m, std::size_t limit = 1u << 20);

// The enumeration's first leaf: a deterministic representative optimum.
Allocation canonical_optimal_allocation(const Market& m);

// Simplified (0/1) markets reduce to boolean bipartite matching on marks.
// When no full assignment of the player clones exists, Hall's condition
// pinpoints a player set whose clones outnumber the items they can reach.
struct HallCertificate {
    std::vector<PlayerId> deficient_players;  // ascending player ids
    Bundle reachable_items = 0;               // exactly the items those players mark
};

// Try to match every clone (caps[i] clones for player i, adjacency
// marks[i] & items) to a distinct item. Returns std::nullopt on success,
// otherwise a Hall violator over the capped players.
std::optional<HallCertificate> hall_violator(const SimplifiedMarket& s, Bundle items,
                                             const std::vector<int>& caps);
inline std::optional<HallCertificate> hall_violator(const SimplifiedMarket& s) {
    return hall_violator(s, s.all_items(), s.demands);
}

// Extendability in a simplified market: some full marks-respecting assignment
// contains `forced`. In a saturated simplified market whose marks coincide
// with its legality this is exactly extension to a legal allocation. False if
// a forced bundle leaves its player's marks or exceeds the player's demand.
bool is_extendable(const SimplifiedMarket& s, const Allocation& forced);

}  // namespace mdm
