#pragma once
// rough.hpp - the coarse pricing stage and the residual it leaves behind.
//
// Rough prices sort every player's view of the items into strict tiers:
// items only that player can legally get beat items it merely shares, shared
// items all tie at one utility, and anything outside its legality is worse
// still (and every legal item keeps positive utility). Once items are tiered
// this way, a player's purchase decisions are pinned down except for the
// order among its shared items; that leftover freedom is the residual
// market, and the headroom value says how much the residual prices may be
// raised without disturbing any tier comparison.
//
// The construction runs Bellman-Ford over an auxiliary graph on the items:
// an edge x -> y says some player that can legally get x would be comparing
// it against y, weighted by that player's value difference. Edges on
// zero-weight cycles must stay equalities; every other edge is discounted by
// a small epsilon to turn the remaining constraints strict.

#include <vector>

#include "mdm/market.hpp"
#include "mdm/matching.hpp"

namespace mdm {

struct AuxEdge {
    ItemId from = 0;
    ItemId to = 0;
    PlayerId player = 0;     // the inducing player
    Rational weight;         // value(player, from) - value(player, to)
    bool in_zero_cycle = false;  // lies on some zero-weight cycle
};

struct AuxiliaryGraph {
    std::vector<AuxEdge> edges;  // one record per inducing (player, pair)
    bool acyclic = false;        // no directed cycle at all (ignoring weights)
};

// Edge x -> y for player i whenever i can legally get x and y is not
// exclusively i's. An edge lies on a zero-weight cycle exactly when both
// endpoints are items i shares (legal but not exclusive); that criterion is
// exact, so no cycle search happens here.
AuxiliaryGraph build_auxiliary_graph(const Market& m, const LegalityInfo& info);

struct EpsilonInfo {
    bool cycle_bound_finite = false;  // false when the auxiliary graph is acyclic
    Rational cycle_bound;   // 1/lcm(value denominators): every positive cycle weighs at least this
    Rational value_bound;   // smallest strictly positive item value
    Rational epsilon;       // min(applicable bounds) / (m+1)
};
EpsilonInfo compute_epsilon(const Market& m, const AuxiliaryGraph& g);

struct RoughPricing {
    AuxiliaryGraph graph;
    EpsilonInfo eps;
    PriceVector prices;
};

// Shortest-path prices from a virtual source: price(x) = epsilon - dist(x),
// where parallel edges collapse to their smallest discounted weight. Checks
// the tier conditions on the result and throws InvariantError if the graph
// produced a negative cycle (impossible for markets passing legality()).
RoughPricing rough_prices(const Market& m, const LegalityInfo& info);

// The tier conditions, checkable for any price vector:
//   exclusive beats non-exclusive, shared items tie, legal beats non-legal,
//   and legal items have positive utility. True iff all hold.
bool check_rough_conditions(const Market& m, const LegalityInfo& info, const PriceVector& p);

// What rough prices leave undecided: the shared items, the players sharing
// them, and each such player's residual demand. Saturated again by
// construction. `headroom[i]` is how far player i's shared utility sits
// above its best outside option (and above zero); raising shared items by
// anything below min headroom keeps every tier comparison intact.
struct ResidualMarket {
    SimplifiedMarket simplified;        // empty when trivial
    std::vector<ItemId> item_map;       // residual item index -> original item
    std::vector<PlayerId> player_map;   // residual player index -> original player
    std::vector<Rational> base_utility;  // common shared-item utility per residual player
    std::vector<Rational> headroom;
    Rational delta;                      // min headroom; 0 when trivial
    bool trivial = false;                // no shared items remain
};
ResidualMarket residual_market(const Market& m, const LegalityInfo& info, const PriceVector& rough);

// rough + delta * fine on residual items (fine entries must lie strictly in
// (0,1), indexed like item_map), rough elsewhere.
PriceVector combine_prices(const Market& m, const ResidualMarket& r, const PriceVector& rough,
                           const PriceVector& fine);

}  // namespace mdm
