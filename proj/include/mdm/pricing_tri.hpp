#pragma once
// pricing_tri.hpp - dynamic pricing fixed at an item, demands at most three.
//
// The recursion peels one structure per level. Non-extendable small legal
// assignments witness a submarket pair: a player group I_B whose marks close
// off an item group X_B that is one item (or two, in the generalized form)
// short of the group's total demand, so exactly one crossover item must flow
// to the outside. The pair splits the market into two saturated halves that
// are priced independently, with artificial players standing in for the
// crossover flow. When no witness exists, a unit-demand player or the fixed
// item itself can be removed instead. Band constants compose the recursive
// prices so the fixed item always ends up strictly cheapest.

#include <optional>
#include <vector>

#include "mdm/market.hpp"
#include "mdm/pricing.hpp"

namespace mdm {

// B gets items_b and players_b; C gets the rest of both. `generalized`
// selects the two-crossover variant of the defining conditions.
struct SubmarketPair {
    Bundle items_b = 0;
    std::vector<PlayerId> players_b;
    bool generalized = false;
};

// Items of X_B that players outside I_B mark: candidates for crossing over.
Bundle crossover_items(const SimplifiedMarket& s, const SubmarketPair& pair);

// The defining conditions, machine-checked: both fragments nonempty, B's
// players mark only inside X_B, |X_B| exceeds B's total demand by exactly
// one (generalized: two), at least two (three) crossover items exist, and
// every single crossover (every crossover pair) admits a full assignment
// split where B's players cover exactly X_B minus the crossover and C's
// players cover the rest.
bool is_submarket_pair(const SimplifiedMarket& s, const SubmarketPair& pair);

// Finds the maximal pair whose X_B contains all items of `witness`, which
// must be a non-extendable legal assignment respecting demand, of size 2
// (plain) or 3 (generalized); an extendable witness is a ValidationError.
// Valid pairs force X_B to be the union of I_B's marks, so candidates are
// enumerated by player subset; maximality is by X_B cardinality (unique at
// the top by the defining conditions; ties broken deterministically).
// InvariantError if no pair validates.
SubmarketPair find_submarket_pair(const SimplifiedMarket& s, const Allocation& witness);

struct FixedPricing {
    PriceVector prices;     // (0,1), pairwise distinct
    ItemId fixed_item = 0;  // strictly cheapest entry of `prices`
};

// Prices a residual-grade simplified market (marks equal legality, demands
// all <= 3) with `item` pinned strictly cheapest. Demands above three throw
// UnsupportedRegimeError. The result is verifier-accepted for every choice
// of `item`.
FixedPricing price_fixed_at(const SimplifiedMarket& s, ItemId item, StructureLog* log = nullptr,
                            int depth = 0);

// price_fixed_at at the smallest item id, as a plain price vector.
PriceVector price_tridemand(const SimplifiedMarket& s, StructureLog* log = nullptr, int depth = 0);

}  // namespace mdm
