#pragma once
// pricing.hpp - the recursive pricing driver and its audit log.
//
// Structural pricing of a simplified market always follows the same loop:
// strip exclusively-assigned items (they get rough prices and never return),
// hand the residual to a regime-specific pricer, and map the fine prices the
// regime produces back over the rough tiers. The regimes themselves recurse
// on induced submarkets, and those submarkets may again contain exclusive
// items or items nobody else wants, so the recursion re-enters through
// simplified_dynamic_price() which re-peels before dispatching. Every level
// returns prices strictly inside (0,1); since a 0/1 market's demand depends
// only on the price ordering, each level's output is re-quantized to
// (rank+1)/(m+1), which keeps rationals small no matter how deep the
// recursion goes.
//
// A StructureLog collects every structural decision (removable sets, cycles,
// submarket pairs, base cases) so tests can re-validate the predicates on
// the exact snapshots the pricer acted on.

#include <optional>
#include <vector>

#include "mdm/market.hpp"
#include "mdm/matching.hpp"
#include "mdm/rough.hpp"

namespace mdm {

enum class Regime {
    automatic,        // pick per residual: tridemand, then four_players, then two_allocations
    brute,            // exhaustive ordering search (small residuals only)
    four_players,     // removable-set recursion, at most four players
    two_allocations,  // cycle recursion, at most two optimal allocations
    tridemand,        // fixed-item recursion, all demands at most three
};

const char* regime_name(Regime r);

enum class StructureKind {
    brute_base,            // exhaustive search priced this submarket
    trivial_residual,      // nothing shared; rough prices already work
    shared_item,           // an item legal to every player, priced above the rest
    removable_type1,       // item set priced high around a central cheap item
    removable_type2,       // strongly connected one-item-per-player set priced high
    removable_cycle,       // even cycle, alternating high/low
    odd_cycle_pair,        // two odd cycles merged into an even one by reallocation
    type4_set,             // odd cycle minus its base item, alternating
    pair_split,            // submarket pair, one crossover item
    generalized_pair_split,  // submarket pair, two crossover items
    base_two_players,      // two-player fixed-price table
    base_small_market,     // at most two items
    base_single_player,    // one player demands everything
    unit_demand_reduction,  // a unit-demand player and one of its items removed
    fixed_item_removal,    // the fixed item removed, its holder's demand reduced
};

const char* structure_kind_name(StructureKind k);

// One structural step, with the exact market snapshot it was found in so the
// defining predicate can be re-checked after the fact.
struct StructureEntry {
    int depth = 0;
    StructureKind kind{};
    SimplifiedMarket market;          // market the structure lives in
    Allocation allocation;            // allocation it is relative to (may be empty)
    std::vector<ItemId> items;        // set items / cycle in order / pair's B items
    std::vector<ItemId> items2;       // second cycle of an odd pair
    std::vector<PlayerId> players;    // pair's B players
    std::optional<ItemId> central;    // central / shared / fixed item
    int overlap = -1;                 // odd pair overlap parameter r
};

struct StructureLog {
    std::vector<StructureEntry> entries;
    void add(StructureEntry e) { entries.push_back(std::move(e)); }
};

// Prices a simplified market: peel exclusive items, price the residual by
// `regime`, recombine, perturb ties, rank-quantize into (0,1), and check the
// result against the verifier before returning. `automatic` picks the first
// regime whose precondition the residual meets. Markets of at most three
// items are priced by exhaustive search outright. Throws
// UnsupportedRegimeError when the requested (or any automatic) regime cannot
// handle the residual, InvariantError if a guaranteed step fails.
PriceVector simplified_dynamic_price(const SimplifiedMarket& s, Regime regime = Regime::automatic,
                                     StructureLog* log = nullptr, int depth = 0);

// Full pipeline for a valued market. `fine` and `residual` expose the fine
// stage for inspection; `fine` is empty when the residual is trivial.
struct MarketPricing {
    PriceVector prices;       // rough + delta-scaled fine, perturbed to distinct
    LegalityInfo info;
    RoughPricing rough;
    ResidualMarket residual;
    PriceVector fine;         // prices of residual.simplified, (0,1), distinct
    Regime regime = Regime::automatic;  // what actually priced the residual
    StructureLog log;
};

MarketPricing dynamic_price_market(const Market& m, Regime regime = Regime::automatic);

// Same pipeline, but the fine stage pins `item` (an original-market item that
// must survive into the residual) strictly cheapest among residual items.
// Validation error if the item is unknown or exclusively assigned. Only the
// tridemand regime supports fixing, so the residual must have demands <= 3.
MarketPricing dynamic_price_market_fixed_at(const Market& m, ItemId item);

// Order-preserving re-quantization: item with the t-th smallest price gets
// (t+1)/(m+1). Requires all entries distinct.
PriceVector rank_quantize(const PriceVector& p);

}  // namespace mdm
