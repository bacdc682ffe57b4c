#pragma once
// pricing_four.hpp - dynamic pricing for at most four players.
//
// The engine is a removable set: a small item group that can be priced into
// a high band (plus possibly one central cheap item) so that whatever the
// other items cost, every demand bundle still extends to a legal allocation.
// Removing the group leaves a smaller market to price recursively. A
// suitable set always exists for up to four players; find_removable_set()
// walks the constructive case analysis over a uniquely assigned cycle of the
// legality graph, reallocating along short cycles where needed.

#include <optional>
#include <utility>
#include <vector>

#include "mdm/market.hpp"
#include "mdm/pricing.hpp"

namespace mdm {

enum class RemovableKind { type1, type2 };

// items are listed in discovery order; tests compare them as sets. The
// allocation is the (possibly reallocated) legal allocation the set refers
// to; owners below always mean owners under that allocation.
struct RemovableSet {
    RemovableKind kind{};
    std::vector<ItemId> items;
    std::optional<ItemId> central;  // type1 only
    Allocation allocation;
};

// Type 1: `central` belongs to some player i_c, and for every other player
// that also marks the central item the set contains exactly one of that
// player's items, which i_c marks too. Nothing else is in the set. Every
// item of the set except the central one may then sit above all other
// prices, with the central item strictly cheapest overall.
bool is_removable_type1(const SimplifiedMarket& s, const Allocation& a,
                        const std::vector<ItemId>& items, ItemId central);

// Type 2: the set holds exactly one item of every player and its induced
// legality subgraph is strongly connected; the whole set may sit above all
// other prices.
bool is_removable_type2(const SimplifiedMarket& s, const Allocation& a,
                        const std::vector<ItemId>& items);

// Constructive search. Preconditions: at most four players, no item marked
// by every player, every item marked by at least two players, `a` a legal
// allocation. Violations throw ValidationError; a dead end inside the case
// analysis (impossible under the preconditions) throws InvariantError. The
// returned set always passes its kind's predicate against the returned
// allocation.
RemovableSet find_removable_set(const SimplifiedMarket& s, const Allocation& a);

// Prices a residual-grade simplified market of at most four players: marks
// equal legality, every item is marked by two or more players. Output is in
// (0,1), pairwise distinct, and accepted by the verifier. More than four
// players throws UnsupportedRegimeError.
PriceVector price_four_players(const SimplifiedMarket& s, StructureLog* log = nullptr,
                               int depth = 0);

}  // namespace mdm
