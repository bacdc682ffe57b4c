#pragma once
// legality_graph.hpp - the item exchange graph of an allocation.
//
// Fix a simplified market and one of its full marks-respecting allocations.
// The exchange graph has a vertex per item and an edge x -> y whenever the
// owner of x could legally have received y instead (x's owner marks y but
// does not own it). Walking any cycle and handing each item to the previous
// item's owner yields another marks-respecting allocation. Cycles visiting
// each player at most once ("uniquely assigned") trade exactly one item per
// touched player; they are the basic reallocation step of the pricing
// regimes, and a shortest cycle through a vertex is automatically uniquely
// assigned (two same-owner items admit a shortcut, since items of one owner
// share their out-edges).

#include <vector>

#include "mdm/market.hpp"

namespace mdm {

struct LegalityGraph {
    std::vector<PlayerId> owner;  // owner[x]: who holds item x in the allocation
    std::vector<Bundle> adj;      // adj[x] = marks[owner[x]] minus owner's items
};

// `a` must be a full assignment of s's items respecting demands.
LegalityGraph build_legality_graph(const SimplifiedMarket& s, const Allocation& a);

// Cycles are item lists [c0, c1, ..., c_{L-1}] with edges c_j -> c_{j+1} and
// c_{L-1} -> c0; vertices are distinct and L >= 2.
bool is_cycle(const LegalityGraph& g, const std::vector<ItemId>& cycle);
bool is_uniquely_assigned(const LegalityGraph& g, const std::vector<ItemId>& cycle);

// Shortest cycle through `start` via BFS, neighbors scanned in ascending
// item order; empty when no cycle passes through the vertex.
std::vector<ItemId> shortest_cycle_through(const LegalityGraph& g, ItemId start);

// Deterministic uniquely-assigned cycle: the shortest cycle through the
// smallest item that lies on any cycle. Throws InvariantError when the graph
// is acyclic (the pricing regimes only ask under preconditions that
// guarantee a cycle).
std::vector<ItemId> find_uniquely_assigned_cycle(const LegalityGraph& g);

// All uniquely-assigned cycles in canonical rotation (smallest item first),
// in lexicographic order of their item lists. `truncated` reports hitting
// the cap.
struct UaCycleList {
    std::vector<std::vector<ItemId>> cycles;
    bool truncated = false;
};
UaCycleList enumerate_ua_cycles(const LegalityGraph& g, std::size_t limit = 10000);

// Hand item c_{j+1} to the owner of c_j (and c0 to the last owner): another
// full marks-respecting assignment with unchanged bundle sizes.
Allocation reallocate_along_cycle(const SimplifiedMarket& s, const Allocation& a,
                                  const std::vector<ItemId>& cycle);

// The submarket left after deleting `removed` (and shrinking each owner's
// demand by what it lost). Players reduced to demand zero are dropped;
// item/player maps translate new indices back, and `allocation` is the old
// one restricted and reindexed.
struct InducedSubmarket {
    SimplifiedMarket market;
    std::vector<ItemId> item_map;
    std::vector<PlayerId> player_map;
    Allocation allocation;
};
InducedSubmarket remove_items(const SimplifiedMarket& s, const Allocation& a, Bundle removed);

}  // namespace mdm
