#pragma once
// pricing_two.hpp - dynamic pricing for markets with at most two optimal
// allocations.
//
// With two optima every non-exclusive item is legal to exactly two players,
// which collapses the residual to unit demands whose legality graph is a
// disjoint union of cycles (in fact a single one). An even uniquely assigned
// cycle prices directly by alternating high and low; when only odd cycles
// exist, either two of them overlap in a way that a reallocation merges into
// an even cycle, or one odd cycle minus its base item works with the same
// alternation.

#include <vector>

#include "mdm/legality_graph.hpp"
#include "mdm/market.hpp"
#include "mdm/pricing.hpp"

namespace mdm {

enum class CycleStructureKind { removable_cycle, odd_cycle_pair, type4_set };

struct CycleStructure {
    CycleStructureKind kind{};
    std::vector<ItemId> cycle;   // removable_cycle / type4: the cycle itself;
                                 // odd pair: first cycle, rotated to the shared base
    std::vector<ItemId> cycle2;  // odd pair only: second cycle, same base
    int overlap = -1;            // odd pair only: shared-suffix length r
};

// Two odd uniquely assigned cycles form an odd pair when, rotated to a
// common base vertex, their last r+1 vertices coincide and their owner sets
// overlap in exactly r+2 players. Reallocating along the second then merges
// them into an even uniquely assigned cycle of length l1+l2-2r-2. The two
// cycles must be genuinely different.
bool is_odd_cycle_pair(const LegalityGraph& g, const std::vector<ItemId>& c1,
                       const std::vector<ItemId>& c2, int overlap);

// Finds, in precedence order: an even uniquely assigned cycle, else an odd
// cycle pair, else a lone odd cycle reported as a type-4 set. The graph must
// contain a uniquely assigned cycle (InvariantError otherwise).
CycleStructure find_cycle_structure(const LegalityGraph& g);

// Prices a residual-grade simplified market with at most two optimal
// allocations (checked by enumeration; more throws UnsupportedRegimeError).
// Every item must be marked by two or more players (ValidationError).
// Output is in (0,1), distinct, verifier-accepted.
PriceVector price_two_allocations(const SimplifiedMarket& s, StructureLog* log = nullptr,
                                  int depth = 0);

}  // namespace mdm
