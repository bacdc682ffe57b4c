#pragma once
// Re-validates structure-log snapshots against their defining predicates.
// Shared by the unit tests and the acceptance suite, so it reports through a
// plain string instead of any test framework macro: empty means the entry
// checks out, anything else describes the failure.

#include <string>

#include "mdm/legality_graph.hpp"
#include "mdm/market.hpp"
#include "mdm/pricing.hpp"
#include "mdm/pricing_four.hpp"
#include "mdm/pricing_tri.hpp"
#include "mdm/pricing_two.hpp"

namespace testutil {

inline std::string check_structure_entry(const mdm::StructureEntry& e) {
    using namespace mdm;
    switch (e.kind) {
        case StructureKind::brute_base:
            if (e.market.num_items() > 6) return "brute base ran past the ordering-search cap";
            return "";
        case StructureKind::trivial_residual:
            return "";
        case StructureKind::shared_item: {
            if (!e.central) return "shared-item entry carries no item";
            for (Bundle mk : e.market.marks)
                if (!has(mk, *e.central)) return "shared item is not marked by every player";
            return "";
        }
        case StructureKind::removable_type1:
            if (!e.central) return "type-1 entry carries no central item";
            if (!is_removable_type1(e.market, e.allocation, e.items, *e.central))
                return "type-1 predicate failed on the logged snapshot";
            return "";
        case StructureKind::removable_type2:
            if (!is_removable_type2(e.market, e.allocation, e.items))
                return "type-2 predicate failed on the logged snapshot";
            return "";
        case StructureKind::removable_cycle: {
            const LegalityGraph g = build_legality_graph(e.market, e.allocation);
            if (e.items.size() % 2 != 0) return "removable cycle has odd length";
            if (!is_cycle(g, e.items) || !is_uniquely_assigned(g, e.items))
                return "removable cycle is not a uniquely assigned cycle";
            return "";
        }
        case StructureKind::type4_set: {
            const LegalityGraph g = build_legality_graph(e.market, e.allocation);
            if (e.items.size() % 2 == 0) return "type-4 cycle has even length";
            if (!is_cycle(g, e.items) || !is_uniquely_assigned(g, e.items))
                return "type-4 cycle is not a uniquely assigned cycle";
            return "";
        }
        case StructureKind::odd_cycle_pair: {
            const LegalityGraph g = build_legality_graph(e.market, e.allocation);
            if (!is_odd_cycle_pair(g, e.items, e.items2, e.overlap))
                return "odd-pair predicate failed on the logged snapshot";
            return "";
        }
        case StructureKind::pair_split:
        case StructureKind::generalized_pair_split: {
            SubmarketPair pair;
            for (ItemId x : e.items) pair.items_b |= bit(x);
            pair.players_b = e.players;
            pair.generalized = e.kind == StructureKind::generalized_pair_split;
            if (!is_submarket_pair(e.market, pair))
                return "submarket-pair predicate failed on the logged snapshot";
            return "";
        }
        case StructureKind::base_two_players:
            if (e.market.num_players() != 2) return "two-player base on a different player count";
            return "";
        case StructureKind::base_small_market:
            if (e.market.num_items() > 2) return "small-market base with more than two items";
            return "";
        case StructureKind::base_single_player:
            if (e.market.num_players() != 1) return "single-player base with company";
            return "";
        case StructureKind::unit_demand_reduction: {
            if (e.players.size() != 1) return "unit reduction names no player";
            if (e.market.demands[e.players.front()] != 1)
                return "unit reduction on a non-unit player";
            return "";
        }
        case StructureKind::fixed_item_removal: {
            if (e.players.size() != 1 || !e.central) return "fixed-item removal names no anchor";
            if (!has(e.market.marks[e.players.front()], *e.central))
                return "fixed-item removal player does not mark the item";
            return "";
        }
    }
    return "unknown structure kind";
}

// Convenience for whole logs; returns the first failure, tagged with the
// entry index and kind name.
inline std::string check_structure_log(const mdm::StructureLog& log) {
    for (std::size_t t = 0; t < log.entries.size(); ++t) {
        const std::string err = check_structure_entry(log.entries[t]);
        if (!err.empty())
            return "entry " + std::to_string(t) + " (" +
                   mdm::structure_kind_name(log.entries[t].kind) + "): " + err;
    }
    return "";
}

}  // namespace testutil
