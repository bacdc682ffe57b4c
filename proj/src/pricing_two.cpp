// pricing_two.cpp - cycle structures and pricing for markets with two optima.

#include "mdm/pricing_two.hpp"

#include <algorithm>
#include <utility>

#include "mdm/errors.hpp"
#include "mdm/matching.hpp"
#include "mdm/pricing.hpp"
#include "mdm/verify.hpp"

namespace mdm {
namespace {

Bundle mask_of(const std::vector<ItemId>& items) {
    Bundle b = 0;
    for (ItemId x : items) b |= bit(x);
    return b;
}

Bundle markers_of(const SimplifiedMarket& s, ItemId x) {
    Bundle out = 0;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        if (has(s.marks[i], x)) out |= Bundle{1} << i;
    return out;
}

std::vector<ItemId> rotate_to(const std::vector<ItemId>& c, ItemId base) {
    const auto it = std::find(c.begin(), c.end(), base);
    require_invariant(it != c.end(), "rotation base must lie on the cycle");
    const int l = static_cast<int>(c.size());
    const int off = static_cast<int>(it - c.begin());
    std::vector<ItemId> out(c.size());
    for (int t = 0; t < l; ++t) out[t] = c[(off + t) % l];
    return out;
}

Bundle owners_of(const LegalityGraph& g, const std::vector<ItemId>& c) {
    Bundle out = 0;
    for (ItemId x : c) out |= Bundle{1} << g.owner[x];
    return out;
}

}  // namespace

bool is_odd_cycle_pair(const LegalityGraph& g, const std::vector<ItemId>& c1,
                       const std::vector<ItemId>& c2, int overlap) {
    if (!is_cycle(g, c1) || !is_uniquely_assigned(g, c1)) return false;
    if (!is_cycle(g, c2) || !is_uniquely_assigned(g, c2)) return false;
    const int l1 = static_cast<int>(c1.size());
    const int l2 = static_cast<int>(c2.size());
    if (l1 % 2 == 0 || l2 % 2 == 0) return false;
    if (overlap < 0 || overlap > std::min(l1, l2) - 2) return false;
    if (c1[0] != c2[0]) return false;  // shared base vertex
    if (c1 == c2) return false;        // the same cycle is not a pair
    for (int j = 1; j <= overlap; ++j)
        if (c1[l1 - j] != c2[l2 - j]) return false;
    return popcount(owners_of(g, c1) & owners_of(g, c2)) == overlap + 2;
}

CycleStructure find_cycle_structure(const LegalityGraph& g) {
    const UaCycleList en = enumerate_ua_cycles(g);
    require_invariant(!en.truncated, "cycle enumeration overflowed on a small market");
    require_invariant(!en.cycles.empty(), "this legality graph always carries a cycle");
    for (const auto& c : en.cycles)
        if (c.size() % 2 == 0) return {CycleStructureKind::removable_cycle, c, {}, -1};

    // All cycles are odd; look for two that merge into an even one. The owner
    // counts pin the only overlap value worth testing.
    for (std::size_t ia = 0; ia < en.cycles.size(); ++ia)
        for (std::size_t ib = 0; ib < en.cycles.size(); ++ib) {
            if (ia == ib) continue;
            const auto& ca = en.cycles[ia];
            const auto& cb = en.cycles[ib];
            const int l1 = static_cast<int>(ca.size());
            const int l2 = static_cast<int>(cb.size());
            const int r = l1 + l2 - 2 - popcount(owners_of(g, ca) | owners_of(g, cb));
            if (r < 0) continue;
            CycleStructure out;
            bool found = false;
            for_each_item(mask_of(ca) & mask_of(cb), [&](ItemId v) {
                if (found) return;
                std::vector<ItemId> r1 = rotate_to(ca, v);
                std::vector<ItemId> r2 = rotate_to(cb, v);
                if (is_odd_cycle_pair(g, r1, r2, r)) {
                    out = {CycleStructureKind::odd_cycle_pair, std::move(r1), std::move(r2), r};
                    found = true;
                }
            });
            if (found) return out;
        }
    return {CycleStructureKind::type4_set, find_uniquely_assigned_cycle(g), {}, -1};
}

PriceVector price_two_allocations(const SimplifiedMarket& s, StructureLog* log, int depth) {
    s.validate();
    for (ItemId x = 0; x < s.num_items(); ++x)
        if (popcount(markers_of(s, x)) < 2)
            throw ValidationError("every item must be marked by at least two players");
    const Market full = s.as_market();
    const EnumerationResult en = enumerate_optimal_allocations(full, 3);
    if (en.truncated || en.allocations.size() > 2)
        throw UnsupportedRegimeError("more than two optimal allocations");

    // No small-size shortcut here: the recursion driver already handles
    // tiny markets before dispatching, and a direct call on a two- or
    // three-item residual should exercise the banding it documents.
    const int m = s.num_items();
    require_invariant(en.allocations.size() == 2,
                      "with shared-only items a second optimum always exists");
    for (int k : s.demands)
        require_invariant(k == 1, "two optima with shared-only items force unit demands");
    require_invariant(s.num_players() == m, "unit demands in a saturated market match items");

    Allocation a = canonical_optimal_allocation(full);
    LegalityGraph g = build_legality_graph(s, a);
    CycleStructure cs = find_cycle_structure(g);
    if (cs.kind == CycleStructureKind::odd_cycle_pair) {
        if (log) {
            StructureEntry e;
            e.depth = depth;
            e.kind = StructureKind::odd_cycle_pair;
            e.market = s;
            e.allocation = a;
            e.items = cs.cycle;
            e.items2 = cs.cycle2;
            e.overlap = cs.overlap;
            log->add(std::move(e));
        }
        const int merged = static_cast<int>(cs.cycle.size() + cs.cycle2.size()) - 2 * cs.overlap - 2;
        a = reallocate_along_cycle(s, a, cs.cycle2);
        g = build_legality_graph(s, a);
        const UaCycleList after = enumerate_ua_cycles(g);
        bool promised = false;
        for (const auto& c : after.cycles)
            promised = promised || static_cast<int>(c.size()) == merged;
        require_invariant(promised && merged % 2 == 0,
                          "reallocating along the second cycle reveals the merged even cycle");
        cs = find_cycle_structure(g);
        require_invariant(cs.kind == CycleStructureKind::removable_cycle,
                          "an even cycle exists after the merge");
    }

    const std::vector<ItemId>& cyc = cs.cycle;
    const int len = static_cast<int>(cyc.size());
    std::vector<std::pair<ItemId, int>> banded;  // (item, cycle position)
    if (cs.kind == CycleStructureKind::removable_cycle) {
        for (int t = 0; t < len; ++t) banded.push_back({cyc[t], t});
    } else {
        // A lone odd cycle: its base item stays behind with the leftovers.
        for (int t = 1; t < len; ++t) banded.push_back({cyc[t], t});
    }
    if (log) {
        StructureEntry e;
        e.depth = depth;
        e.kind = cs.kind == CycleStructureKind::removable_cycle ? StructureKind::removable_cycle
                                                                : StructureKind::type4_set;
        e.market = s;
        e.allocation = a;
        e.items = cyc;
        log->add(std::move(e));
    }

    Bundle set = 0;
    for (const auto& [x, t] : banded) set |= bit(x);
    PriceVector out(m, Rational(0));
    if (set != s.all_items()) {
        const InducedSubmarket sub = remove_items(s, a, set);
        const PriceVector q =
            simplified_dynamic_price(sub.market, Regime::two_allocations, log, depth + 1);
        for (std::size_t t = 0; t < sub.item_map.size(); ++t)
            out[sub.item_map[t]] = Rational(1, 4) + q[t] / Rational(2);
    }
    for (const auto& [x, t] : banded) {
        out[x] = t % 2 == 1 ? Rational(3, 4) + Rational(t + 1, 4 * (len + 1))
                            : Rational(t + 1, 4 * (len + 1));
    }
    return out;
}

}  // namespace mdm
