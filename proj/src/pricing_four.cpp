// pricing_four.cpp - removable-set search and pricing for up to four players.

#include "mdm/pricing_four.hpp"

#include <algorithm>
#include <utility>

#include "mdm/errors.hpp"
#include "mdm/legality_graph.hpp"
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

ItemId lowest_item(Bundle b) {
    require_invariant(b != 0, "expected a nonempty item set");
    return static_cast<ItemId>(__builtin_ctz(b));
}

PlayerId owner_of(const Allocation& a, ItemId x) {
    for (PlayerId i = 0; i < static_cast<PlayerId>(a.bundles.size()); ++i)
        if (has(a.bundles[i], x)) return i;
    throw InvariantError("item has no owner in the allocation");
}

// Bit i set when player i marks x.
Bundle markers_of(const SimplifiedMarket& s, ItemId x) {
    Bundle out = 0;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        if (has(s.marks[i], x)) out |= Bundle{1} << i;
    return out;
}

RemovableSet make_type1(const SimplifiedMarket& s, const Allocation& a, std::vector<ItemId> items,
                        ItemId central) {
    require_invariant(is_removable_type1(s, a, items, central),
                      "constructed set failed the type-1 predicate");
    RemovableSet out;
    out.kind = RemovableKind::type1;
    out.items = std::move(items);
    out.central = central;
    out.allocation = a;
    return out;
}

RemovableSet make_type2(const SimplifiedMarket& s, const Allocation& a, std::vector<ItemId> items) {
    require_invariant(is_removable_type2(s, a, items),
                      "constructed set failed the type-2 predicate");
    RemovableSet out;
    out.kind = RemovableKind::type2;
    out.items = std::move(items);
    out.allocation = a;
    return out;
}

// Uniquely assigned 3-cycle with a fourth player off the cycle. The cycle is
// relabeled so the fourth player's item is reachable from the last position,
// then the case split follows where the extra neighbor item lives.
RemovableSet solve_cycle3(const SimplifiedMarket& s, Allocation a, std::vector<ItemId> cycle) {
    require_invariant(s.num_players() == 4 && cycle.size() == 3,
                      "three-item cycles arise only with a fourth player present");
    Bundle cycle_owners = 0;
    for (ItemId x : cycle) cycle_owners |= Bundle{1} << owner_of(a, x);
    PlayerId p4 = -1;
    for (PlayerId i = 0; i < 4; ++i)
        if (!has(cycle_owners, i)) p4 = i;
    require_invariant(p4 >= 0, "cycle owners must leave out exactly one player");
    const ItemId x4 = lowest_item(a.bundles[p4]);

    int j = -1;
    for (int t = 0; t < 3 && j < 0; ++t)
        if (has(s.marks[owner_of(a, cycle[t])], x4)) j = t;
    require_invariant(j >= 0, "some cycle owner marks the off-cycle player's item");
    const ItemId x3 = cycle[j];
    const ItemId x2 = cycle[(j + 1) % 3];
    const ItemId x1 = cycle[(j + 2) % 3];
    const PlayerId p1 = owner_of(a, x1);
    const PlayerId p2 = owner_of(a, x2);
    const PlayerId p3 = owner_of(a, x3);

    if (s.marks[p4] & mask_of(cycle)) return make_type2(s, a, {x1, x2, x3, x4});

    const Bundle extra = s.marks[p4] & ~a.bundles[p4];
    require_invariant(extra != 0, "a non-exclusive bundle leaves the fourth player extra marks");
    ItemId x5 = lowest_item(extra);
    const PlayerId o5 = owner_of(a, x5);
    if (o5 == p1) {
        a = reallocate_along_cycle(s, a, {x3, x4, x5});
        return make_type2(s, a, {x1, x2, x4, x5});
    }
    if (o5 == p2) return make_type2(s, a, {x1, x3, x4, x5});
    require_invariant(o5 == p3, "the extra item belongs to a cycle owner");

    const Bundle back_two = (Bundle{1} << p3) | (Bundle{1} << p4);
    const bool conf4 = (markers_of(s, x4) & ~back_two) == 0;
    const bool conf5 = (markers_of(s, x5) & ~back_two) == 0;
    if (conf4 && conf5) return make_type1(s, a, {x4, x5}, x5);

    ItemId xa = x4;  // owned by the off-cycle player
    ItemId xb = x5;  // owned by the cycle player, wanted outside the back pair
    if (!has(s.marks[p1], xb) && !has(s.marks[p2], xb)) {
        a = reallocate_along_cycle(s, a, {x4, x5});
        std::swap(xa, xb);
    }
    if (has(s.marks[p1], xb)) {
        a = reallocate_along_cycle(s, a, {x1, xb, x2});
        return make_type2(s, a, {x1, x2, xa, xb});
    }
    require_invariant(has(s.marks[p2], xb), "the swapped item is marked by a front player");
    return make_type1(s, a, {x2, xa, xb}, xb);
}

// Uniquely assigned 2-cycle; three or four players total.
RemovableSet solve_cycle2(const SimplifiedMarket& s, Allocation a, const LegalityGraph& g,
                          std::vector<ItemId> cycle) {
    ItemId x1 = cycle[0];
    ItemId x2 = cycle[1];
    PlayerId p1 = owner_of(a, x1);
    PlayerId p2 = owner_of(a, x2);
    const Bundle front_two = (Bundle{1} << p1) | (Bundle{1} << p2);
    const Bundle third1 = markers_of(s, x1) & ~front_two;
    const Bundle third2 = markers_of(s, x2) & ~front_two;
    if (!third1 && !third2) return make_type1(s, a, {x1, x2}, x2);
    if (!third2) {  // orient so x2 carries a third-player mark
        std::swap(x1, x2);
        std::swap(p1, p2);
    }
    PlayerId p3 = -1;
    for (PlayerId i = 0; i < s.num_players() && p3 < 0; ++i)
        if (has(markers_of(s, x2) & ~front_two, i)) p3 = i;
    const ItemId x3 = lowest_item(a.bundles[p3]);
    if (has(s.marks[p1], x3)) {
        std::vector<ItemId> closed = {x1, x3, x2};
        require_invariant(is_cycle(g, closed) && is_uniquely_assigned(g, closed),
                          "the third item closes a uniquely assigned 3-cycle");
        if (s.num_players() == 3) return make_type2(s, a, std::move(closed));
        return solve_cycle3(s, std::move(a), std::move(closed));
    }
    if (has(s.marks[p2], x3)) return make_type1(s, a, {x1, x2, x3}, x2);

    require_invariant(s.num_players() == 4,
                      "with three players the third item is marked inside the cycle");
    PlayerId p4 = -1;
    for (PlayerId i = 0; i < 4; ++i)
        if (i != p1 && i != p2 && i != p3) p4 = i;
    require_invariant(has(s.marks[p4], x3), "the remaining player marks the third item");
    const ItemId x4 = lowest_item(a.bundles[p4]);
    if (has(s.marks[p1], x4) || has(s.marks[p2], x4))
        return make_type2(s, a, {x1, x2, x3, x4});
    return make_type1(s, a, {x3, x4}, x4);
}

}  // namespace

bool is_removable_type1(const SimplifiedMarket& s, const Allocation& a,
                        const std::vector<ItemId>& items, ItemId central) {
    const Bundle set = mask_of(items);
    if (!has(set, central)) return false;
    if (static_cast<int>(items.size()) != popcount(set)) return false;
    const PlayerId ic = owner_of(a, central);
    std::vector<int> owned(s.num_players(), 0);
    for (ItemId x : items) {
        if (x == central) continue;
        const PlayerId o = owner_of(a, x);
        if (o == ic) return false;
        if (!has(s.marks[ic], x)) return false;  // interchangeable for the central owner
        ++owned[o];
    }
    for (PlayerId i = 0; i < s.num_players(); ++i) {
        if (i == ic) continue;
        const int want = has(s.marks[i], central) ? 1 : 0;
        if (owned[i] != want) return false;
    }
    return true;
}

bool is_removable_type2(const SimplifiedMarket& s, const Allocation& a,
                        const std::vector<ItemId>& items) {
    const Bundle set = mask_of(items);
    if (static_cast<int>(items.size()) != popcount(set)) return false;
    if (static_cast<int>(items.size()) != s.num_players()) return false;
    std::vector<int> owned(s.num_players(), 0);
    for (ItemId x : items) ++owned[owner_of(a, x)];
    for (int c : owned)
        if (c != 1) return false;
    const LegalityGraph g = build_legality_graph(s, a);
    const auto reaches_all = [&](bool forward) {
        Bundle seen = bit(items[0]);
        std::vector<ItemId> stack{items[0]};
        while (!stack.empty()) {
            const ItemId u = stack.back();
            stack.pop_back();
            for_each_item(set & ~seen, [&](ItemId v) {
                const bool edge = forward ? has(g.adj[u], v) : has(g.adj[v], u);
                if (edge && !has(seen, v)) {
                    seen |= bit(v);
                    stack.push_back(v);
                }
            });
        }
        return seen == set;
    };
    return reaches_all(true) && reaches_all(false);
}

RemovableSet find_removable_set(const SimplifiedMarket& s, const Allocation& a0) {
    s.validate();
    if (s.num_players() > 4)
        throw ValidationError("removable-set search handles at most four players");
    Bundle shared = s.all_items();
    for (Bundle mk : s.marks) shared &= mk;
    if (shared)
        throw ValidationError("an item marked by every player must be split off before searching");
    for (ItemId x = 0; x < s.num_items(); ++x)
        if (popcount(markers_of(s, x)) < 2)
            throw ValidationError("every item must be marked by at least two players");

    Allocation a = a0;
    const LegalityGraph g = build_legality_graph(s, a);
    std::vector<ItemId> cycle = find_uniquely_assigned_cycle(g);
    if (static_cast<int>(cycle.size()) == s.num_players()) return make_type2(s, a, std::move(cycle));
    if (cycle.size() == 3) return solve_cycle3(s, std::move(a), std::move(cycle));
    require_invariant(cycle.size() == 2, "uniquely assigned cycles here span two to four items");
    return solve_cycle2(s, std::move(a), g, std::move(cycle));
}

PriceVector price_four_players(const SimplifiedMarket& s, StructureLog* log, int depth) {
    s.validate();
    if (s.num_players() > 4) throw UnsupportedRegimeError("more than four players");
    const int m = s.num_items();
    if (m <= 3) {
        const auto p = brute_force_pricing(s);
        require_invariant(p.has_value(), "ordering search failed on a small market");
        if (log) {
            StructureEntry e;
            e.depth = depth;
            e.kind = StructureKind::brute_base;
            e.market = s;
            log->add(std::move(e));
        }
        return *p;
    }

    Allocation a = canonical_optimal_allocation(s.as_market());

    // An item everyone marks is priced above everything else; the rest of the
    // market is solved without it.
    Bundle shared = s.all_items();
    for (Bundle mk : s.marks) shared &= mk;
    if (shared) {
        const ItemId x = lowest_item(shared);
        if (log) {
            StructureEntry e;
            e.depth = depth;
            e.kind = StructureKind::shared_item;
            e.market = s;
            e.allocation = a;
            e.items = {x};
            e.central = x;
            log->add(std::move(e));
        }
        const InducedSubmarket sub = remove_items(s, a, bit(x));
        const PriceVector q = simplified_dynamic_price(sub.market, Regime::four_players, log, depth + 1);
        PriceVector out(m, Rational(0));
        out[x] = Rational(3, 4);
        for (std::size_t t = 0; t < sub.item_map.size(); ++t)
            out[sub.item_map[t]] = q[t] / Rational(2);
        return out;
    }

    RemovableSet rm = find_removable_set(s, a);
    a = rm.allocation;
    if (log) {
        StructureEntry e;
        e.depth = depth;
        e.kind = rm.kind == RemovableKind::type1 ? StructureKind::removable_type1
                                                 : StructureKind::removable_type2;
        e.market = s;
        e.allocation = a;
        e.items = rm.items;
        e.central = rm.central;
        log->add(std::move(e));
    }

    const Bundle set = mask_of(rm.items);
    PriceVector out(m, Rational(0));
    PriceVector q;
    if (set != s.all_items()) {
        const InducedSubmarket sub = remove_items(s, a, set);
        q = simplified_dynamic_price(sub.market, Regime::four_players, log, depth + 1);
        for (std::size_t t = 0; t < sub.item_map.size(); ++t)
            out[sub.item_map[t]] = q[t] / Rational(2);
    }

    std::vector<ItemId> high(rm.items.begin(), rm.items.end());
    if (rm.kind == RemovableKind::type1)
        high.erase(std::remove(high.begin(), high.end(), *rm.central), high.end());
    std::sort(high.begin(), high.end());
    const int hc = static_cast<int>(high.size());
    for (int t = 0; t < hc; ++t) out[high[t]] = Rational(3, 4) + Rational(t + 1, 4 * (hc + 1));

    if (rm.kind == RemovableKind::type1) {
        require_invariant(!q.empty(), "a type-1 set never covers the whole market");
        Rational lo = q[0];
        for (const Rational& v : q) lo = std::min(lo, v);
        out[*rm.central] = lo / Rational(4);  // half the cheapest leftover price
    }
    return out;
}

}  // namespace mdm
