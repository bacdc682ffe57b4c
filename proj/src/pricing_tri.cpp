// pricing_tri.cpp - fixed-item pricing for demands of at most three.

#include "mdm/pricing_tri.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "mdm/errors.hpp"
#include "mdm/matching.hpp"
#include "mdm/pricing.hpp"
#include "mdm/verify.hpp"

namespace mdm {
namespace {

// Nested splits can carry an outer stand-in into the next left fragment, so
// the name embeds the recursion depth to stay unique.
std::string aux_unit_name(int depth) { return "aux:crossover-unit:" + std::to_string(depth); }
std::string aux_bi_name(int depth) { return "aux:crossover-bi:" + std::to_string(depth); }

ItemId lowest_item(Bundle b) {
    require_invariant(b != 0, "expected a nonempty item set");
    return static_cast<ItemId>(__builtin_ctz(b));
}

Bundle player_mask(const std::vector<PlayerId>& players) {
    Bundle out = 0;
    for (PlayerId i : players) out |= Bundle{1} << i;
    return out;
}

struct FragPlayer {
    std::string name;
    int demand;
    Bundle marks;  // in original item ids
};

// A translated piece of the host market: chosen items, chosen players, marks
// restricted to the piece.
struct Fragment {
    SimplifiedMarket market;
    std::vector<ItemId> item_map;    // fragment item -> original item
    std::vector<ItemId> old_to_new;  // original item -> fragment item or -1
};

Fragment make_fragment(const SimplifiedMarket& s, Bundle items,
                       const std::vector<FragPlayer>& players) {
    Fragment f;
    f.old_to_new.assign(s.num_items(), -1);
    for_each_item(items, [&](ItemId x) {
        f.old_to_new[x] = static_cast<ItemId>(f.item_map.size());
        f.item_map.push_back(x);
        f.market.item_names.push_back(s.item_names[x]);
    });
    for (const FragPlayer& p : players) {
        Bundle mk = 0;
        for_each_item(p.marks & items, [&](ItemId x) { mk |= bit(f.old_to_new[x]); });
        f.market.player_names.push_back(p.name);
        f.market.demands.push_back(p.demand);
        f.market.marks.push_back(mk);
    }
    f.market.validate();
    return f;
}

void require_fragment_clean(const Fragment& f, const char* what) {
    bool ok = false;
    try {
        ok = marks_match_legality(f.market);
    } catch (const ValidationError&) {
        ok = false;
    }
    require_invariant(ok, what);
}

// An anchored fragment can pin its anchors: when every anchor item is marked
// by the same single player of the fragment and that player's demand equals
// the anchor count, every full assignment hands the player exactly the
// anchors, and the player's remaining marks inside the fragment drop out of
// legality.  Trim them so the fragment keeps marks equal to legality.  The
// trimmed buyer is still served correctly by the stitched price order: they
// never take more items than their demand, and whenever this split runs,
// every legal assignment of that many items extends to an optimal allocation
// (single items by the definition of legality, pairs because the split for
// three-item witnesses only runs once all two-item assignments extend).
void trim_pinned_anchor_owner(Fragment& f, Bundle anchors) {
    PlayerId owner = -1;
    for (PlayerId i = 0; i < f.market.num_players(); ++i) {
        if (!(f.market.marks[i] & anchors)) continue;
        if (owner >= 0) return;  // anchors reach several players: nothing is pinned
        owner = i;
    }
    if (owner < 0) return;
    if (f.market.demands[owner] != popcount(anchors)) return;
    f.market.marks[owner] = anchors;
}

void log_entry(StructureLog* log, int depth, StructureKind kind, const SimplifiedMarket& s,
               std::vector<ItemId> items, std::vector<PlayerId> players,
               std::optional<ItemId> central) {
    if (!log) return;
    StructureEntry e;
    e.depth = depth;
    e.kind = kind;
    e.market = s;
    e.items = std::move(items);
    e.players = std::move(players);
    e.central = central;
    log->add(std::move(e));
}

std::vector<ItemId> item_list(Bundle b) {
    std::vector<ItemId> out;
    for_each_item(b, [&](ItemId x) { out.push_back(x); });
    return out;
}

bool witness_fits(const SimplifiedMarket& s, const Allocation& w) {
    for (PlayerId i = 0; i < s.num_players(); ++i) {
        if (w.bundles[i] & ~s.marks[i]) return false;
        if (popcount(w.bundles[i]) > s.demands[i]) return false;
    }
    return true;
}

// Smallest (by item pair, then player pair) two-item assignment that no
// welfare-optimal completion can absorb.
std::optional<Allocation> size2_witness(const SimplifiedMarket& s) {
    const int m = s.num_items();
    const int n = s.num_players();
    for (ItemId x1 = 0; x1 < m; ++x1)
        for (ItemId x2 = x1 + 1; x2 < m; ++x2)
            for (PlayerId i1 = 0; i1 < n; ++i1)
                for (PlayerId i2 = 0; i2 < n; ++i2) {
                    Allocation w;
                    w.bundles.assign(n, 0);
                    w.bundles[i1] |= bit(x1);
                    w.bundles[i2] |= bit(x2);
                    if (!witness_fits(s, w)) continue;
                    if (!is_extendable(s, w)) return w;
                }
    return std::nullopt;
}

// Three-item variant; the fixed item must be part of the assignment.
std::optional<Allocation> size3_witness(const SimplifiedMarket& s, ItemId xf) {
    const int m = s.num_items();
    const int n = s.num_players();
    for (ItemId x2 = 0; x2 < m; ++x2) {
        if (x2 == xf) continue;
        for (ItemId x3 = x2 + 1; x3 < m; ++x3) {
            if (x3 == xf) continue;
            for (PlayerId i1 = 0; i1 < n; ++i1)
                for (PlayerId i2 = 0; i2 < n; ++i2)
                    for (PlayerId i3 = 0; i3 < n; ++i3) {
                        Allocation w;
                        w.bundles.assign(n, 0);
                        w.bundles[i1] |= bit(xf);
                        w.bundles[i2] |= bit(x2);
                        w.bundles[i3] |= bit(x3);
                        if (!witness_fits(s, w)) continue;
                        if (!is_extendable(s, w)) return w;
                    }
        }
    }
    return std::nullopt;
}

PriceVector fixed_at_rec(const SimplifiedMarket& s, ItemId xf, StructureLog* log, int depth);

// Splits off the submarket pair found through a two-item witness and stitches
// the two recursive price vectors back together.
PriceVector price_pair(const SimplifiedMarket& s, ItemId xf, const SubmarketPair& pair,
                       StructureLog* log, int depth) {
    const Bundle xb = pair.items_b;
    const Bundle xc = s.all_items() & ~xb;
    const Bundle cross = crossover_items(s, pair);
    const Bundle ib = player_mask(pair.players_b);
    log_entry(log, depth, StructureKind::pair_split, s, item_list(xb), pair.players_b, xf);

    std::vector<FragPlayer> bplayers;
    for (PlayerId i : pair.players_b) bplayers.push_back({s.player_names[i], s.demands[i], s.marks[i]});
    bplayers.push_back({aux_unit_name(depth), 1, cross});
    const Fragment B = make_fragment(s, xb, bplayers);
    require_fragment_clean(B, "the augmented left fragment keeps marks equal to legality");

    const auto make_c = [&](Bundle anchor) {
        std::vector<FragPlayer> cplayers;
        for (PlayerId i = 0; i < s.num_players(); ++i)
            if (!has(ib, i)) cplayers.push_back({s.player_names[i], s.demands[i], s.marks[i]});
        Fragment C = make_fragment(s, xc | anchor, cplayers);
        Bundle anchors_new = 0;
        for_each_item(anchor, [&](ItemId x) { anchors_new |= bit(C.old_to_new[x]); });
        trim_pinned_anchor_owner(C, anchors_new);
        require_fragment_clean(C, "the anchored right fragment keeps marks equal to legality");
        return C;
    };

    PriceVector out(s.num_items(), Rational(0));
    if (has(cross, xf)) {
        // Fixed item is a crossover: it anchors both sides, cheap side first.
        const PriceVector pb = fixed_at_rec(B.market, B.old_to_new[xf], log, depth + 1);
        const Fragment C = make_c(bit(xf));
        const PriceVector pc = fixed_at_rec(C.market, C.old_to_new[xf], log, depth + 1);
        for_each_item(xc | bit(xf), [&](ItemId x) { out[x] = pc[C.old_to_new[x]] / Rational(2); });
        for_each_item(xb & ~bit(xf),
                      [&](ItemId x) { out[x] = Rational(1, 2) + pb[B.old_to_new[x]] / Rational(2); });
    } else if (has(xb, xf)) {
        // Fixed item sits left of the crossover threshold; everything at or
        // below the cheapest crossover stays below the right side.
        const PriceVector pb = fixed_at_rec(B.market, B.old_to_new[xf], log, depth + 1);
        ItemId y = -1;
        for_each_item(cross, [&](ItemId x) {
            if (y < 0 || pb[B.old_to_new[x]] < pb[B.old_to_new[y]]) y = x;
        });
        const Fragment C = make_c(bit(y));
        const PriceVector pc = fixed_at_rec(C.market, C.old_to_new[y], log, depth + 1);
        const Rational py = pb[B.old_to_new[y]];
        for_each_item(xb, [&](ItemId x) {
            const Rational v = pb[B.old_to_new[x]];
            // Only the bridging crossover may sit in the cheap band: another
            // crossover tied with it would hand an outside player two cheap
            // left-side items at once, which no optimal allocation absorbs.
            const bool cheap = x == y || (!has(cross, x) && v <= py);
            out[x] = cheap ? v * Rational(2, 5) : Rational(4, 5) + v / Rational(5);
        });
        for_each_item(
            xc, [&](ItemId x) { out[x] = Rational(2, 5) + pc[C.old_to_new[x]] * Rational(2, 5); });
    } else {
        // Fixed item is on the right; the smallest crossover bridges the gap.
        const ItemId y = lowest_item(cross);
        const PriceVector pb = fixed_at_rec(B.market, B.old_to_new[y], log, depth + 1);
        const Fragment C = make_c(bit(y));
        const PriceVector pc = fixed_at_rec(C.market, C.old_to_new[xf], log, depth + 1);
        for_each_item(xc | bit(y), [&](ItemId x) { out[x] = pc[C.old_to_new[x]] / Rational(2); });
        for_each_item(xb & ~bit(y),
                      [&](ItemId x) { out[x] = Rational(1, 2) + pb[B.old_to_new[x]] / Rational(2); });
    }
    return out;
}

// Splits along a three-item witness: the left side absorbs a two-demand
// stand-in for the outside players, whose two cheapest crossovers then pin
// the five price bands.
PriceVector price_generalized(const SimplifiedMarket& s, ItemId xf, const SubmarketPair& pair,
                              StructureLog* log, int depth) {
    const Bundle xb = pair.items_b;
    const Bundle xc = s.all_items() & ~xb;
    const Bundle cross = crossover_items(s, pair);
    const Bundle ib = player_mask(pair.players_b);
    require_invariant(has(xb, xf), "a witness holding the fixed item pins it to the left side");
    log_entry(log, depth, StructureKind::generalized_pair_split, s, item_list(xb), pair.players_b,
              xf);

    std::vector<FragPlayer> bplayers;
    for (PlayerId i : pair.players_b) bplayers.push_back({s.player_names[i], s.demands[i], s.marks[i]});
    bplayers.push_back({aux_bi_name(depth), 2, cross});
    const Fragment B = make_fragment(s, xb, bplayers);
    require_fragment_clean(B, "the augmented left fragment keeps marks equal to legality");
    const PriceVector pb = fixed_at_rec(B.market, B.old_to_new[xf], log, depth + 1);

    ItemId y1 = -1, y2 = -1;
    for_each_item(cross, [&](ItemId x) {
        const Rational v = pb[B.old_to_new[x]];
        if (y1 < 0 || v < pb[B.old_to_new[y1]]) {
            y2 = y1;
            y1 = x;
        } else if (y2 < 0 || v < pb[B.old_to_new[y2]]) {
            y2 = x;
        }
    });
    require_invariant(y1 >= 0 && y2 >= 0, "a generalized pair carries at least three crossovers");

    std::vector<FragPlayer> cplayers;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        if (!has(ib, i)) cplayers.push_back({s.player_names[i], s.demands[i], s.marks[i]});
    Fragment C = make_fragment(s, xc | bit(y1) | bit(y2), cplayers);
    trim_pinned_anchor_owner(C, bit(C.old_to_new[y1]) | bit(C.old_to_new[y2]));
    require_fragment_clean(C, "the anchored right fragment keeps marks equal to legality");
    const PriceVector pc = fixed_at_rec(C.market, C.old_to_new[y1], log, depth + 1);

    const Rational by1 = pb[B.old_to_new[y1]];
    const Rational by2 = pb[B.old_to_new[y2]];
    const Rational cy2 = pc[C.old_to_new[y2]];
    PriceVector out(s.num_items(), Rational(0));
    for_each_item(xb, [&](ItemId x) {
        const Rational v = pb[B.old_to_new[x]];
        // The two bridging crossovers are banded by name, every other
        // crossover goes to the top band: a price tie must not let an outside
        // player reach a third left-side item below the right-side prices.
        if (x == y1)
            out[x] = v / Rational(5);
        else if (x == y2)
            out[x] = Rational(2, 5) + v / Rational(5);
        else if (has(cross, x))
            out[x] = Rational(4, 5) + v / Rational(5);
        else if (v <= by1)
            out[x] = v / Rational(5);
        else if (v <= by2)
            out[x] = Rational(2, 5) + v / Rational(5);
        else
            out[x] = Rational(4, 5) + v / Rational(5);
    });
    for_each_item(xc, [&](ItemId x) {
        const Rational v = pc[C.old_to_new[x]];
        out[x] = v <= cy2 ? Rational(1, 5) + v / Rational(5) : Rational(3, 5) + v / Rational(5);
    });
    return out;
}

// Removes one unit-demand player together with one of its marked items.
PriceVector price_unit(const SimplifiedMarket& s, ItemId xf, PlayerId unit, StructureLog* log,
                       int depth) {
    std::vector<FragPlayer> rest;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        if (i != unit) rest.push_back({s.player_names[i], s.demands[i], s.marks[i]});
    PriceVector out(s.num_items(), Rational(0));
    if (s.marks[unit] == bit(xf)) {
        // The unit player wants exactly the fixed item; both leave together
        // and the fixed item undercuts everything that remains.
        log_entry(log, depth, StructureKind::unit_demand_reduction, s, {xf}, {unit}, xf);
        const Fragment B = make_fragment(s, s.all_items() & ~bit(xf), rest);
        require_fragment_clean(B, "dropping a unit player keeps marks equal to legality");
        const PriceVector pb = fixed_at_rec(B.market, 0, log, depth + 1);
        out[xf] = Rational(1, 5);
        for_each_item(s.all_items() & ~bit(xf), [&](ItemId x) {
            out[x] = Rational(1, 5) + pb[B.old_to_new[x]] * Rational(4, 5);
        });
    } else {
        const ItemId xh = lowest_item(s.marks[unit] & ~bit(xf));
        log_entry(log, depth, StructureKind::unit_demand_reduction, s, {xh}, {unit}, xf);
        const Fragment B = make_fragment(s, s.all_items() & ~bit(xh), rest);
        require_fragment_clean(B, "dropping a unit player keeps marks equal to legality");
        const PriceVector pb = fixed_at_rec(B.market, B.old_to_new[xf], log, depth + 1);
        for_each_item(s.all_items() & ~bit(xh),
                      [&](ItemId x) { out[x] = pb[B.old_to_new[x]] * Rational(4, 5); });
        out[xh] = Rational(4, 5);
    }
    return out;
}

// Last resort: drop the fixed item, shrink its smallest marker's demand.
PriceVector price_remove_fixed(const SimplifiedMarket& s, ItemId xf, StructureLog* log, int depth) {
    PlayerId ix = -1;
    for (PlayerId i = 0; i < s.num_players() && ix < 0; ++i)
        if (has(s.marks[i], xf)) ix = i;
    require_invariant(ix >= 0, "the fixed item is marked by someone");
    require_invariant(s.demands[ix] >= 2,
                      "without unit players the marker keeps demand after the drop");
    log_entry(log, depth, StructureKind::fixed_item_removal, s, {xf}, {ix}, xf);
    std::vector<FragPlayer> rest;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        rest.push_back({s.player_names[i], s.demands[i] - (i == ix ? 1 : 0), s.marks[i]});
    const Fragment B = make_fragment(s, s.all_items() & ~bit(xf), rest);
    require_fragment_clean(B, "dropping the fixed item keeps marks equal to legality");
    const PriceVector pb = fixed_at_rec(B.market, 0, log, depth + 1);
    PriceVector out(s.num_items(), Rational(0));
    out[xf] = Rational(1, 5);
    for_each_item(s.all_items() & ~bit(xf),
                  [&](ItemId x) { out[x] = Rational(1, 5) + pb[B.old_to_new[x]] * Rational(4, 5); });
    return out;
}

PriceVector fixed_at_rec(const SimplifiedMarket& s, ItemId xf, StructureLog* log, int depth) {
    require_invariant(depth < 64, "fixed-item recursion exceeded its depth bound");
    const int m = s.num_items();
    const int n = s.num_players();

    if (n == 2) {
        log_entry(log, depth, StructureKind::base_two_players, s, {}, {}, xf);
        const Bundle both = s.marks[0] & s.marks[1];
        PriceVector out(m, Rational(0));
        for (ItemId x = 0; x < m; ++x) {
            if (x == xf)
                out[x] = Rational(1, 5);
            else if (has(both, x))
                out[x] = Rational(4, 5);
            else
                out[x] = Rational(1, 2);
        }
        return out;
    }
    if (m <= 2) {
        log_entry(log, depth, StructureKind::base_small_market, s, {}, {}, xf);
        PriceVector out(m, Rational(0));
        for (ItemId x = 0; x < m; ++x) out[x] = x == xf ? Rational(1, 5) : Rational(4, 5);
        return out;
    }
    if (n == 1) {
        log_entry(log, depth, StructureKind::base_single_player, s, {}, {}, xf);
        PriceVector out(m, Rational(0));
        int t = 0;
        for (ItemId x = 0; x < m; ++x) {
            if (x == xf)
                out[x] = Rational(1, m + 2);
            else
                out[x] = Rational(t++ + 2, m + 2);
        }
        return out;
    }

    if (const auto w = size2_witness(s))
        return price_pair(s, xf, find_submarket_pair(s, *w), log, depth);

    for (PlayerId i = 0; i < n; ++i)
        if (s.demands[i] == 1) return price_unit(s, xf, i, log, depth);

    if (const auto w = size3_witness(s, xf))
        return price_generalized(s, xf, find_submarket_pair(s, *w), log, depth);

    return price_remove_fixed(s, xf, log, depth);
}

}  // namespace

Bundle crossover_items(const SimplifiedMarket& s, const SubmarketPair& pair) {
    const Bundle ib = player_mask(pair.players_b);
    Bundle cross = 0;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        if (!has(ib, i)) cross |= s.marks[i];
    return cross & pair.items_b;
}

bool is_submarket_pair(const SimplifiedMarket& s, const SubmarketPair& pair) {
    const Bundle xb = pair.items_b & s.all_items();
    const Bundle xc = s.all_items() & ~xb;
    if (xb != pair.items_b) return false;
    if (!xb || !xc) return false;
    Bundle ib = 0;
    for (PlayerId i : pair.players_b) {
        if (i < 0 || i >= s.num_players() || has(ib, i)) return false;
        ib |= Bundle{1} << i;
    }
    if (!ib || popcount(ib) == s.num_players()) return false;
    int kb = 0;
    for (PlayerId i = 0; i < s.num_players(); ++i) {
        if (!has(ib, i)) continue;
        if (s.marks[i] & ~xb) return false;  // left players mark only left items
        kb += s.demands[i];
    }
    const int spare = pair.generalized ? 2 : 1;
    if (popcount(xb) - spare != kb) return false;
    const Bundle cross = crossover_items(s, pair);
    if (popcount(cross) < spare + 1) return false;

    // Every choice of handover items must leave both halves fillable.
    std::vector<int> caps_b(s.num_players(), 0);
    std::vector<int> caps_c(s.num_players(), 0);
    for (PlayerId i = 0; i < s.num_players(); ++i)
        (has(ib, i) ? caps_b : caps_c)[i] = s.demands[i];
    const auto splits = [&](Bundle moved) {
        return !hall_violator(s, xb & ~moved, caps_b).has_value() &&
               !hall_violator(s, xc | moved, caps_c).has_value();
    };
    bool ok = true;
    if (!pair.generalized) {
        for_each_item(cross, [&](ItemId x) { ok = ok && splits(bit(x)); });
    } else {
        for_each_item(cross, [&](ItemId x) {
            for_each_item(cross & ~(bit(x) | (bit(x) - 1)),
                          [&](ItemId y) { ok = ok && splits(bit(x) | bit(y)); });
        });
    }
    return ok;
}

SubmarketPair find_submarket_pair(const SimplifiedMarket& s, const Allocation& witness) {
    s.validate();
    const int n = s.num_players();
    if (static_cast<int>(witness.bundles.size()) != n)
        throw ValidationError("witness must cover exactly the market's players");
    int size = 0;
    for (PlayerId i = 0; i < n; ++i) {
        if (witness.bundles[i] & ~s.marks[i]) throw ValidationError("witness assigns an unmarked item");
        if (popcount(witness.bundles[i]) > s.demands[i])
            throw ValidationError("witness exceeds a player's demand");
        size += popcount(witness.bundles[i]);
    }
    if (size != 2 && size != 3) throw ValidationError("witness must assign two or three items");
    if (is_extendable(s, witness))
        throw ValidationError("witness is extendable and splits nothing");

    const Bundle witems = witness.assigned();
    std::optional<SubmarketPair> best;
    Bundle best_players = 0;
    for (Bundle pm = 1; pm + 1 < (Bundle{1} << n); ++pm) {
        SubmarketPair cand;
        cand.generalized = size == 3;
        Bundle xb = 0;
        for (PlayerId i = 0; i < n; ++i)
            if (has(pm, i)) {
                cand.players_b.push_back(i);
                xb |= s.marks[i];
            }
        cand.items_b = xb;
        if ((witems & xb) != witems) continue;
        if (!is_submarket_pair(s, cand)) continue;
        const bool better =
            !best || popcount(xb) > popcount(best->items_b) ||
            (popcount(xb) == popcount(best->items_b) &&
             (xb < best->items_b || (xb == best->items_b && pm < best_players)));
        if (better) {
            best = cand;
            best_players = pm;
        }
    }
    require_invariant(best.has_value(), "a non-extendable witness always yields a submarket pair");
    return *best;
}

FixedPricing price_fixed_at(const SimplifiedMarket& s, ItemId item, StructureLog* log, int depth) {
    s.validate();
    if (item < 0 || item >= s.num_items()) throw ValidationError("fixed item out of range");
    for (int k : s.demands)
        if (k > 3) throw UnsupportedRegimeError("fixed-item pricing needs demands of at most three");
    PriceVector p = fixed_at_rec(s, item, log, depth);
    // Band arithmetic can tie items that sit in the same band of parallel
    // subtrees. Perturb only then; an already distinct vector is returned
    // exactly as the band constants produced it.
    bool tied = false;
    for (ItemId x = 0; x < s.num_items() && !tied; ++x)
        for (ItemId y = x + 1; y < s.num_items() && !tied; ++y)
            if (p[x] == p[y]) tied = true;
    if (tied) p = perturb_to_distinct(s.as_market(), p);
    for (ItemId x = 0; x < s.num_items(); ++x)
        if (x != item)
            require_invariant(p[item] < p[x], "the fixed item must come out strictly cheapest");
    return {std::move(p), item};
}

PriceVector price_tridemand(const SimplifiedMarket& s, StructureLog* log, int depth) {
    return price_fixed_at(s, 0, log, depth).prices;
}

}  // namespace mdm
