// pricing.cpp - recursion driver: peel, dispatch, recombine, re-quantize.

#include "mdm/pricing.hpp"

#include <algorithm>
#include <utility>

#include "mdm/errors.hpp"
#include "mdm/pricing_four.hpp"
#include "mdm/pricing_tri.hpp"
#include "mdm/pricing_two.hpp"
#include "mdm/verify.hpp"

namespace mdm {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::automatic: return "auto";
        case Regime::brute: return "brute";
        case Regime::four_players: return "four";
        case Regime::two_allocations: return "two-alloc";
        case Regime::tridemand: return "tri";
    }
    return "?";
}

const char* structure_kind_name(StructureKind k) {
    switch (k) {
        case StructureKind::brute_base: return "brute-base";
        case StructureKind::trivial_residual: return "trivial-residual";
        case StructureKind::shared_item: return "shared-item";
        case StructureKind::removable_type1: return "removable-type1";
        case StructureKind::removable_type2: return "removable-type2";
        case StructureKind::removable_cycle: return "removable-cycle";
        case StructureKind::odd_cycle_pair: return "odd-cycle-pair";
        case StructureKind::type4_set: return "type4-set";
        case StructureKind::pair_split: return "pair-split";
        case StructureKind::generalized_pair_split: return "generalized-pair-split";
        case StructureKind::base_two_players: return "base-two-players";
        case StructureKind::base_small_market: return "base-small-market";
        case StructureKind::base_single_player: return "base-single-player";
        case StructureKind::unit_demand_reduction: return "unit-demand-reduction";
        case StructureKind::fixed_item_removal: return "fixed-item-removal";
    }
    return "?";
}

PriceVector rank_quantize(const PriceVector& p) {
    const int m = static_cast<int>(p.size());
    std::vector<int> order(m);
    for (int x = 0; x < m; ++x) order[x] = x;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return p[a] < p[b]; });
    PriceVector out(m, Rational(0));
    for (int t = 0; t < m; ++t) {
        if (t > 0)
            require_invariant(p[order[t - 1]] < p[order[t]],
                              "rank quantization requires distinct prices");
        out[order[t]] = Rational(t + 1, m + 1);
    }
    return out;
}

namespace {

// First regime whose precondition the residual meets. Demand bounds and
// player counts are cheap; the optimum count is only probed as a last
// resort since it needs an enumeration.
Regime choose_regime(const SimplifiedMarket& s) {
    if (std::all_of(s.demands.begin(), s.demands.end(), [](int k) { return k <= 3; }))
        return Regime::tridemand;
    if (s.num_players() <= 4) return Regime::four_players;
    const EnumerationResult en = enumerate_optimal_allocations(s.as_market(), 3);
    if (!en.truncated && en.allocations.size() <= 2) return Regime::two_allocations;
    throw UnsupportedRegimeError(
        "no regime fits: a demand above three, more than four players, and more than two "
        "optimal allocations");
}

PriceVector regime_fine(const SimplifiedMarket& s, Regime regime, StructureLog* log, int depth) {
    switch (regime) {
        case Regime::four_players:
            return price_four_players(s, log, depth);
        case Regime::two_allocations:
            return price_two_allocations(s, log, depth);
        case Regime::tridemand:
            return price_tridemand(s, log, depth);
        default:
            break;
    }
    throw InvariantError("regime dispatch fell through");
}

bool residual_marks_clean(const SimplifiedMarket& s) {
    try {
        return marks_match_legality(s);
    } catch (const ValidationError&) {
        return false;
    }
}

}  // namespace

PriceVector simplified_dynamic_price(const SimplifiedMarket& s, Regime regime, StructureLog* log,
                                     int depth) {
    require_invariant(depth < 64, "pricing recursion exceeded its depth bound");
    s.validate();
    if (regime == Regime::brute || s.num_items() <= 3) {
        const auto p = brute_force_pricing(s);  // throws UnsupportedRegimeError past its cap
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

    const Market full = s.as_market();
    const LegalityInfo info = legality(full);
    const RoughPricing rough = rough_prices(full, info);
    const ResidualMarket res = residual_market(full, info, rough.prices);
    PriceVector combined;
    if (res.trivial) {
        if (log) {
            StructureEntry e;
            e.depth = depth;
            e.kind = StructureKind::trivial_residual;
            e.market = s;
            log->add(std::move(e));
        }
        combined = rough.prices;
    } else {
        require_invariant(residual_marks_clean(res.simplified),
                          "a residual's marks must equal its legality");
        const Regime chosen = regime == Regime::automatic ? choose_regime(res.simplified) : regime;
        PriceVector fine = regime_fine(res.simplified, chosen, log, depth);
        fine = rank_quantize(perturb_to_distinct(res.simplified.as_market(), fine));
        combined = combine_prices(full, res, rough.prices, fine);
    }
    const PriceVector out = rank_quantize(perturb_to_distinct(full, combined));
    require_invariant(!find_pricing_violation(full, out, info.max_welfare).has_value(),
                      "computed prices failed self-verification");
    return out;
}

MarketPricing dynamic_price_market(const Market& m, Regime regime) {
    m.validate();
    MarketPricing out;
    out.info = legality(m);
    out.rough = rough_prices(m, out.info);
    out.residual = residual_market(m, out.info, out.rough.prices);
    out.regime = regime;
    if (out.residual.trivial) {
        StructureEntry e;
        e.kind = StructureKind::trivial_residual;
        out.log.add(std::move(e));
        out.prices = perturb_to_distinct(m, out.rough.prices);
    } else {
        require_invariant(residual_marks_clean(out.residual.simplified),
                          "a residual's marks must equal its legality");
        if (regime == Regime::automatic) out.regime = choose_regime(out.residual.simplified);
        out.fine = simplified_dynamic_price(out.residual.simplified, out.regime, &out.log, 0);
        out.prices =
            perturb_to_distinct(m, combine_prices(m, out.residual, out.rough.prices, out.fine));
    }
    require_invariant(!find_pricing_violation(m, out.prices, out.info.max_welfare).has_value(),
                      "pipeline output failed verification");
    return out;
}

MarketPricing dynamic_price_market_fixed_at(const Market& m, ItemId item) {
    m.validate();
    if (item < 0 || item >= m.num_items()) throw ValidationError("unknown item to fix");
    MarketPricing out;
    out.info = legality(m);
    out.rough = rough_prices(m, out.info);
    out.residual = residual_market(m, out.info, out.rough.prices);
    out.regime = Regime::tridemand;
    if (out.residual.trivial)
        throw ValidationError("nothing to fix: every item is exclusively assigned");
    ItemId rx = -1;
    for (std::size_t t = 0; t < out.residual.item_map.size(); ++t)
        if (out.residual.item_map[t] == item) rx = static_cast<ItemId>(t);
    if (rx < 0)
        throw ValidationError(
            "the fixed item is exclusively assigned; only residual items have a free ordering");
    require_invariant(residual_marks_clean(out.residual.simplified),
                      "a residual's marks must equal its legality");
    const FixedPricing fp = price_fixed_at(out.residual.simplified, rx, &out.log, 0);
    // Band constants can carry deep denominators; ranks keep the ordering and
    // keep the later common-denominator arithmetic inside 64 bits.
    out.fine = rank_quantize(fp.prices);
    out.prices =
        perturb_to_distinct(m, combine_prices(m, out.residual, out.rough.prices, out.fine));
    require_invariant(!find_pricing_violation(m, out.prices, out.info.max_welfare).has_value(),
                      "pipeline output failed verification");
    // Rough prices level utilities inside each player's shared tier, so the
    // residual ordering lives in the increments above rough, not in absolute
    // prices: two residual items can sit on different rough tiers.  The fixed
    // item keeps the strictly smallest increment, which makes it the first
    // residual choice of every player whose legal set contains it.
    for (ItemId orig : out.residual.item_map)
        if (orig != item)
            require_invariant(out.prices[item] - out.rough.prices[item] <
                                  out.prices[orig] - out.rough.prices[orig],
                              "the fixed item must keep the smallest residual increment");
    return out;
}

}  // namespace mdm
