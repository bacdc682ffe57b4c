// simulate.cpp - arrival simulation and the exhaustive adversarial sweep.

#include "mdm/simulate.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "mdm/errors.hpp"
#include "mdm/matching.hpp"
#include "mdm/pricing.hpp"
#include "mdm/verify.hpp"

namespace mdm {
namespace {

PriceVector run_default_pricer(const Market& m) {
    try {
        return dynamic_price_market(m).prices;
    } catch (const UnsupportedRegimeError&) {
        // Structural regimes ran out; small residuals still have the
        // exhaustive ordering search, whose own cap is the final word.
        return dynamic_price_market(m, Regime::brute).prices;
    }
}

Rational price_of(const PriceVector& p, Bundle b) {
    Rational total(0);
    for_each_item(b, [&](ItemId x) { total = total + p[x]; });
    return total;
}

// Validates that a purchase keeps the market saturated: every buyer must
// leave with exactly their demand, or the leftover market has more items
// than the remaining players can absorb.
void require_saturating(const Market& m, PlayerId buyer, Bundle bought) {
    require_invariant(popcount(bought) == m.players[buyer].demand,
                      "a purchase of fewer items than the buyer's demand leaves the market "
                      "unsaturated");
}

struct StateKey {
    Bundle players;
    Bundle items;
};

std::uint64_t key_of(Bundle players, Bundle items) {
    return (static_cast<std::uint64_t>(players) << 32) | items;
}

struct StateVal {
    bool failed = false;       // some branch at or below this state aborts
    bool has_welfare = false;  // some branch completes
    Rational mn, mx;           // welfare over completed branches
    PlayerId bad_player = -1;  // original index of the witness move (-1: died here)
    Bundle bad_bundle = 0;     // original item mask of the witness move
    std::string reason;        // diagnostic of the deepest failure
};

struct Sweep {
    const Market& original;
    Pricer pricer;
    std::uint64_t max_states;
    std::unordered_map<std::uint64_t, StateVal> memo;
    bool partial = false;

    const StateVal& eval(Bundle players, Bundle items) {
        const std::uint64_t key = key_of(players, items);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        if (memo.size() >= max_states) {
            partial = true;
            StateVal v;
            v.failed = true;
            v.reason = "state budget exceeded";
            return memo.emplace(key, std::move(v)).first->second;
        }
        StateVal v;
        if (players == 0) {
            require_invariant(items == 0, "players ran out before items");
            v.has_welfare = true;
            v.mn = v.mx = Rational(0);
            return memo.emplace(key, std::move(v)).first->second;
        }

        const SubMarket sub = restrict_market(original, players, items);
        PriceVector prices;
        try {
            legality(sub.market);  // standing assumptions on the residual
            prices = pricer(sub.market);
        } catch (const std::exception& e) {
            v.failed = true;
            v.reason = e.what();
            return memo.emplace(key, std::move(v)).first->second;
        }

        for (PlayerId ri = 0; ri < sub.market.num_players(); ++ri) {
            const PlayerId oi = sub.player_map[ri];
            std::vector<Bundle> bundles;
            try {
                bundles = demand_bundles(sub.market, prices, ri);
            } catch (const std::exception& e) {
                if (!v.failed) {
                    v.failed = true;
                    v.bad_player = -1;
                    v.reason = e.what();
                }
                continue;
            }
            for (Bundle b : bundles) {
                Bundle ob = 0;
                for_each_item(b, [&](ItemId x) { ob |= bit(sub.item_map[x]); });
                if (popcount(b) != sub.market.players[ri].demand) {
                    if (!v.failed) {
                        v.failed = true;
                        v.bad_player = oi;
                        v.bad_bundle = ob;
                        v.reason =
                            "a demanded bundle smaller than the buyer's demand breaks saturation";
                    }
                    continue;
                }
                const Rational val = bundle_value(sub.market, ri, b);
                const StateVal& child = eval(players & ~(Bundle{1} << oi), items & ~ob);
                if (child.failed && !v.failed) {
                    v.failed = true;
                    v.bad_player = oi;
                    v.bad_bundle = ob;
                    v.reason = child.reason;
                }
                if (child.has_welfare) {
                    const Rational lo = val + child.mn;
                    const Rational hi = val + child.mx;
                    if (!v.has_welfare) {
                        v.has_welfare = true;
                        v.mn = lo;
                        v.mx = hi;
                        if (!v.failed) {
                            v.bad_player = oi;
                            v.bad_bundle = ob;
                        }
                    } else {
                        if (lo < v.mn) {
                            v.mn = lo;
                            if (!v.failed) {
                                v.bad_player = oi;
                                v.bad_bundle = ob;
                            }
                        }
                        if (hi > v.mx) v.mx = hi;
                    }
                }
            }
        }
        return memo.emplace(key, std::move(v)).first->second;
    }

    // Replays the recorded worst branch into a trace.
    SimulationTrace walk(Bundle players, Bundle items) {
        SimulationTrace trace;
        trace.final_welfare = Rational(0);
        while (players != 0) {
            const StateVal& v = memo.at(key_of(players, items));
            SimulationStep step;
            SubMarket sub = restrict_market(original, players, items);
            step.player_map = sub.player_map;
            step.item_map = sub.item_map;
            if (v.failed && v.bad_player < 0) {
                // Died repricing this state: record the market, no purchase.
                step.market = std::move(sub.market);
                trace.steps.push_back(std::move(step));
                break;
            }
            try {
                step.prices = pricer(sub.market);
            } catch (const std::exception&) {
                step.market = std::move(sub.market);
                trace.steps.push_back(std::move(step));
                break;
            }
            PlayerId ri = -1;
            for (PlayerId r = 0; r < sub.market.num_players(); ++r)
                if (sub.player_map[r] == v.bad_player) ri = r;
            require_invariant(ri >= 0, "witness move names a departed player");
            Bundle rb = 0;
            for (ItemId x = 0; x < sub.market.num_items(); ++x)
                if (has(v.bad_bundle, sub.item_map[x])) rb |= bit(x);
            step.arrival = ri;
            step.bought = rb;
            step.paid = price_of(step.prices, rb);
            step.value = bundle_value(sub.market, ri, rb);
            trace.final_welfare = trace.final_welfare + step.value;
            step.market = std::move(sub.market);
            trace.steps.push_back(std::move(step));
            if (popcount(rb) != trace.steps.back().market.players[ri].demand) break;
            players &= ~(Bundle{1} << v.bad_player);
            items &= ~v.bad_bundle;
        }
        return trace;
    }
};

}  // namespace

Pricer default_pricer() { return run_default_pricer; }

TieChooser first_tie_chooser() {
    return [](PlayerId, const std::vector<Bundle>& bundles) {
        require_invariant(!bundles.empty(), "a demand set is never empty");
        return bundles.front();
    };
}

SubMarket restrict_market(const Market& m, Bundle players, Bundle items) {
    SubMarket out;
    for (ItemId x = 0; x < m.num_items(); ++x)
        if (has(items, x)) {
            out.item_map.push_back(x);
            out.market.item_names.push_back(m.item_names[x]);
        }
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        if (!has(players, i)) continue;
        out.player_map.push_back(i);
        Player p;
        p.name = m.players[i].name;
        p.demand = m.players[i].demand;
        for (ItemId x : out.item_map) p.values.push_back(m.players[i].values[x]);
        out.market.players.push_back(std::move(p));
    }
    return out;
}

SimulationTrace simulate(const Market& m, const std::vector<PlayerId>& order,
                         const TieChooser& ties, const Pricer& pricer) {
    legality(m);  // standing assumptions up front
    const int n = m.num_players();
    require_valid(static_cast<int>(order.size()) == n, "arrival order must name every player once");
    Bundle seen = 0;
    for (PlayerId i : order) {
        require_valid(i >= 0 && i < n && !has(seen, i),
                      "arrival order must be a permutation of the players");
        seen |= Bundle{1} << i;
    }

    const Pricer& price = pricer ? pricer : default_pricer();
    SimulationTrace trace;
    trace.final_welfare = Rational(0);
    Bundle players = seen;
    Bundle items = m.all_items();
    for (std::size_t t = 0; t < order.size(); ++t) {
        SubMarket sub = restrict_market(m, players, items);
        if (t > 0) legality(sub.market);  // re-validate before repricing
        SimulationStep step;
        step.player_map = sub.player_map;
        step.item_map = sub.item_map;
        step.prices = price(sub.market);
        require_invariant(static_cast<int>(step.prices.size()) == sub.market.num_items(),
                          "the pricer returned a malformed price vector");
        PlayerId ri = -1;
        for (PlayerId r = 0; r < sub.market.num_players(); ++r)
            if (sub.player_map[r] == order[t]) ri = r;
        require_invariant(ri >= 0, "arriving player already left the market");
        const std::vector<Bundle> bundles = demand_bundles(sub.market, step.prices, ri);
        const Bundle chosen = ties(order[t], bundles);
        require_invariant(std::find(bundles.begin(), bundles.end(), chosen) != bundles.end(),
                          "the tie chooser picked a bundle outside the demand set");
        step.arrival = ri;
        step.bought = chosen;
        step.paid = price_of(step.prices, chosen);
        step.value = bundle_value(sub.market, ri, chosen);
        require_saturating(sub.market, ri, chosen);
        trace.final_welfare = trace.final_welfare + step.value;
        Bundle ob = 0;
        for_each_item(chosen, [&](ItemId x) { ob |= bit(sub.item_map[x]); });
        step.market = std::move(sub.market);
        trace.steps.push_back(std::move(step));
        players &= ~(Bundle{1} << order[t]);
        items &= ~ob;
    }
    require_invariant(items == 0, "items survived a full arrival sequence");
    return trace;
}

SweepResult adversarial_sweep(const Market& m, const SweepOptions& opts) {
    const LegalityInfo info = legality(m);
    Sweep sweep{m, opts.pricer ? opts.pricer : default_pricer(), opts.max_states, {}, false};
    const StateVal& root = sweep.eval((Bundle{1} << m.num_players()) - 1, m.all_items());

    SweepResult out;
    out.optimum = info.max_welfare;
    out.states = sweep.memo.size();
    out.complete = !sweep.partial;
    out.any_branch_failed = root.failed;
    out.failure_reason = root.reason;
    if (root.has_welfare) {
        out.min_welfare = root.mn;
        out.max_welfare = root.mx;
    }
    out.all_optimal =
        out.complete && !root.failed && root.has_welfare && root.mn == info.max_welfare;
    if (!out.all_optimal)
        out.witness = sweep.walk((Bundle{1} << m.num_players()) - 1, m.all_items());
    return out;
}

}  // namespace mdm
