#pragma once
// simulate.hpp - sequential-arrival simulation with dynamic repricing, and
// the exhaustive adversarial sweep over arrival orders and tie-breaks.
//
// A simulation round reprices whatever market is left, lets one buyer take a
// utility-maximizing bundle, removes buyer and bundle, and re-validates the
// residual before the next round. The sweep quantifies over every arrival
// order and every demanded bundle at once; since only the set of remaining
// players and items matters, branches collapse into states memoized on that
// pair of masks.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdm/market.hpp"

namespace mdm {

// Prices the market currently on sale. Must be deterministic. The default
// runs the automatic regime driver and falls back to the exhaustive ordering
// search when no structural regime fits a small residual; its failures
// (unsupported regime, invariant breaches) propagate as typed exceptions.
using Pricer = std::function<PriceVector(const Market&)>;
Pricer default_pricer();

// Picks one bundle from a buyer's demand set (non-empty, ascending mask
// order, round-local item ids). Receives the buyer's index in the original
// market. The default takes the first bundle.
using TieChooser = std::function<Bundle(PlayerId, const std::vector<Bundle>&)>;
TieChooser first_tie_chooser();

// The market left after deleting some players and items; masks use original
// indices, maps translate the survivors back.
struct SubMarket {
    Market market;
    std::vector<PlayerId> player_map;  // sub player -> original player
    std::vector<ItemId> item_map;      // sub item -> original item
};
SubMarket restrict_market(const Market& m, Bundle players, Bundle items);

// One repricing round: the market posted, the prices, and the purchase.
struct SimulationStep {
    Market market;                     // what was on sale this round
    std::vector<PlayerId> player_map;  // round player -> original player
    std::vector<ItemId> item_map;      // round item -> original item
    PriceVector prices;                // posted prices (round item ids)
    PlayerId arrival = -1;             // buyer, round index; -1 if the round aborted
    Bundle bought = 0;                 // purchased bundle (round item ids)
    Rational paid;                     // price total of the purchase
    Rational value;                    // buyer's value of the purchase
};

struct SimulationTrace {
    std::vector<SimulationStep> steps;
    Rational final_welfare;  // sum of purchased values
};

// Runs one full arrival order (a permutation of the original player
// indices). Repricing failures propagate; a purchase that would leave the
// market unsaturated or break the standing assumptions aborts with a typed
// error instead of silently repricing.
SimulationTrace simulate(const Market& m, const std::vector<PlayerId>& order,
                         const TieChooser& ties = first_tie_chooser(),
                         const Pricer& pricer = default_pricer());

struct SweepOptions {
    Pricer pricer;                        // empty -> default_pricer()
    std::uint64_t max_states = 1u << 20;  // distinct residual states to explore
};

struct SweepResult {
    bool complete = true;       // false when the state budget ran out
    bool all_optimal = false;   // every branch ends at the full optimum
    std::uint64_t states = 0;   // distinct residual states evaluated
    Rational optimum;           // welfare of the full market
    Rational min_welfare;       // over branches that completed all purchases
    Rational max_welfare;
    bool any_branch_failed = false;  // repricing or saturation failure somewhere
    std::string failure_reason;      // deepest diagnostic when a branch failed
    std::optional<SimulationTrace> witness;  // a shortfall or aborted branch
};

// True overall success means: every arrival order and every tie-break of
// every demand set completes and reaches the optimal welfare. On failure the
// witness replays one offending branch (its last step has arrival -1 when
// the branch died repricing rather than by a welfare shortfall).
SweepResult adversarial_sweep(const Market& m, const SweepOptions& opts = {});

}  // namespace mdm
