#pragma once
// verify.hpp - the independent acceptance test for posted prices.
//
// A price vector passes when no first buyer can hurt the market: whichever
// player arrives first and whichever of its utility-maximizing bundles it
// takes, the items left behind still reach the market optimum among the
// remaining players. The check is exact and leans only on the market model
// and the assignment oracle, never on the pricing construction, so the
// pricing algorithms cannot vouch for themselves.
//
// brute_force_pricing is the matching reference pricer: exhaustive search
// over price orderings on simplified markets, where only the ordering of
// prices inside (0,1) can matter.

#include <optional>
#include <vector>

#include "mdm/market.hpp"
#include "mdm/matching.hpp"

namespace mdm {

struct PricingViolation {
    PlayerId player = 0;   // the first buyer that breaks the optimum
    Bundle bundle = 0;     // the demanded bundle it takes
    Rational achievable;   // bundle value plus the best completion without the buyer
    Rational optimum;      // what the whole market could have reached
};

// First violation in scan order (players ascending, demanded bundles in
// ascending mask order), or std::nullopt when the prices are safe against
// every first buyer. The overload taking `known_optimum` skips recomputing
// the market optimum on repeated queries.
std::optional<PricingViolation> find_pricing_violation(const Market& m, const PriceVector& p,
                                                       const Rational& known_optimum);
std::optional<PricingViolation> find_pricing_violation(const Market& m, const PriceVector& p);

bool is_dynamic_pricing(const Market& m, const PriceVector& p);
inline bool is_dynamic_pricing(const SimplifiedMarket& s, const PriceVector& p) {
    return is_dynamic_pricing(s.as_market(), p);
}

// Do the marks of a simplified market coincide with its legality sets (and
// does the market meet the standing assumptions)? The pricing recursion
// requires this of every market it descends into.
bool marks_match_legality(const SimplifiedMarket& s);

// Reference pricer: tries price assignments (perm[x])/(m+1) for every
// permutation in lexicographic order and returns the first accepted one.
// Complete for simplified markets: demands there depend only on the price
// ordering, and tie-breaking perturbation shows a tied solution can always
// be replaced by a strictly ordered one. Throws UnsupportedRegimeError above
// `max_items` (factorial work).
std::optional<PriceVector> brute_force_pricing(const SimplifiedMarket& s, int max_items = 6);

}  // namespace mdm
