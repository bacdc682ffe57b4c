#pragma once
// market.hpp - the market model: items, multi-demand players, bundles, prices.
//
// A market has m items and n players; player i wants up to k_i items and
// values a bundle at the sum of its k_i highest-valued members. We only
// handle saturated markets (m == sum of demands) whose optimal allocations
// hand every item out at a positive value; validate() enforces the parts of
// that which are checkable without a matching oracle, the rest lives in
// matching.hpp.
//
// Bundles are bitmasks over item indices (m <= 30 guards the representation),
// which makes subset enumeration and set algebra cheap and allocation-free.

#include <cstdint>
#include <string>
#include <vector>

#include "mdm/errors.hpp"
#include "mdm/rational.hpp"

namespace mdm {

using ItemId = int;      // index into Market::item_names
using PlayerId = int;    // index into Market::players
using Bundle = std::uint32_t;  // bit x set <=> item x in the bundle

constexpr int kMaxItems = 30;

inline int popcount(Bundle b) { return __builtin_popcount(b); }
inline Bundle bit(ItemId x) { return Bundle{1} << x; }
inline bool has(Bundle b, ItemId x) { return (b >> x) & 1u; }

// Iterate set bits in ascending item order.
template <typename F>
void for_each_item(Bundle b, F&& f) {
    while (b) {
        ItemId x = __builtin_ctz(b);
        f(x);
        b &= b - 1;
    }
}

struct Player {
    std::string name;
    int demand = 1;                 // k_i >= 1
    std::vector<Rational> values;  // one per item, >= 0
};

struct Market {
    std::vector<std::string> item_names;
    std::vector<Player> players;

    int num_items() const { return static_cast<int>(item_names.size()); }
    int num_players() const { return static_cast<int>(players.size()); }
    Bundle all_items() const { return (Bundle{1} << num_items()) - 1; }

    const Rational& value(PlayerId i, ItemId x) const { return players[i].values[x]; }

    // Structural checks that need no optimization oracle: saturation,
    // demand bounds, value signs, name uniqueness. Deeper assumption checks
    // (every optimal allocation uses every item at positive value) are in
    // matching.hpp because they need max-welfare queries.
    void validate() const;
};

// An allocation assigns each player a bundle; bundles are disjoint. Items
// may stay unassigned (an empty mask everywhere is a valid allocation).
struct Allocation {
    std::vector<Bundle> bundles;  // indexed by player

    Bundle assigned() const {
        Bundle u = 0;
        for (Bundle b : bundles) u |= b;
        return u;
    }
};

using PriceVector = std::vector<Rational>;  // indexed by item

// v_i(bundle): sum of the player's demand-many highest values inside the
// bundle. For |bundle| <= k_i this is just the plain sum.
Rational bundle_value(const Market& m, PlayerId i, Bundle b);

// v_i(bundle) - p(bundle), prices summed over the whole bundle.
Rational utility(const Market& m, const PriceVector& p, PlayerId i, Bundle b);

// Sum of bundle values over an allocation.
Rational social_welfare(const Market& m, const Allocation& a);

// All utility-maximizing bundles of size <= k_i for player i at prices p,
// among bundles drawn from `available`. Works on per-item margins
// (value - price): the best utility is the sum of the k_i largest positive
// margins, and the demand set is every bundle achieving it (zero-margin
// items are optional, ties within the threshold margin class are
// interchangeable). Returned masks are sorted ascending. Throws
// InvariantError if the tie structure would enumerate more than `cap`
// bundles; desk-scale markets stay far below it.
std::vector<Bundle> demand_bundles(const Market& m, const PriceVector& p, PlayerId i,
                                   Bundle available, std::size_t cap = 1u << 20);

inline std::vector<Bundle> demand_bundles(const Market& m, const PriceVector& p, PlayerId i) {
    return demand_bundles(m, p, i, m.all_items());
}

// A simplified market is the 0/1 shadow of a market: each player marks the
// items it may receive and values them all at 1. The pricing recursion works
// on these; prices in (0,1) make a player's demand depend only on the price
// ordering of its marked items.
struct SimplifiedMarket {
    std::vector<std::string> item_names;
    std::vector<std::string> player_names;
    std::vector<int> demands;      // k_i >= 1
    std::vector<Bundle> marks;     // items player i values at 1

    int num_items() const { return static_cast<int>(item_names.size()); }
    int num_players() const { return static_cast<int>(player_names.size()); }
    Bundle all_items() const { return (Bundle{1} << num_items()) - 1; }

    // Checkable structure: saturation, demand bounds, nonempty marks, names.
    void validate() const;

    // The equivalent valued market (all marked values 1); lets every oracle
    // that speaks Market also serve simplified markets.
    Market as_market() const;
};

// Smallest positive denominator-bound helpers -------------------------------

// LCM of the denominators of every entry (and of any extra vectors appended);
// 1/result lower-bounds every nonzero difference of entry sums.
std::int64_t common_denominator(const std::vector<Rational>& xs);

// Break price ties without disturbing any strict utility comparison.
// Adds (x+1)*eta to item x where eta = 1 / (4*Q*m^2) and Q is the common
// denominator of all values and prices: every nonzero utility gap is at
// least 1/Q, while any bundle's perturbation total moves by less than
// 1/(2Q), so strict preferences survive and equal prices become distinct.
// Postcondition (checked): prices strictly increase where they were equal,
// and every demand bundle after is a demand bundle before.
PriceVector perturb_to_distinct(const Market& m, const PriceVector& p);

}  // namespace mdm
