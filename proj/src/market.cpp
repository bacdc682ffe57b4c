#include "mdm/market.hpp"

#include <algorithm>
#include <set>

namespace mdm {

void Market::validate() const {
    int m = num_items();
    int n = num_players();
    require_valid(m >= 1, "market has no items");
    require_valid(n >= 1, "market has no players");
    require_valid(m <= kMaxItems, "market exceeds the " + std::to_string(kMaxItems) + "-item limit");
    std::set<std::string> names(item_names.begin(), item_names.end());
    require_valid(static_cast<int>(names.size()) == m, "duplicate item names");
    std::set<std::string> pnames;
    long long total_demand = 0;
    for (const Player& pl : players) {
        require_valid(pnames.insert(pl.name).second, "duplicate player name: " + pl.name);
        require_valid(pl.demand >= 1, "player " + pl.name + " has demand < 1");
        require_valid(static_cast<int>(pl.values.size()) == m,
                      "player " + pl.name + " has a value row of the wrong length");
        for (const Rational& v : pl.values)
            require_valid(!v.is_negative(), "player " + pl.name + " has a negative value");
        total_demand += pl.demand;
    }
    require_valid(total_demand == m,
                  "market is not saturated: " + std::to_string(m) + " items vs total demand " +
                      std::to_string(total_demand));
}

Rational bundle_value(const Market& m, PlayerId i, Bundle b) {
    const Player& pl = m.players[i];
    if (popcount(b) <= pl.demand) {
        Rational s = 0;
        for_each_item(b, [&](ItemId x) { s += pl.values[x]; });
        return s;
    }
    std::vector<Rational> vals;
    for_each_item(b, [&](ItemId x) { vals.push_back(pl.values[x]); });
    std::sort(vals.begin(), vals.end(), [](const Rational& a, const Rational& c) { return c < a; });
    Rational s = 0;
    for (int t = 0; t < pl.demand; ++t) s += vals[t];
    return s;
}

Rational utility(const Market& m, const PriceVector& p, PlayerId i, Bundle b) {
    Rational cost = 0;
    for_each_item(b, [&](ItemId x) { cost += p[x]; });
    return bundle_value(m, i, b) - cost;
}

Rational social_welfare(const Market& m, const Allocation& a) {
    Rational s = 0;
    for (PlayerId i = 0; i < m.num_players(); ++i) s += bundle_value(m, i, a.bundles[i]);
    return s;
}

namespace {

// Append all size-`take` subsets of the items listed in `pool` OR-ed onto
// `base` into `out`.
void emit_subsets(const std::vector<ItemId>& pool, int take, Bundle base, std::vector<Bundle>& out) {
    int z = static_cast<int>(pool.size());
    std::vector<int> idx(take);
    for (int t = 0; t < take; ++t) idx[t] = t;
    while (true) {
        Bundle b = base;
        for (int t = 0; t < take; ++t) b |= bit(pool[idx[t]]);
        out.push_back(b);
        int t = take - 1;
        while (t >= 0 && idx[t] == z - take + t) --t;
        if (t < 0) break;
        ++idx[t];
        for (int s = t + 1; s < take; ++s) idx[s] = idx[s - 1] + 1;
    }
}

unsigned long long choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    unsigned long long r = 1;
    for (int t = 0; t < k; ++t) r = r * (n - t) / (t + 1);
    return r;
}

}  // namespace

std::vector<Bundle> demand_bundles(const Market& m, const PriceVector& p, PlayerId i,
                                   Bundle available, std::size_t cap) {
    const Player& pl = m.players[i];
    const int k = pl.demand;

    // Partition available items by margin sign; only margins matter because
    // |bundle| <= k makes bundle utility the sum of member margins.
    std::vector<ItemId> positive, zero;
    std::vector<std::pair<Rational, ItemId>> pos_sorted;
    for_each_item(available, [&](ItemId x) {
        Rational margin = pl.values[x] - p[x];
        if (margin.is_positive()) {
            positive.push_back(x);
            pos_sorted.emplace_back(margin, x);
        } else if (margin.is_zero()) {
            zero.push_back(x);
        }
    });

    std::vector<Bundle> out;
    if (static_cast<int>(positive.size()) <= k) {
        // Everything with positive margin fits; zero-margin items pad freely.
        Bundle base = 0;
        for (ItemId x : positive) base |= bit(x);
        int room = k - static_cast<int>(positive.size());
        int z = static_cast<int>(zero.size());
        std::size_t count = 0;
        for (int take = 0; take <= std::min(room, z); ++take) count += choose(z, take);
        if (count > cap) throw InvariantError("demand bundle enumeration exceeds cap");
        for (int take = 0; take <= std::min(room, z); ++take) emit_subsets(zero, take, base, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    // More positive margins than capacity: the optimum takes the k largest.
    // Items strictly above the k-th margin are mandatory; the remaining slots
    // are filled by any choice from the margin class equal to the k-th.
    std::sort(pos_sorted.begin(), pos_sorted.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return b.first < a.first;
        return a.second < b.second;
    });
    const Rational threshold = pos_sorted[k - 1].first;
    Bundle base = 0;
    std::vector<ItemId> at_threshold;
    int mandatory = 0;
    for (const auto& [margin, x] : pos_sorted) {
        if (threshold < margin) {
            base |= bit(x);
            ++mandatory;
        } else if (margin == threshold) {
            at_threshold.push_back(x);
        }
    }
    int slots = k - mandatory;
    if (choose(static_cast<int>(at_threshold.size()), slots) > cap)
        throw InvariantError("demand bundle enumeration exceeds cap");
    emit_subsets(at_threshold, slots, base, out);
    std::sort(out.begin(), out.end());
    return out;
}

void SimplifiedMarket::validate() const {
    int m = num_items();
    int n = num_players();
    require_valid(m >= 1, "simplified market has no items");
    require_valid(n >= 1, "simplified market has no players");
    require_valid(m <= kMaxItems, "simplified market exceeds the item limit");
    require_valid(static_cast<int>(demands.size()) == n && static_cast<int>(marks.size()) == n,
                  "simplified market has ragged player data");
    std::set<std::string> names(item_names.begin(), item_names.end());
    require_valid(static_cast<int>(names.size()) == m, "duplicate item names");
    std::set<std::string> pnames(player_names.begin(), player_names.end());
    require_valid(static_cast<int>(pnames.size()) == n, "duplicate player names");
    long long total = 0;
    for (int i = 0; i < n; ++i) {
        require_valid(demands[i] >= 1, "player " + player_names[i] + " has demand < 1");
        require_valid(marks[i] != 0, "player " + player_names[i] + " marks no items");
        require_valid((marks[i] & ~all_items()) == 0, "marks reference items out of range");
        total += demands[i];
    }
    require_valid(total == m, "simplified market is not saturated");
}

Market SimplifiedMarket::as_market() const {
    Market m;
    m.item_names = item_names;
    m.players.resize(num_players());
    for (int i = 0; i < num_players(); ++i) {
        m.players[i].name = player_names[i];
        m.players[i].demand = demands[i];
        m.players[i].values.assign(num_items(), Rational(0));
        for_each_item(marks[i], [&](ItemId x) { m.players[i].values[x] = Rational(1); });
    }
    return m;
}

std::int64_t common_denominator(const std::vector<Rational>& xs) {
    std::int64_t q = 1;
    for (const Rational& x : xs) q = lcm_checked(q, x.den());
    return q;
}

PriceVector perturb_to_distinct(const Market& m, const PriceVector& p) {
    const int mm = m.num_items();
    std::vector<Rational> all(p);
    for (const Player& pl : m.players) all.insert(all.end(), pl.values.begin(), pl.values.end());
    std::int64_t q = common_denominator(all);

    // eta = 1 / (4*q*m^2): a full bundle of perturbations moves any utility
    // by under m^2 * eta < 1/(2q), while distinct pre-perturbation utilities
    // differ by at least 1/q. So strict comparisons are preserved; ties break
    // toward lower item index keeping demand sets inside the old ones.
    Rational eta = Rational(1) / (Rational(4) * Rational(q) * Rational(mm) * Rational(mm));
    PriceVector out(p);
    for (ItemId x = 0; x < mm; ++x) out[x] += Rational(x + 1) * eta;

    for (ItemId x = 0; x < mm; ++x)
        for (ItemId y = x + 1; y < mm; ++y)
            require_invariant(out[x] != out[y], "perturbation left a price tie");
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        auto before = demand_bundles(m, p, i);
        auto after = demand_bundles(m, out, i);
        for (Bundle b : after)
            require_invariant(std::binary_search(before.begin(), before.end(), b),
                              "perturbation created a demand bundle that was not demanded before");
    }
    return out;
}

}  // namespace mdm
