#pragma once
// Shared test helpers: small market builders and hand-checked fixture
// markets whose optima are frozen into the tests that use them.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mdm/market.hpp"

namespace testutil {

inline mdm::Market make_market(std::vector<std::string> items, std::vector<int> demands,
                               std::vector<std::vector<mdm::Rational>> rows) {
    mdm::Market m;
    m.item_names = std::move(items);
    for (std::size_t i = 0; i < demands.size(); ++i) {
        mdm::Player p;
        p.name = "p" + std::to_string(i + 1);
        p.demand = demands[i];
        p.values = rows[i];
        m.players.push_back(std::move(p));
    }
    m.validate();
    return m;
}

// Four items, three players (demands 2,1,1). Exactly two optimal allocations
// ({ab|c|d} and {bc|a|d}), both of welfare 5, so the legality sets are
// K1 = {a,b,c}, K2 = {a,c}, K3 = {d} with exclusives {b}, {}, {d}.
inline mdm::Market m1_market() {
    return make_market({"a", "b", "c", "d"}, {2, 1, 1},
                       {{2, 1, 1, 1}, {2, 0, 1, 0}, {1, 0, 0, 1}});
}

// Four items, three players (demands 1,1,2). Players 1 and 2 value {a,b,c},
// player 3 values everything; the six optimal allocations hand d to player 3
// plus any split of {a,b,c}. Welfare 4.
inline mdm::Market m2_market() {
    return make_market({"a", "b", "c", "d"}, {1, 1, 2},
                       {{1, 1, 1, 0}, {1, 1, 1, 0}, {1, 1, 1, 1}});
}

inline mdm::SimplifiedMarket make_simplified(std::vector<std::string> items,
                                             std::vector<int> demands,
                                             std::vector<std::vector<mdm::ItemId>> mark_lists) {
    mdm::SimplifiedMarket s;
    s.item_names = std::move(items);
    for (std::size_t i = 0; i < demands.size(); ++i) {
        s.player_names.push_back("p" + std::to_string(i + 1));
        s.demands.push_back(demands[i]);
        mdm::Bundle b = 0;
        for (mdm::ItemId x : mark_lists[i]) b |= mdm::bit(x);
        s.marks.push_back(b);
    }
    s.validate();
    return s;
}

inline mdm::Allocation make_alloc(const std::vector<std::vector<mdm::ItemId>>& bundles) {
    mdm::Allocation a;
    for (const auto& lst : bundles) {
        mdm::Bundle b = 0;
        for (mdm::ItemId x : lst) b |= mdm::bit(x);
        a.bundles.push_back(b);
    }
    return a;
}

// Random saturated market with values in 0..maxval.
inline mdm::Market random_market(std::mt19937_64& rng, int m, int n, int maxval = 4) {
    mdm::Market mk;
    for (int x = 0; x < m; ++x) mk.item_names.push_back("x" + std::to_string(x));
    std::vector<int> demand(n, 1);
    for (int left = m - n; left > 0; --left) demand[rng() % n]++;
    for (int i = 0; i < n; ++i) {
        mdm::Player pl;
        pl.name = "p" + std::to_string(i);
        pl.demand = demand[i];
        for (int x = 0; x < m; ++x)
            pl.values.push_back(mdm::Rational(static_cast<int>(rng() % (maxval + 1))));
        mk.players.push_back(pl);
    }
    return mk;
}

namespace detail {
inline mdm::Rational brute_best(const mdm::Market& m, const std::vector<mdm::ItemId>& items,
                                std::size_t t, std::vector<int>& caps) {
    if (t == items.size()) return mdm::Rational(0);
    mdm::Rational best = brute_best(m, items, t + 1, caps);
    for (mdm::PlayerId i = 0; i < m.num_players(); ++i) {
        if (caps[i] == 0) continue;
        --caps[i];
        const mdm::Rational v = m.value(i, items[t]) + brute_best(m, items, t + 1, caps);
        ++caps[i];
        if (best < v) best = v;
    }
    return best;
}
}  // namespace detail

// Exhaustive assignment oracle: every item is handed to some player with
// remaining capacity or left out. Exponential, only for small inputs.
inline mdm::Rational brute_max_assignment(const mdm::Market& m, mdm::Bundle items,
                                          std::vector<int> caps) {
    std::vector<mdm::ItemId> list;
    mdm::for_each_item(items, [&](mdm::ItemId x) { list.push_back(x); });
    return detail::brute_best(m, list, 0, caps);
}

// Random simplified market with a planted full assignment: items are dealt
// into bundles matching the demands, and each player marks its own bundle
// plus random extras. `alloc` receives the planted assignment.
inline mdm::SimplifiedMarket random_simplified_with_alloc(std::mt19937_64& rng, int m, int n,
                                                          mdm::Allocation& alloc) {
    mdm::SimplifiedMarket s;
    for (int x = 0; x < m; ++x) s.item_names.push_back("x" + std::to_string(x));
    std::vector<int> demand(n, 1);
    for (int left = m - n; left > 0; --left) demand[rng() % n]++;
    std::vector<mdm::ItemId> deck;
    for (int x = 0; x < m; ++x) deck.push_back(x);
    for (int x = m - 1; x > 0; --x) std::swap(deck[x], deck[rng() % (x + 1)]);

    alloc.bundles.assign(n, 0);
    std::size_t next = 0;
    for (int i = 0; i < n; ++i) {
        s.player_names.push_back("p" + std::to_string(i));
        s.demands.push_back(demand[i]);
        for (int t = 0; t < demand[i]; ++t) alloc.bundles[i] |= mdm::bit(deck[next++]);
        mdm::Bundle extras = static_cast<mdm::Bundle>(rng()) & s.all_items();
        s.marks.push_back(alloc.bundles[i] | extras);
    }
    s.validate();
    return s;
}

}  // namespace testutil
