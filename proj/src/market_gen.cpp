// market_gen.cpp - rejection sampler and the fixture catalogue.

#include "mdm/market_gen.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include "mdm/errors.hpp"
#include "mdm/matching.hpp"

namespace mdm {

namespace {

// Bounded draw on top of the engine's raw output. std::uniform_int_distribution
// is implementation-defined, which would break the byte-identical-per-seed
// contract across standard libraries; a plain modulus is stable everywhere and
// the bias is irrelevant at these tiny ranges.
int draw(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

Market draw_candidate(std::mt19937_64& rng, const GenProfile& prof, int& m_out) {
    const int n = draw(rng, prof.min_players, prof.max_players);
    std::vector<int> demands(n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
        demands[i] = draw(rng, prof.min_demand, prof.max_demand);
        m += demands[i];
    }
    m_out = m;
    Market mk;
    if (m > prof.max_items) return mk;  // caller rejects via m_out

    // Planted allocation: player i owns demands[i] of the items, dealt by a
    // shuffle. Owners value their items high (max of two draws), other
    // players mark an item with probability 1/2. A coin-flip "contested"
    // pass then copies the owner's value to one rival, which is what makes
    // multi-optimum instances show up at all under random values.
    std::vector<PlayerId> owner;
    for (PlayerId i = 0; i < n; ++i) owner.insert(owner.end(), demands[i], i);
    for (int x = m - 1; x > 0; --x) std::swap(owner[x], owner[draw(rng, 0, x)]);

    mk.item_names.resize(m);
    for (int x = 0; x < m; ++x) mk.item_names[x] = "x" + std::to_string(x + 1);
    mk.players.resize(n);
    for (PlayerId i = 0; i < n; ++i) {
        mk.players[i].name = "p" + std::to_string(i + 1);
        mk.players[i].demand = demands[i];
        mk.players[i].values.assign(m, Rational(0));
    }
    for (int x = 0; x < m; ++x) {
        const int high =
            std::max(draw(rng, 1, prof.max_value), draw(rng, 1, prof.max_value));
        mk.players[owner[x]].values[x] = Rational(high);
        for (PlayerId i = 0; i < n; ++i) {
            if (i == owner[x]) continue;
            if (draw(rng, 0, 1) == 0) mk.players[i].values[x] = Rational(draw(rng, 1, prof.max_value));
        }
        if (n > 1 && draw(rng, 0, 1) == 0) {
            PlayerId rival = draw(rng, 0, n - 2);
            if (rival >= owner[x]) ++rival;
            mk.players[rival].values[x] = Rational(high);
        }
    }
    return mk;
}

bool regime_fits(const Market& mk, TargetRegime regime) {
    switch (regime) {
        case TargetRegime::any:
            return true;
        case TargetRegime::four_players:
            return mk.num_players() <= 4;
        case TargetRegime::tridemand:
            return std::all_of(mk.players.begin(), mk.players.end(),
                               [](const Player& p) { return p.demand <= 3; });
        case TargetRegime::two_allocations: {
            const EnumerationResult en = enumerate_optimal_allocations(mk, 3);
            return !en.truncated && en.allocations.size() <= 2;
        }
    }
    return false;
}

SimplifiedMarket make_simplified(std::vector<std::string> item_names,
                                 std::vector<std::string> player_names, std::vector<int> demands,
                                 const std::vector<std::vector<ItemId>>& mark_lists) {
    SimplifiedMarket s;
    s.item_names = std::move(item_names);
    s.player_names = std::move(player_names);
    s.demands = std::move(demands);
    s.marks.assign(s.demands.size(), 0);
    for (std::size_t i = 0; i < mark_lists.size(); ++i)
        for (ItemId x : mark_lists[i]) s.marks[i] |= bit(x);
    s.validate();
    return s;
}

Market make_market(std::vector<std::string> item_names, std::vector<std::string> player_names,
                   std::vector<int> demands, const std::vector<std::vector<int>>& rows) {
    Market mk;
    mk.item_names = std::move(item_names);
    mk.players.resize(demands.size());
    for (std::size_t i = 0; i < demands.size(); ++i) {
        mk.players[i].name = std::move(player_names[i]);
        mk.players[i].demand = demands[i];
        for (int v : rows[i]) mk.players[i].values.push_back(Rational(v));
    }
    mk.validate();
    return mk;
}

}  // namespace

void GenProfile::validate() const {
    require_valid(min_players >= 1 && min_players <= max_players, "empty player range");
    require_valid(min_demand >= 1 && min_demand <= max_demand, "empty demand range");
    require_valid(max_value >= 1 && max_value <= 10, "value bound must be in 1..10");
    require_valid(max_items >= min_players * min_demand && max_items <= kMaxItems,
                  "item bound leaves no room or exceeds the bundle width");
    require_valid(max_attempts >= 1, "attempt budget must be positive");
}

Market generate(const GenProfile& profile) {
    profile.validate();
    std::mt19937_64 rng(profile.seed);
    for (int attempt = 1; attempt <= profile.max_attempts; ++attempt) {
        int m = 0;
        Market mk = draw_candidate(rng, profile, m);
        if (m > profile.max_items) continue;
        try {
            mk.validate();
            legality(mk);  // throws ValidationError when the standing assumptions fail
        } catch (const ValidationError&) {
            continue;
        }
        if (!regime_fits(mk, profile.regime)) continue;
        return mk;
    }
    throw ValidationError("market generation gave up after " +
                          std::to_string(profile.max_attempts) +
                          " attempts; the profile's filters reject everything it can draw");
}

Market fixture_market(const std::string& name) {
    if (name == "M1")
        return make_market({"alpha", "beta", "gamma", "delta"}, {"p1", "p2", "p3"}, {2, 1, 1},
                           {{2, 1, 1, 1}, {2, 0, 1, 0}, {1, 0, 0, 1}});
    if (name == "M2")
        return make_market({"a", "b", "c", "d"}, {"p1", "p2", "p3"}, {1, 1, 2},
                           {{1, 1, 1, 0}, {1, 1, 1, 0}, {1, 1, 1, 1}});
    if (name == "M3")
        return make_market({"a", "b", "c", "d", "e"}, {"p1", "p2", "p3"}, {1, 1, 3},
                           {{1, 1, 1, 1, 0}, {1, 1, 1, 1, 0}, {1, 1, 1, 1, 1}});
    throw ValidationError("unknown market fixture: " + name);
}

SimplifiedMarket fixture_simplified(const std::string& name) {
    if (name == "C4")
        return make_simplified({"x1", "x2", "x3", "x4"}, {"p1", "p2", "p3", "p4"}, {1, 1, 1, 1},
                               {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    if (name == "type4")
        // Single odd uniquely assigned 3-cycle, no even cycle, no odd pair;
        // two optimal allocations (identity and the shift). The structure
        // search must fall through to the cycle-minus-one-item case.
        return make_simplified({"x1", "x2", "x3"}, {"p1", "p2", "p3"}, {1, 1, 1},
                               {{0, 1}, {1, 2}, {2, 0}});
    if (name == "odd_pair")
        // Two odd triangles sharing one vertex: the only uniquely assigned
        // cycles are [0,1,2] and [0,3,4], a valid odd pair with no overlap.
        return make_simplified({"v", "p", "q", "s", "t"}, {"A", "B", "C", "D"}, {1, 1, 2, 1},
                               {{0, 1, 3}, {1, 2}, {2, 4, 0}, {3, 4}});
    if (name == "fig1_case3")
        // Built so the removable-set search enters the 3-cycle analysis and
        // lands in its third case: the shortest uniquely assigned cycle
        // through item 0 is [0,1,2], the fourth player's item sits off the
        // cycle, and the walk ends at a central-item set. Display names
        // follow the roles the walk assigns, not the id order.
        return make_simplified({"x1", "x3", "x2", "x4", "x5"}, {"P1", "P3", "P2", "P4"},
                               {1, 2, 1, 1}, {{0, 1}, {1, 2, 3, 4}, {0, 2, 4}, {3, 4}});
    throw ValidationError("unknown simplified fixture: " + name);
}

}  // namespace mdm
