#include <doctest.h>

#include <functional>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "mdm/errors.hpp"
#include "mdm/rough.hpp"

using namespace mdm;
using testutil::m1_market;
using testutil::make_market;
using testutil::random_market;

namespace {

// Brute search: does some simple cycle through this edge weigh zero (or less
// than zero)? Walks the multigraph edge list directly; test-scale only.
struct CycleProbe {
    bool zero = false;
    bool negative = false;
};

CycleProbe probe_cycles(const AuxiliaryGraph& g, std::size_t edge_idx) {
    const AuxEdge& e0 = g.edges[edge_idx];
    CycleProbe out;
    std::function<void(ItemId, Bundle, Rational)> dfs = [&](ItemId v, Bundle visited, Rational acc) {
        for (const AuxEdge& e : g.edges) {
            if (e.from != v) continue;
            if (e.to == e0.from) {
                const Rational total = acc + e.weight + e0.weight;
                if (total == Rational(0)) out.zero = true;
                if (total.is_negative()) out.negative = true;
                continue;
            }
            if (has(visited, e.to)) continue;
            dfs(e.to, visited | bit(e.to), acc + e.weight);
        }
    };
    dfs(e0.to, bit(e0.from) | bit(e0.to), Rational(0));
    return out;
}

// The tier comparisons that must survive fine pricing: exclusive beats the
// rest, legal beats non-legal, legal stays positive. (Shared items are no
// longer required to tie; fine prices exist to order them.)
bool strict_tiers_hold(const Market& m, const LegalityInfo& info, const PriceVector& p) {
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        auto u = [&](ItemId x) { return m.value(i, x) - p[x]; };
        for (ItemId x = 0; x < m.num_items(); ++x) {
            for (ItemId y = 0; y < m.num_items(); ++y) {
                if (x == y) continue;
                if (has(info.exclusive[i], x) && !has(info.exclusive[i], y) && !(u(x) > u(y)))
                    return false;
                if (has(info.legal[i], x) && !has(info.legal[i], y) && !(u(x) > u(y))) return false;
            }
            if (has(info.legal[i], x) && !u(x).is_positive()) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("m1 rough prices are the frozen shortest-path solution") {
    const Market mk = m1_market();
    const LegalityInfo info = legality(mk);
    const RoughPricing r = rough_prices(mk, info);

    CHECK(r.eps.cycle_bound_finite);
    CHECK(r.eps.cycle_bound == Rational(1));
    CHECK(r.eps.value_bound == Rational(1));
    CHECK(r.eps.epsilon == Rational(1, 5));
    REQUIRE(r.prices.size() == 4);
    CHECK(r.prices[0] == Rational(7, 5));
    CHECK(r.prices[1] == Rational(1, 5));
    CHECK(r.prices[2] == Rational(2, 5));
    CHECK(r.prices[3] == Rational(3, 5));
    CHECK(check_rough_conditions(mk, info, r.prices));

    // sabotage: flat prices break the shared-items-tie condition
    CHECK(!check_rough_conditions(mk, info, PriceVector(4, Rational(0))));
}

TEST_CASE("m1 residual keeps the two shared items and its frozen headroom") {
    const Market mk = m1_market();
    const LegalityInfo info = legality(mk);
    const RoughPricing r = rough_prices(mk, info);
    const ResidualMarket res = residual_market(mk, info, r.prices);

    CHECK(!res.trivial);
    CHECK(res.item_map == std::vector<ItemId>{0, 2});
    CHECK(res.player_map == std::vector<PlayerId>{0, 1});
    CHECK(res.simplified.demands == std::vector<int>{1, 1});
    CHECK(res.simplified.marks == std::vector<Bundle>{0b11, 0b11});
    CHECK(res.base_utility == std::vector<Rational>{Rational(3, 5), Rational(3, 5)});
    CHECK(res.headroom == std::vector<Rational>{Rational(1, 5), Rational(3, 5)});
    CHECK(res.delta == Rational(1, 5));

    const PriceVector combined = combine_prices(mk, res, r.prices, {Rational(1, 4), Rational(3, 4)});
    CHECK(combined == PriceVector{Rational(29, 20), Rational(1, 5), Rational(11, 20), Rational(3, 5)});
    CHECK(strict_tiers_hold(mk, info, combined));
}

TEST_CASE("a market whose optimum splits the items leaves no residual") {
    const Market mk = make_market({"a", "b"}, {1, 1}, {{2, 1}, {1, 2}});
    const LegalityInfo info = legality(mk);
    const RoughPricing r = rough_prices(mk, info);

    CHECK(r.eps.cycle_bound_finite);
    CHECK(r.eps.epsilon == Rational(1, 3));
    CHECK(r.prices == PriceVector{Rational(1, 3), Rational(1, 3)});

    const ResidualMarket res = residual_market(mk, info, r.prices);
    CHECK(res.trivial);
    CHECK(res.item_map.empty());
    CHECK(res.player_map.empty());
    CHECK(res.delta == Rational(0));
}

TEST_CASE("an acyclic auxiliary graph falls back to the value bound") {
    const Market mk = make_market({"a", "b"}, {2}, {{3, 2}});
    const LegalityInfo info = legality(mk);
    const RoughPricing r = rough_prices(mk, info);

    CHECK(r.graph.edges.empty());
    CHECK(r.graph.acyclic);
    CHECK(!r.eps.cycle_bound_finite);
    CHECK(r.eps.value_bound == Rational(2));
    CHECK(r.eps.epsilon == Rational(2, 3));
    CHECK(r.prices == PriceVector{Rational(2, 3), Rational(2, 3)});
    CHECK(residual_market(mk, info, r.prices).trivial);
}

TEST_CASE("zero-cycle edge classification matches brute cycle search") {
    std::mt19937_64 rng(70231);
    int usable = 0, zero_edges = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 4);
        const int n = std::min(m, 1 + static_cast<int>(rng() % 3));
        const Market mk = random_market(rng, m, n, 3);
        LegalityInfo info;
        try {
            info = legality(mk);
        } catch (const ValidationError&) {
            continue;
        }
        ++usable;
        const AuxiliaryGraph g = build_auxiliary_graph(mk, info);
        for (std::size_t t = 0; t < g.edges.size(); ++t) {
            const CycleProbe probe = probe_cycles(g, t);
            CHECK(!probe.negative);  // legal markets admit no negative cycle
            CHECK(g.edges[t].in_zero_cycle == probe.zero);
            if (probe.zero) ++zero_edges;
        }
    }
    CHECK(usable >= 50);
    CHECK(zero_edges >= 30);
}

TEST_CASE("rough prices satisfy their conditions on random markets") {
    std::mt19937_64 rng(70232);
    int usable = 0, nontrivial = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 6);
        const int n = std::min(m, 1 + static_cast<int>(rng() % 4));
        const Market mk = random_market(rng, m, n, trial % 2 ? 2 : 4);
        LegalityInfo info;
        try {
            info = legality(mk);
        } catch (const ValidationError&) {
            continue;
        }
        ++usable;
        const RoughPricing r = rough_prices(mk, info);
        CHECK(check_rough_conditions(mk, info, r.prices));
        for (const Rational& p : r.prices) CHECK(p.is_positive());

        const ResidualMarket res = residual_market(mk, info, r.prices);
        if (res.trivial) continue;
        ++nontrivial;
        CHECK(res.delta.is_positive());

        // residual is saturated and its marks cover all residual items
        int total_demand = 0;
        Bundle all_marks = 0;
        for (std::size_t t = 0; t < res.player_map.size(); ++t) {
            total_demand += res.simplified.demands[t];
            all_marks |= res.simplified.marks[t];
            CHECK(res.simplified.demands[t] >= 1);
            CHECK(popcount(res.simplified.marks[t]) >= 2);  // one shared item could have been exclusive
        }
        CHECK(total_demand == static_cast<int>(res.item_map.size()));
        CHECK(all_marks == res.simplified.all_items());

        // any strictly-inside fine vector keeps the strict tiers intact
        PriceVector fine;
        const int count = static_cast<int>(res.item_map.size());
        for (int t = 0; t < count; ++t) fine.push_back(Rational(t + 1, count + 1));
        CHECK(strict_tiers_hold(mk, info, combine_prices(mk, res, r.prices, fine)));
    }
    CHECK(usable >= 60);
    CHECK(nontrivial >= 25);
}
