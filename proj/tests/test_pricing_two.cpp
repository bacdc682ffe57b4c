#include <doctest.h>

#include <algorithm>
#include <vector>

#include "helpers.hpp"
#include "mdm/errors.hpp"
#include "mdm/legality_graph.hpp"
#include "mdm/market_gen.hpp"
#include "mdm/matching.hpp"
#include "mdm/pricing.hpp"
#include "mdm/pricing_two.hpp"
#include "mdm/verify.hpp"
#include "structure_check.hpp"

using namespace mdm;
using testutil::check_structure_log;
using testutil::make_alloc;
using testutil::make_simplified;

namespace {

Bundle mask_of(std::initializer_list<ItemId> xs) {
    Bundle b = 0;
    for (ItemId x : xs) b |= bit(x);
    return b;
}

int times_marked(const SimplifiedMarket& s, ItemId x) {
    int c = 0;
    for (PlayerId i = 0; i < s.num_players(); ++i)
        if (has(s.marks[i], x)) ++c;
    return c;
}

}  // namespace

TEST_CASE("an even four-cycle prices by alternating bands") {
    const SimplifiedMarket s = fixture_simplified("C4");
    for (ItemId x = 0; x < s.num_items(); ++x) CHECK(times_marked(s, x) == 2);

    StructureLog log;
    const PriceVector p = price_two_allocations(s, &log, 0);
    const PriceVector want = {Rational(1, 20), Rational(17, 20), Rational(3, 20),
                              Rational(19, 20)};
    CHECK(p == want);
    CHECK(!find_pricing_violation(s.as_market(), p).has_value());

    REQUIRE(log.entries.size() == 1);
    CHECK(log.entries[0].kind == StructureKind::removable_cycle);
    CHECK(log.entries[0].items == std::vector<ItemId>{0, 1, 2, 3});
    CHECK(check_structure_log(log).empty());
}

TEST_CASE("a lone odd cycle leaves its base item with the leftovers") {
    const SimplifiedMarket s = fixture_simplified("type4");
    const Market full = s.as_market();
    const EnumerationResult en = enumerate_optimal_allocations(full, 10);
    CHECK(en.allocations.size() == 2);

    const Allocation a = canonical_optimal_allocation(full);
    CHECK(a.bundles == make_alloc({{0}, {1}, {2}}).bundles);
    const CycleStructure cs = find_cycle_structure(build_legality_graph(s, a));
    CHECK(cs.kind == CycleStructureKind::type4_set);
    CHECK(cs.cycle == std::vector<ItemId>{0, 1, 2});

    StructureLog log;
    const PriceVector p = price_two_allocations(s, &log, 0);
    const PriceVector want = {Rational(1, 2), Rational(7, 8), Rational(3, 16)};
    CHECK(p == want);
    // The cycle's odd positions clear every leftover price, the even
    // positions stay below all of them.
    CHECK(p[1] > p[0]);
    CHECK(p[2] < p[0]);
    CHECK(!find_pricing_violation(full, p).has_value());

    REQUIRE(log.entries.size() == 2);
    CHECK(log.entries[0].kind == StructureKind::type4_set);
    CHECK(log.entries[0].depth == 0);
    CHECK(log.entries[1].kind == StructureKind::brute_base);
    CHECK(log.entries[1].depth == 1);
    CHECK(check_structure_log(log).empty());
}

TEST_CASE("a five-cycle bands four items around the leftover base") {
    const SimplifiedMarket s = make_simplified(
        {"x1", "x2", "x3", "x4", "x5"}, {1, 1, 1, 1, 1},
        {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    CHECK(enumerate_optimal_allocations(s.as_market(), 10).allocations.size() == 2);

    StructureLog log;
    const PriceVector p = price_two_allocations(s, &log, 0);
    const PriceVector want = {Rational(1, 2), Rational(5, 6), Rational(1, 8), Rational(11, 12),
                              Rational(5, 24)};
    CHECK(p == want);
    CHECK(p[1] > p[0]);
    CHECK(p[3] > p[0]);
    CHECK(p[2] < p[0]);
    CHECK(p[4] < p[0]);
    CHECK(!find_pricing_violation(s.as_market(), p).has_value());

    REQUIRE(log.entries.size() == 2);
    CHECK(log.entries[0].kind == StructureKind::type4_set);
    CHECK(log.entries[1].kind == StructureKind::brute_base);
    CHECK(check_structure_log(log).empty());
}

TEST_CASE("two odd triangles merge into an even cycle through their shared vertex") {
    const SimplifiedMarket s = fixture_simplified("odd_pair");
    const Allocation a = make_alloc({{0}, {1}, {2, 4}, {3}});
    const LegalityGraph g = build_legality_graph(s, a);
    CHECK(g.adj[0] == mask_of({1, 3}));
    CHECK(g.adj[1] == mask_of({2}));
    CHECK(g.adj[2] == mask_of({0}));
    CHECK(g.adj[3] == mask_of({4}));
    CHECK(g.adj[4] == mask_of({0}));

    const UaCycleList cycles = enumerate_ua_cycles(g);
    REQUIRE(cycles.cycles.size() == 2);
    CHECK(cycles.cycles[0] == std::vector<ItemId>{0, 1, 2});
    CHECK(cycles.cycles[1] == std::vector<ItemId>{0, 3, 4});

    CHECK(is_odd_cycle_pair(g, {0, 1, 2}, {0, 3, 4}, 0));
    CHECK(!is_odd_cycle_pair(g, {0, 1, 2}, {0, 3, 4}, 1));   // suffixes differ
    CHECK(!is_odd_cycle_pair(g, {0, 1, 2}, {0, 1, 2}, 0));   // one cycle is no pair
    CHECK(!is_odd_cycle_pair(g, {1, 2, 0}, {0, 3, 4}, 0));   // bases must coincide

    const CycleStructure cs = find_cycle_structure(g);
    CHECK(cs.kind == CycleStructureKind::odd_cycle_pair);
    CHECK(cs.cycle == std::vector<ItemId>{0, 1, 2});
    CHECK(cs.cycle2 == std::vector<ItemId>{0, 3, 4});
    CHECK(cs.overlap == 0);

    // Walking the second triangle merges the pair into one even cycle.
    const Allocation b = reallocate_along_cycle(s, a, cs.cycle2);
    CHECK(b.bundles == make_alloc({{3}, {1}, {0, 2}, {4}}).bundles);
    const LegalityGraph g2 = build_legality_graph(s, b);
    CHECK(g2.adj[0] == mask_of({4}));
    CHECK(g2.adj[1] == mask_of({2}));
    CHECK(g2.adj[2] == mask_of({4}));
    CHECK(g2.adj[3] == mask_of({0, 1}));
    CHECK(g2.adj[4] == mask_of({3}));

    const std::vector<ItemId> merged = {3, 1, 2, 4};
    CHECK(is_cycle(g2, merged));
    CHECK(is_uniquely_assigned(g2, merged));
    CHECK(merged.size() % 2 == 0);
    CHECK(!is_odd_cycle_pair(g2, merged, {3, 0, 4}, 0));  // even cycles pair with nothing

    const CycleStructure cs2 = find_cycle_structure(g2);
    CHECK(cs2.kind == CycleStructureKind::removable_cycle);
    CHECK(cs2.cycle == std::vector<ItemId>{1, 2, 4, 3});
}

TEST_CASE("markets outside the two-optimum regime are rejected by type") {
    const SimplifiedMarket pair = fixture_simplified("odd_pair");
    CHECK(enumerate_optimal_allocations(pair.as_market(), 10).allocations.size() == 3);
    CHECK_THROWS_AS(price_two_allocations(pair), UnsupportedRegimeError);

    // Three unit players sharing three items: six optima.
    const SimplifiedMarket six =
        make_simplified({"a", "b", "c"}, {1, 1, 1}, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
    CHECK_THROWS_AS(price_two_allocations(six), UnsupportedRegimeError);

    // An item only one player marks is outside the regime's precondition.
    const SimplifiedMarket lone = make_simplified({"a", "b"}, {1, 1}, {{0, 1}, {1}});
    CHECK_THROWS_AS(price_two_allocations(lone), ValidationError);
}

TEST_CASE("the structure search needs a cycle to stand on") {
    const SimplifiedMarket s = make_simplified({"a", "b"}, {1, 1}, {{0}, {0, 1}});
    const LegalityGraph g = build_legality_graph(s, make_alloc({{0}, {1}}));
    CHECK_THROWS_AS(find_cycle_structure(g), InvariantError);
}

TEST_CASE("a two-item shared pair alternates low and high") {
    const SimplifiedMarket s = make_simplified({"a", "c"}, {1, 1}, {{0, 1}, {0, 1}});
    const Allocation a = canonical_optimal_allocation(s.as_market());
    const CycleStructure cs = find_cycle_structure(build_legality_graph(s, a));
    CHECK(cs.kind == CycleStructureKind::removable_cycle);
    CHECK(cs.cycle == std::vector<ItemId>{0, 1});

    StructureLog log;
    const PriceVector p = price_two_allocations(s, &log, 0);
    CHECK(p == PriceVector{Rational(1, 12), Rational(11, 12)});
    CHECK(!find_pricing_violation(s.as_market(), p).has_value());
    CHECK(check_structure_log(log).empty());
}

TEST_CASE("generated two-optimum markets price and verify through the driver") {
    int nontrivial = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        GenProfile prof;
        prof.regime = TargetRegime::two_allocations;
        prof.max_items = 10;
        prof.seed = seed;
        const Market mk = generate(prof);
        const MarketPricing mp = dynamic_price_market(mk, Regime::two_allocations);
        CHECK(!find_pricing_violation(mk, mp.prices).has_value());
        CHECK(mp.regime == Regime::two_allocations);
        const std::string err = check_structure_log(mp.log);
        CHECK(err.empty());
        if (!mp.residual.trivial) ++nontrivial;
    }
    CHECK(nontrivial > 5);
}
