#include <doctest.h>

#include <algorithm>
#include <vector>

#include "helpers.hpp"
#include "mdm/errors.hpp"
#include "mdm/market_gen.hpp"
#include "mdm/matching.hpp"
#include "mdm/pricing.hpp"
#include "mdm/rough.hpp"
#include "mdm/verify.hpp"
#include "structure_check.hpp"

using namespace mdm;
using testutil::check_structure_log;
using testutil::make_market;

namespace {

bool positive_and_distinct(const PriceVector& p) {
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (!p[x].is_positive()) return false;
        for (std::size_t y = x + 1; y < p.size(); ++y)
            if (p[x] == p[y]) return false;
    }
    return true;
}

// All-ones valued market: n players with the given demands, every item
// valued at 1 by everyone, so every full assignment is optimal.
Market all_ones(const std::vector<int>& demands) {
    int m = 0;
    for (int k : demands) m += k;
    std::vector<std::vector<Rational>> rows(demands.size(),
                                            std::vector<Rational>(m, Rational(1)));
    std::vector<std::string> items;
    for (int x = 0; x < m; ++x) items.push_back("x" + std::to_string(x + 1));
    return make_market(items, demands, rows);
}

}  // namespace

TEST_CASE("rank quantization maps order to uniform ranks") {
    const PriceVector p = {Rational(1, 2), Rational(1, 8), Rational(7, 8)};
    CHECK(rank_quantize(p) == PriceVector{Rational(1, 2), Rational(1, 4), Rational(3, 4)});
    CHECK(rank_quantize({}) == PriceVector{});
    CHECK(rank_quantize({Rational(1, 3)}) == PriceVector{Rational(1, 2)});
    CHECK_THROWS_AS(rank_quantize({Rational(1, 2), Rational(1, 2)}), InvariantError);
}

TEST_CASE("the four-item fixture prices under every regime") {
    const Market m1 = fixture_market("M1");
    for (Regime r : {Regime::automatic, Regime::brute, Regime::four_players,
                     Regime::two_allocations, Regime::tridemand}) {
        const MarketPricing mp = dynamic_price_market(m1, r);
        CHECK(!find_pricing_violation(m1, mp.prices).has_value());
        CHECK(positive_and_distinct(mp.prices));
        CHECK(check_structure_log(mp.log).empty());
        if (r == Regime::automatic)
            CHECK(mp.regime == Regime::tridemand);
        else
            CHECK(mp.regime == r);
    }
}

TEST_CASE("automatic dispatch picks the first fitting regime") {
    // Residual demands of {4,2} rule out the fixed-item recursion, but two
    // players qualify for the player-count regime.
    const Market wide = all_ones({4, 2});
    const MarketPricing mp = dynamic_price_market(wide);
    CHECK(mp.regime == Regime::four_players);
    CHECK(!find_pricing_violation(wide, mp.prices).has_value());

    // Five players, a demand above three, and many optima fit nothing.
    const Market none = all_ones({4, 4, 4, 4, 4});
    CHECK_THROWS_AS(dynamic_price_market(none), UnsupportedRegimeError);
}

TEST_CASE("trivial residuals keep rough prices") {
    const Market solo = make_market({"a", "b"}, {1, 1}, {{3, 0}, {0, 2}});
    const MarketPricing mp = dynamic_price_market(solo);
    CHECK(mp.residual.trivial);
    CHECK(mp.fine.empty());
    // With nothing shared there is no residual to classify, so an automatic
    // request is reported back unresolved.
    CHECK(mp.regime == Regime::automatic);
    REQUIRE(mp.log.entries.size() == 1);
    CHECK(mp.log.entries[0].kind == StructureKind::trivial_residual);
    CHECK(!find_pricing_violation(solo, mp.prices).has_value());

    const Market diag = make_market({"a", "b", "c", "d"}, {1, 1, 1, 1},
                                    {{1, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 4}});
    const MarketPricing mpd = dynamic_price_market(diag);
    CHECK(mpd.residual.trivial);
    CHECK(!find_pricing_violation(diag, mpd.prices).has_value());
}

TEST_CASE("fixing an item pins it cheapest among the shared items") {
    const Market m2 = fixture_market("M2");
    const MarketPricing mp = dynamic_price_market_fixed_at(m2, 0);
    CHECK(!find_pricing_violation(m2, mp.prices).has_value());
    CHECK(mp.prices[0] < mp.prices[1]);
    CHECK(mp.prices[0] < mp.prices[2]);

    for (ItemId x = 0; x < 3; ++x) {
        const MarketPricing at = dynamic_price_market_fixed_at(m2, x);
        CHECK(!find_pricing_violation(m2, at.prices).has_value());
        for (ItemId y : at.residual.item_map)
            if (y != x) CHECK(at.prices[x] < at.prices[y]);
        CHECK(check_structure_log(at.log).empty());
    }

    // Item d is exclusively assigned, so its ordering is not free.
    CHECK_THROWS_AS(dynamic_price_market_fixed_at(m2, 3), ValidationError);
    CHECK_THROWS_AS(dynamic_price_market_fixed_at(m2, -1), ValidationError);
    CHECK_THROWS_AS(dynamic_price_market_fixed_at(m2, 4), ValidationError);

    // A market with nothing shared has nothing to fix.
    const Market solo = make_market({"a", "b"}, {1, 1}, {{3, 0}, {0, 2}});
    CHECK_THROWS_AS(dynamic_price_market_fixed_at(solo, 0), ValidationError);
}

TEST_CASE("generated markets price and verify under automatic dispatch") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GenProfile prof;
        prof.max_items = 10;
        prof.seed = seed;
        const Market mk = generate(prof);
        const MarketPricing mp = dynamic_price_market(mk);
        CHECK(!find_pricing_violation(mk, mp.prices).has_value());
        CHECK(positive_and_distinct(mp.prices));
        CHECK(check_structure_log(mp.log).empty());
    }
}
