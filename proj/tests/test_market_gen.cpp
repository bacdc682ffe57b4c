#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mdm/errors.hpp"
#include "mdm/market_gen.hpp"
#include "mdm/matching.hpp"
#include "mdm/rough.hpp"
#include "mdm/verify.hpp"

using namespace mdm;

namespace {

bool same_market(const Market& a, const Market& b) {
    if (a.item_names != b.item_names) return false;
    if (a.num_players() != b.num_players()) return false;
    for (PlayerId i = 0; i < a.num_players(); ++i) {
        if (a.players[i].name != b.players[i].name) return false;
        if (a.players[i].demand != b.players[i].demand) return false;
        if (a.players[i].values != b.players[i].values) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("the same seed reproduces the same market") {
    GenProfile prof;
    prof.seed = 42;
    const Market a = generate(prof);
    const Market b = generate(prof);
    CHECK(same_market(a, b));

    prof.seed = 43;
    CHECK(!same_market(a, generate(prof)));
}

TEST_CASE("profile validation rejects out-of-line bounds") {
    const auto broken = [](auto&& mutate) {
        GenProfile p;
        mutate(p);
        return p;
    };
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.min_players = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.min_players = 5; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.min_demand = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.min_demand = 4; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.max_value = 0; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.max_value = 11; }).validate(), ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) {
                        p.min_players = 3;
                        p.max_players = 3;
                        p.min_demand = 2;
                        p.max_items = 5;
                    }).validate(),
                    ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.max_items = kMaxItems + 1; }).validate(),
                    ValidationError);
    CHECK_THROWS_AS(broken([](GenProfile& p) { p.max_attempts = 0; }).validate(), ValidationError);
}

TEST_CASE("generated markets meet the standing assumptions and the profile") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GenProfile prof;
        prof.seed = seed;
        const Market mk = generate(prof);
        CHECK_NOTHROW(legality(mk));
        CHECK(mk.num_players() >= prof.min_players);
        CHECK(mk.num_players() <= prof.max_players);
        int total = 0;
        for (const Player& p : mk.players) {
            CHECK(p.demand >= prof.min_demand);
            CHECK(p.demand <= prof.max_demand);
            total += p.demand;
            for (const Rational& v : p.values) CHECK(v <= Rational(prof.max_value));
        }
        CHECK(total == mk.num_items());
        CHECK(mk.num_items() <= prof.max_items);
    }
}

TEST_CASE("regime targets hold in the output") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GenProfile four;
        four.max_players = 6;
        four.regime = TargetRegime::four_players;
        four.seed = seed;
        CHECK(generate(four).num_players() <= 4);

        GenProfile tri;
        tri.max_demand = 5;
        tri.regime = TargetRegime::tridemand;
        tri.seed = seed;
        for (const Player& p : generate(tri).players) CHECK(p.demand <= 3);

        GenProfile two;
        two.regime = TargetRegime::two_allocations;
        two.seed = seed;
        const Market mk = generate(two);
        const EnumerationResult en = enumerate_optimal_allocations(mk, 3);
        CHECK(!en.truncated);
        CHECK(en.allocations.size() <= 2);
    }
}

TEST_CASE("a one-player profile degenerates to a trivial residual") {
    GenProfile prof;
    prof.min_players = 1;
    prof.max_players = 1;
    prof.seed = 7;
    const Market mk = generate(prof);
    CHECK(mk.num_players() == 1);
    const LegalityInfo info = legality(mk);
    const RoughPricing rough = rough_prices(mk, info);
    CHECK(residual_market(mk, info, rough.prices).trivial);
}

TEST_CASE("an impossible profile exhausts its budget") {
    GenProfile prof;
    prof.min_players = 5;
    prof.max_players = 5;
    prof.regime = TargetRegime::four_players;
    prof.max_attempts = 25;
    try {
        generate(prof);
        FAIL("generation should have given up");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("25") != std::string::npos);
    }
}

TEST_CASE("fixtures match their frozen definitions") {
    const Market m1 = fixture_market("M1");
    CHECK(m1.item_names == std::vector<std::string>{"alpha", "beta", "gamma", "delta"});
    CHECK(m1.players[0].demand == 2);
    CHECK(m1.players[1].demand == 1);
    CHECK(m1.players[2].demand == 1);
    CHECK(m1.players[0].values == std::vector<Rational>{2, 1, 1, 1});
    CHECK(m1.players[1].values == std::vector<Rational>{2, 0, 1, 0});
    CHECK(m1.players[2].values == std::vector<Rational>{1, 0, 0, 1});
    CHECK(optimal_welfare(m1) == Rational(5));
    CHECK(enumerate_optimal_allocations(m1, 10).allocations.size() == 2);

    CHECK(optimal_welfare(fixture_market("M2")) == Rational(4));
    CHECK(optimal_welfare(fixture_market("M3")) == Rational(5));
    CHECK_THROWS_AS(fixture_market("nope"), ValidationError);

    for (const char* name : {"C4", "type4", "odd_pair", "fig1_case3"}) {
        const SimplifiedMarket s = fixture_simplified(name);
        CHECK(marks_match_legality(s));
    }
    CHECK_THROWS_AS(fixture_simplified("nope"), ValidationError);
}
