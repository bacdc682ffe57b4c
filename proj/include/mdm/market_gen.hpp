// market_gen.hpp - seeded random markets and the named fixture catalogue.
//
// generate() rejection-samples saturated integer-valued markets until the
// standing assumptions hold and the requested regime precondition is met.
// The same profile (seed included) always yields the same market, byte for
// byte. fixture_market / fixture_simplified return the small hand-built
// markets the tests and docs refer to by name.

#pragma once

#include <cstdint>
#include <string>

#include "mdm/market.hpp"

namespace mdm {

// Which pricing regime the generated market must qualify for.
enum class TargetRegime {
    any,
    four_players,     // at most four players
    two_allocations,  // at most two optimal allocations
    tridemand,        // every demand at most three
};

struct GenProfile {
    int min_players = 2;
    int max_players = 4;
    int min_demand = 1;
    int max_demand = 3;
    // Values are drawn from 1..max_value (small integers keep the
    // enumeration oracles fast and the rational arithmetic small).
    int max_value = 6;
    // Upper bound on total demand; draws past it are rejected.
    int max_items = kMaxItems;
    TargetRegime regime = TargetRegime::any;
    std::uint64_t seed = 0;
    // Rejection budget before generate() gives up.
    int max_attempts = 2000;

    // Throws ValidationError when a range is empty or a bound is out of line.
    void validate() const;
};

// Draws markets until one passes validate(), the standing assumptions
// (checked through legality()), and the profile's regime precondition.
// Throws ValidationError with the attempt count when the budget runs out.
Market generate(const GenProfile& profile);

// Named valued fixtures: "M1", "M2", "M3". Unknown name throws
// ValidationError.
Market fixture_market(const std::string& name);

// Named simplified fixtures: "C4", "type4", "odd_pair", "fig1_case3".
// Unknown name throws ValidationError.
SimplifiedMarket fixture_simplified(const std::string& name);

}  // namespace mdm
