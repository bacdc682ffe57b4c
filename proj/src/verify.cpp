#include "mdm/verify.hpp"

#include <algorithm>
#include <numeric>

#include "mdm/errors.hpp"

namespace mdm {

std::optional<PricingViolation> find_pricing_violation(const Market& m, const PriceVector& p,
                                                       const Rational& known_optimum) {
    require_valid(p.size() == static_cast<std::size_t>(m.num_items()),
                  "price vector must cover every item");
    std::vector<int> caps(m.num_players());
    for (PlayerId i = 0; i < m.num_players(); ++i) caps[i] = m.players[i].demand;

    for (PlayerId i = 0; i < m.num_players(); ++i) {
        const int keep = caps[i];
        caps[i] = 0;  // the first buyer takes its bundle and leaves
        for (const Bundle b : demand_bundles(m, p, i)) {
            const Rational achievable =
                bundle_value(m, i, b) + max_assignment_value(m, m.all_items() & ~b, caps);
            if (achievable != known_optimum) {
                caps[i] = keep;
                return PricingViolation{i, b, achievable, known_optimum};
            }
        }
        caps[i] = keep;
    }
    return std::nullopt;
}

std::optional<PricingViolation> find_pricing_violation(const Market& m, const PriceVector& p) {
    return find_pricing_violation(m, p, optimal_welfare(m));
}

bool is_dynamic_pricing(const Market& m, const PriceVector& p) {
    return !find_pricing_violation(m, p).has_value();
}

bool marks_match_legality(const SimplifiedMarket& s) {
    LegalityInfo info;
    try {
        info = legality(s.as_market());
    } catch (const ValidationError&) {
        return false;
    }
    return info.legal == s.marks;
}

std::optional<PriceVector> brute_force_pricing(const SimplifiedMarket& s, int max_items) {
    const int m = s.num_items();
    if (m > max_items) {
        throw UnsupportedRegimeError("brute-force pricing is bounded to " +
                                     std::to_string(max_items) + " items, market has " +
                                     std::to_string(m));
    }
    const Market valued = s.as_market();
    const Rational optimum = optimal_welfare(valued);

    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 1);
    do {
        PriceVector p;
        p.reserve(m);
        for (int x = 0; x < m; ++x) p.push_back(Rational(perm[x], m + 1));
        if (!find_pricing_violation(valued, p, optimum)) return p;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

}  // namespace mdm
