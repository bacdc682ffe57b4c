#include "mdm/matching.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "mdm/errors.hpp"

namespace mdm {

namespace {

// Min-cost perfect matching on a square rational matrix via potentials,
// O(n^3). Returns row matched to each column. The sentinel exceeds any
// reachable reduced cost, so it never leaks into potentials of real matches.
std::vector<int> hungarian(const std::vector<std::vector<Rational>>& a) {
    const int n = static_cast<int>(a.size());
    Rational inf(1);
    for (const auto& row : a)
        for (const Rational& c : row) inf += c.abs();

    std::vector<Rational> u(n + 1, Rational(0));
    std::vector<Rational> v(n + 1, Rational(0));
    std::vector<int> p(n + 1, 0);
    std::vector<int> way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<Rational> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            Rational delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const Rational cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (j1 < 0 || minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            require_invariant(j1 >= 0, "hungarian: no unused column during augmentation");
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> match(n);
    for (int j = 1; j <= n; ++j) match[j - 1] = p[j] - 1;
    return match;
}

void check_caps(const Market& m, const std::vector<int>& caps) {
    require_valid(caps.size() == static_cast<std::size_t>(m.num_players()),
                  "assignment caps must have one entry per player");
    for (int c : caps) require_valid(c >= 0, "assignment caps must be non-negative");
}

std::vector<int> demand_caps(const Market& m) {
    std::vector<int> caps(m.num_players());
    for (PlayerId i = 0; i < m.num_players(); ++i) caps[i] = m.players[i].demand;
    return caps;
}

// Shared DFS for enumerate_optimal_allocations / canonical_optimal_allocation.
struct EnumContext {
    const Market& m;
    std::vector<ItemId> items;  // ascending
    Rational target;
    std::size_t limit;
    EnumerationResult out;
    std::vector<int> caps;
    Allocation current;

    explicit EnumContext(const Market& market) : m(market) {}

    Bundle suffix_mask(std::size_t depth) const {
        Bundle b = 0;
        for (std::size_t t = depth; t < items.size(); ++t) b |= bit(items[t]);
        return b;
    }

    void dfs(std::size_t depth, const Rational& acc) {
        if (out.truncated) return;
        if (depth == items.size()) {
            if (out.allocations.size() == limit) {
                out.truncated = true;
                return;
            }
            out.allocations.push_back(current);
            return;
        }
        const ItemId x = items[depth];
        const Bundle rest = suffix_mask(depth + 1);
        for (PlayerId i = 0; i < m.num_players(); ++i) {
            if (caps[i] == 0) continue;
            const Rational gained = acc + m.value(i, x);
            --caps[i];
            if (gained + max_assignment_value(m, rest, caps) == target) {
                current.bundles[i] |= bit(x);
                dfs(depth + 1, gained);
                current.bundles[i] &= ~bit(x);
            }
            ++caps[i];
            if (out.truncated) return;
        }
        // Leaving x unassigned can still be optimal in markets that break the
        // standing assumption; enumerate those leaves too, after all owners.
        if (acc + max_assignment_value(m, rest, caps) == target) dfs(depth + 1, acc);
    }
};

}  // namespace

AssignmentResult max_assignment(const Market& m, Bundle items, const std::vector<int>& caps) {
    check_caps(m, caps);
    std::vector<ItemId> cols;
    for_each_item(items, [&](ItemId x) { cols.push_back(x); });
    std::vector<PlayerId> rows;
    for (PlayerId i = 0; i < m.num_players(); ++i)
        for (int t = 0; t < caps[i]; ++t) rows.push_back(i);

    AssignmentResult res;
    res.welfare = Rational(0);
    res.allocation.bundles.assign(m.num_players(), 0);
    const std::size_t n = std::max(rows.size(), cols.size());
    if (n == 0) return res;

    // Square matrix, zero-padded: items may go unmatched (dummy rows) and
    // clones may stay empty (dummy columns).
    std::vector<std::vector<Rational>> cost(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) cost[r][c] = -m.value(rows[r], cols[c]);

    const std::vector<int> match = hungarian(cost);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const std::size_t r = static_cast<std::size_t>(match[c]);
        if (r >= rows.size()) continue;
        res.welfare += m.value(rows[r], cols[c]);
        res.allocation.bundles[rows[r]] |= bit(cols[c]);
    }
    return res;
}

Rational max_assignment_value(const Market& m, Bundle items, const std::vector<int>& caps) {
    return max_assignment(m, items, caps).welfare;
}

Rational optimal_welfare(const Market& m) {
    return max_assignment_value(m, m.all_items(), demand_caps(m));
}

LegalityInfo legality(const Market& m) {
    m.validate();
    const std::vector<int> caps = demand_caps(m);
    LegalityInfo info;
    info.max_welfare = max_assignment_value(m, m.all_items(), caps);

    // Standing assumption, part one: dropping any single item must strictly
    // lower the optimum; otherwise some optimal allocation ignores that item.
    for (ItemId x = 0; x < m.num_items(); ++x) {
        const Rational without = max_assignment_value(m, m.all_items() & ~bit(x), caps);
        require_valid(without < info.max_welfare,
                      "market violates the standing assumption: some optimal allocation leaves item '" +
                          m.item_names[x] + "' unassigned");
    }

    info.legal.assign(m.num_players(), 0);
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        std::vector<int> reduced = caps;
        --reduced[i];
        for (ItemId x = 0; x < m.num_items(); ++x) {
            const Rational rest = max_assignment_value(m, m.all_items() & ~bit(x), reduced);
            if (m.value(i, x) + rest == info.max_welfare) {
                // Standing assumption, part two: legal assignments carry value.
                require_valid(m.value(i, x).is_positive(),
                              "market violates the standing assumption: item '" + m.item_names[x] +
                                  "' is assigned to player '" + m.players[i].name +
                                  "' at zero value in some optimal allocation");
                info.legal[i] |= bit(x);
            }
        }
    }

    // With every item assigned everywhere, an item is exclusively player i's
    // exactly when no other player can legally receive it.
    info.exclusive.assign(m.num_players(), 0);
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        Bundle others = 0;
        for (PlayerId j = 0; j < m.num_players(); ++j)
            if (j != i) others |= info.legal[j];
        info.exclusive[i] = info.legal[i] & ~others;
    }
    return info;
}

bool is_extendable(const Market& m, const Allocation& forced, const Rational& known_optimum) {
    require_valid(forced.bundles.size() == static_cast<std::size_t>(m.num_players()),
                  "forced allocation must have one bundle per player");
    Bundle used = 0;
    Rational forced_value(0);
    std::vector<int> caps = demand_caps(m);
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        const Bundle b = forced.bundles[i];
        require_valid((used & b) == 0, "forced bundles overlap");
        used |= b;
        if (popcount(b) > m.players[i].demand) return false;
        caps[i] -= popcount(b);
        forced_value += bundle_value(m, i, b);
    }
    return forced_value + max_assignment_value(m, m.all_items() & ~used, caps) == known_optimum;
}

bool is_extendable(const Market& m, const Allocation& forced) {
    return is_extendable(m, forced, optimal_welfare(m));
}

EnumerationResult enumerate_optimal_allocations(const Market& m, std::size_t limit) {
    m.validate();
    EnumContext ctx(m);
    for (ItemId x = 0; x < m.num_items(); ++x) ctx.items.push_back(x);
    ctx.caps = demand_caps(m);
    ctx.target = max_assignment_value(m, m.all_items(), ctx.caps);
    ctx.limit = limit;
    ctx.current.bundles.assign(m.num_players(), 0);
    ctx.dfs(0, Rational(0));
    return std::move(ctx.out);
}

Allocation canonical_optimal_allocation(const Market& m) {
    EnumerationResult res = enumerate_optimal_allocations(m, 1);
    require_invariant(!res.allocations.empty(), "optimal allocation enumeration found no leaf");
    return res.allocations.front();
}

std::optional<HallCertificate> hall_violator(const SimplifiedMarket& s, Bundle items,
                                             const std::vector<int>& caps) {
    require_valid(caps.size() == s.demands.size(), "matching caps must have one entry per player");
    std::vector<PlayerId> clone_player;
    std::vector<Bundle> clone_adj;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        require_valid(caps[i] >= 0, "matching caps must be non-negative");
        for (int t = 0; t < caps[i]; ++t) {
            clone_player.push_back(static_cast<PlayerId>(i));
            clone_adj.push_back(s.marks[i] & items);
        }
    }
    const int clones = static_cast<int>(clone_player.size());
    const int num_items = s.num_items();

    std::vector<int> item_match(num_items, -1);
    std::vector<char> visited(num_items, 0);
    std::function<bool(int)> augment = [&](int c) -> bool {
        Bundle b = clone_adj[c];
        while (b != 0) {
            const ItemId x = static_cast<ItemId>(__builtin_ctz(b));
            b &= b - 1;
            if (visited[x]) continue;
            visited[x] = 1;
            if (item_match[x] < 0 || augment(item_match[x])) {
                item_match[x] = c;
                return true;
            }
        }
        return false;
    };

    std::vector<char> clone_matched(clones, 0);
    int matched = 0;
    for (int c = 0; c < clones; ++c) {
        std::fill(visited.begin(), visited.end(), 0);
        if (augment(c)) {
            clone_matched[c] = 1;
            ++matched;
        }
    }
    if (matched == clones) return std::nullopt;

    // Alternating closure from every unmatched clone. The reached clones S
    // and reached items T satisfy |T| = |S| - #unmatched < |S|, and clones of
    // one player share adjacency, so the certificate holds at player level.
    std::vector<char> in_s(clones, 0);
    std::queue<int> pending;
    for (int c = 0; c < clones; ++c) {
        if (!clone_matched[c]) {
            in_s[c] = 1;
            pending.push(c);
        }
    }
    Bundle reach = 0;
    while (!pending.empty()) {
        const int c = pending.front();
        pending.pop();
        Bundle fresh = clone_adj[c] & ~reach;
        while (fresh != 0) {
            const ItemId x = static_cast<ItemId>(__builtin_ctz(fresh));
            fresh &= fresh - 1;
            reach |= bit(x);
            require_invariant(item_match[x] >= 0, "alternating closure reached an unmatched item");
            if (!in_s[item_match[x]]) {
                in_s[item_match[x]] = 1;
                pending.push(item_match[x]);
            }
        }
    }

    HallCertificate cert;
    cert.reachable_items = reach;
    long long demand_total = 0;
    Bundle player_adj = 0;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        bool present = false;
        for (int c = 0; c < clones; ++c) {
            if (in_s[c] && clone_player[c] == static_cast<PlayerId>(i)) {
                present = true;
                break;
            }
        }
        if (present) {
            cert.deficient_players.push_back(static_cast<PlayerId>(i));
            demand_total += caps[i];
            player_adj |= s.marks[i] & items;
        }
    }
    require_invariant(player_adj == reach, "Hall certificate items disagree with player marks");
    require_invariant(popcount(reach) < demand_total, "Hall certificate is not deficient");
    return cert;
}

bool is_extendable(const SimplifiedMarket& s, const Allocation& forced) {
    require_valid(forced.bundles.size() == s.demands.size(),
                  "forced allocation must have one bundle per player");
    Bundle used = 0;
    std::vector<int> caps = s.demands;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        const Bundle b = forced.bundles[i];
        require_valid((used & b) == 0, "forced bundles overlap");
        used |= b;
        if ((b & ~s.marks[i]) != 0) return false;
        if (popcount(b) > caps[i]) return false;
        caps[i] -= popcount(b);
    }
    return !hall_violator(s, s.all_items() & ~used, caps).has_value();
}

}  // namespace mdm
