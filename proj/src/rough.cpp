#include "mdm/rough.hpp"

#include <algorithm>
#include <optional>

#include "mdm/errors.hpp"

namespace mdm {

namespace {

// Cycle existence on the collapsed item digraph, weights ignored.
bool has_cycle(int num_items, const std::vector<AuxEdge>& edges) {
    std::vector<Bundle> adj(num_items, 0);
    for (const AuxEdge& e : edges) adj[e.from] |= bit(e.to);
    // colors: 0 unseen, 1 on stack, 2 done
    std::vector<int> color(num_items, 0);
    std::vector<int> stack;
    for (int root = 0; root < num_items; ++root) {
        if (color[root] != 0) continue;
        stack.push_back(root);
        while (!stack.empty()) {
            const int v = stack.back();
            if (color[v] == 0) {
                color[v] = 1;
                Bundle b = adj[v];
                while (b != 0) {
                    const ItemId w = static_cast<ItemId>(__builtin_ctz(b));
                    b &= b - 1;
                    if (color[w] == 1) return true;
                    if (color[w] == 0) stack.push_back(w);
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

}  // namespace

AuxiliaryGraph build_auxiliary_graph(const Market& m, const LegalityInfo& info) {
    AuxiliaryGraph g;
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        const Bundle legal = info.legal[i];
        const Bundle excl = info.exclusive[i];
        for_each_item(legal, [&](ItemId x) {
            for (ItemId y = 0; y < m.num_items(); ++y) {
                if (y == x || has(excl, y)) continue;
                AuxEdge e;
                e.from = x;
                e.to = y;
                e.player = i;
                e.weight = m.value(i, x) - m.value(i, y);
                e.in_zero_cycle = !has(excl, x) && has(legal, y);
                g.edges.push_back(e);
            }
        });
    }
    g.acyclic = !has_cycle(m.num_items(), g.edges);
    return g;
}

EpsilonInfo compute_epsilon(const Market& m, const AuxiliaryGraph& g) {
    EpsilonInfo eps;
    std::vector<Rational> values;
    std::optional<Rational> smallest;
    for (const Player& pl : m.players) {
        for (const Rational& v : pl.values) {
            values.push_back(v);
            if (v.is_positive() && (!smallest || v < *smallest)) smallest = v;
        }
    }
    require_valid(smallest.has_value(), "market has no positive value at all");
    eps.value_bound = *smallest;

    eps.cycle_bound_finite = !g.acyclic;
    Rational bound = eps.value_bound;
    if (eps.cycle_bound_finite) {
        // Cycle weights are signed sums of values, so any positive one is at
        // least one over the common denominator.
        eps.cycle_bound = Rational(1, common_denominator(values));
        bound = min(bound, eps.cycle_bound);
    }
    eps.epsilon = bound / Rational(m.num_items() + 1);
    return eps;
}

RoughPricing rough_prices(const Market& m, const LegalityInfo& info) {
    RoughPricing r;
    r.graph = build_auxiliary_graph(m, info);
    r.eps = compute_epsilon(m, r.graph);
    const Rational epsilon = r.eps.epsilon;
    const int n = m.num_items();

    // Collapse parallel edges to the smallest discounted weight.
    std::vector<std::vector<std::optional<Rational>>> w(n, std::vector<std::optional<Rational>>(n));
    for (const AuxEdge& e : r.graph.edges) {
        Rational adjusted = e.weight;
        if (!e.in_zero_cycle) adjusted -= epsilon;
        if (!w[e.from][e.to] || adjusted < *w[e.from][e.to]) w[e.from][e.to] = adjusted;
    }

    // Bellman-Ford from a virtual source with zero-weight edges to every
    // item: starting everyone at zero bakes those in.
    std::vector<Rational> dist(n, Rational(0));
    for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (int x = 0; x < n; ++x) {
            for (int y = 0; y < n; ++y) {
                if (!w[x][y]) continue;
                const Rational through = dist[x] + *w[x][y];
                if (through < dist[y]) {
                    dist[y] = through;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            require_invariant(!w[x][y] || dist[x] + *w[x][y] >= dist[y],
                              "auxiliary graph has a negative cycle");

    r.prices.reserve(n);
    for (int x = 0; x < n; ++x) r.prices.push_back(epsilon - dist[x]);
    require_invariant(check_rough_conditions(m, info, r.prices),
                      "rough prices violate their tier conditions");
    return r;
}

bool check_rough_conditions(const Market& m, const LegalityInfo& info, const PriceVector& p) {
    for (PlayerId i = 0; i < m.num_players(); ++i) {
        const Bundle legal = info.legal[i];
        const Bundle excl = info.exclusive[i];
        const Bundle shared = legal & ~excl;
        auto u = [&](ItemId x) { return m.value(i, x) - p[x]; };
        for (ItemId x = 0; x < m.num_items(); ++x) {
            for (ItemId y = 0; y < m.num_items(); ++y) {
                if (x == y) continue;
                if (has(excl, x) && !has(excl, y) && !(u(x) > u(y))) return false;
                if (has(shared, x) && has(shared, y) && u(x) != u(y)) return false;
                if (has(legal, x) && !has(legal, y) && !(u(x) > u(y))) return false;
            }
            if (has(legal, x) && !u(x).is_positive()) return false;
        }
    }
    return true;
}

ResidualMarket residual_market(const Market& m, const LegalityInfo& info, const PriceVector& rough) {
    ResidualMarket res;
    Bundle exclusive_union = 0;
    for (const Bundle b : info.exclusive) exclusive_union |= b;
    const Bundle shared_items = m.all_items() & ~exclusive_union;

    res.trivial = (shared_items == 0);
    res.delta = Rational(0);
    for_each_item(shared_items, [&](ItemId x) { res.item_map.push_back(x); });
    std::vector<int> item_index(m.num_items(), -1);
    for (std::size_t t = 0; t < res.item_map.size(); ++t) item_index[res.item_map[t]] = static_cast<int>(t);

    for (PlayerId i = 0; i < m.num_players(); ++i) {
        const Bundle shared = info.legal[i] & ~info.exclusive[i];
        if (shared == 0) continue;
        res.player_map.push_back(i);

        const int excl_count = popcount(info.exclusive[i]);
        const int residual_demand = m.players[i].demand - excl_count;
        require_invariant(residual_demand >= 1, "residual player keeps no demand");

        Bundle marks = 0;
        std::optional<Rational> base;
        for_each_item(shared, [&](ItemId x) {
            require_invariant(item_index[x] >= 0, "shared item missing from the residual");
            marks |= bit(item_index[x]);
            const Rational u = m.value(i, x) - rough[x];
            if (!base) base = u;
            require_invariant(u == *base, "shared items do not tie in utility");
        });
        res.base_utility.push_back(*base);

        Rational outside(0);
        for (ItemId y = 0; y < m.num_items(); ++y) {
            if (has(info.legal[i], y)) continue;
            outside = max(outside, m.value(i, y) - rough[y]);
        }
        const Rational room = *base - outside;
        require_invariant(room.is_positive(), "no headroom above the outside option");
        res.headroom.push_back(room);
        res.delta = (res.headroom.size() == 1) ? room : min(res.delta, room);

        res.simplified.player_names.push_back(m.players[i].name);
        res.simplified.demands.push_back(residual_demand);
        res.simplified.marks.push_back(marks);
    }
    require_invariant(res.trivial == res.player_map.empty(),
                      "residual items and residual players must vanish together");
    if (res.trivial) return res;

    for (const ItemId x : res.item_map) res.simplified.item_names.push_back(m.item_names[x]);
    res.simplified.validate();
    return res;
}

PriceVector combine_prices(const Market& m, const ResidualMarket& r, const PriceVector& rough,
                           const PriceVector& fine) {
    require_valid(rough.size() == static_cast<std::size_t>(m.num_items()),
                  "rough prices must cover every item");
    require_valid(fine.size() == r.item_map.size(), "fine prices must cover every residual item");
    PriceVector p = rough;
    for (std::size_t t = 0; t < fine.size(); ++t) {
        require_invariant(fine[t].is_positive() && fine[t] < Rational(1),
                          "fine prices must lie strictly inside (0,1)");
        p[r.item_map[t]] += r.delta * fine[t];
    }
    return p;
}

}  // namespace mdm
