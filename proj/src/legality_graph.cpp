#include "mdm/legality_graph.hpp"

#include <algorithm>
#include <queue>

#include "mdm/errors.hpp"

namespace mdm {

LegalityGraph build_legality_graph(const SimplifiedMarket& s, const Allocation& a) {
    require_valid(a.bundles.size() == static_cast<std::size_t>(s.num_players()),
                  "allocation must have one bundle per player");
    require_valid(a.assigned() == s.all_items(), "exchange graph needs a full assignment");

    LegalityGraph g;
    g.owner.assign(s.num_items(), -1);
    g.adj.assign(s.num_items(), 0);
    Bundle seen = 0;
    for (PlayerId i = 0; i < s.num_players(); ++i) {
        const Bundle b = a.bundles[i];
        require_valid((b & seen) == 0, "allocation bundles overlap");
        require_valid((b & ~s.marks[i]) == 0, "allocation hands a player an unmarked item");
        require_valid(popcount(b) <= s.demands[i], "allocation exceeds a player's demand");
        seen |= b;
        for_each_item(b, [&](ItemId x) {
            g.owner[x] = i;
            g.adj[x] = s.marks[i] & ~b;
        });
    }
    return g;
}

bool is_cycle(const LegalityGraph& g, const std::vector<ItemId>& cycle) {
    const std::size_t len = cycle.size();
    if (len < 2) return false;
    Bundle seen = 0;
    for (std::size_t j = 0; j < len; ++j) {
        if (has(seen, cycle[j])) return false;
        seen |= bit(cycle[j]);
        if (!has(g.adj[cycle[j]], cycle[(j + 1) % len])) return false;
    }
    return true;
}

bool is_uniquely_assigned(const LegalityGraph& g, const std::vector<ItemId>& cycle) {
    std::uint32_t owners = 0;
    for (const ItemId x : cycle) {
        const std::uint32_t b = 1u << g.owner[x];
        if (owners & b) return false;
        owners |= b;
    }
    return true;
}

std::vector<ItemId> shortest_cycle_through(const LegalityGraph& g, ItemId start) {
    const int n = static_cast<int>(g.adj.size());
    std::vector<int> parent(n, -1);
    std::vector<char> seen(n, 0);
    seen[start] = 1;
    std::queue<ItemId> q;
    q.push(start);
    while (!q.empty()) {
        const ItemId v = q.front();
        q.pop();
        if (has(g.adj[v], start)) {
            std::vector<ItemId> cycle;
            for (ItemId w = v; w != -1; w = parent[w]) cycle.push_back(w);
            std::reverse(cycle.begin(), cycle.end());
            return cycle;  // starts at `start` since its parent is -1
        }
        for_each_item(g.adj[v], [&](ItemId w) {
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = v;
                q.push(w);
            }
        });
    }
    return {};
}

std::vector<ItemId> find_uniquely_assigned_cycle(const LegalityGraph& g) {
    for (ItemId start = 0; start < static_cast<ItemId>(g.adj.size()); ++start) {
        std::vector<ItemId> cycle = shortest_cycle_through(g, start);
        if (cycle.empty()) continue;
        require_invariant(is_cycle(g, cycle), "BFS returned a non-cycle");
        require_invariant(is_uniquely_assigned(g, cycle),
                          "shortest cycle visits a player twice");
        return cycle;
    }
    throw InvariantError("exchange graph has no cycle");
}

namespace {

void ua_dfs(const LegalityGraph& g, ItemId root, ItemId v, Bundle visited,
            std::uint32_t owners, std::vector<ItemId>& path, UaCycleList& out,
            std::size_t limit) {
    if (out.truncated) return;
    for_each_item(g.adj[v], [&](ItemId w) {
        if (out.truncated) return;
        if (w == root) {
            if (path.size() >= 2) {
                if (out.cycles.size() == limit) {
                    out.truncated = true;
                    return;
                }
                out.cycles.push_back(path);
            }
            return;
        }
        if (w < root || has(visited, w)) return;
        const std::uint32_t ob = 1u << g.owner[w];
        if (owners & ob) return;
        path.push_back(w);
        ua_dfs(g, root, w, visited | bit(w), owners | ob, path, out, limit);
        path.pop_back();
    });
}

}  // namespace

UaCycleList enumerate_ua_cycles(const LegalityGraph& g, std::size_t limit) {
    UaCycleList out;
    // Rooting each cycle at its smallest item makes every cycle appear once,
    // in its canonical rotation.
    for (ItemId root = 0; root < static_cast<ItemId>(g.adj.size()); ++root) {
        std::vector<ItemId> path{root};
        ua_dfs(g, root, root, bit(root), 1u << g.owner[root], path, out, limit);
        if (out.truncated) break;
    }
    std::sort(out.cycles.begin(), out.cycles.end());
    return out;
}

Allocation reallocate_along_cycle(const SimplifiedMarket& s, const Allocation& a,
                                  const std::vector<ItemId>& cycle) {
    const LegalityGraph g = build_legality_graph(s, a);
    require_valid(is_cycle(g, cycle), "reallocation path is not a cycle of the exchange graph");
    Allocation next = a;
    const std::size_t len = cycle.size();
    for (std::size_t j = 0; j < len; ++j) {
        const ItemId moved = cycle[(j + 1) % len];
        const PlayerId to = g.owner[cycle[j]];
        next.bundles[g.owner[moved]] &= ~bit(moved);
        next.bundles[to] |= bit(moved);
    }
    require_invariant(next.assigned() == s.all_items(), "reallocation lost an item");
    for (PlayerId i = 0; i < s.num_players(); ++i) {
        require_invariant(popcount(next.bundles[i]) == popcount(a.bundles[i]),
                          "reallocation changed a bundle size");
        require_invariant((next.bundles[i] & ~s.marks[i]) == 0,
                          "reallocation handed a player an unmarked item");
    }
    return next;
}

InducedSubmarket remove_items(const SimplifiedMarket& s, const Allocation& a, Bundle removed) {
    require_valid((removed & ~s.all_items()) == 0, "removing unknown items");
    require_valid(removed != s.all_items(), "cannot remove every item");
    const LegalityGraph g = build_legality_graph(s, a);  // validates `a`
    (void)g;

    InducedSubmarket sub;
    std::vector<int> new_index(s.num_items(), -1);
    for (ItemId x = 0; x < s.num_items(); ++x) {
        if (has(removed, x)) continue;
        new_index[x] = static_cast<int>(sub.item_map.size());
        sub.item_map.push_back(x);
        sub.market.item_names.push_back(s.item_names[x]);
    }
    auto translate = [&](Bundle b) {
        Bundle out = 0;
        for_each_item(b & ~removed, [&](ItemId x) { out |= bit(new_index[x]); });
        return out;
    };
    for (PlayerId i = 0; i < s.num_players(); ++i) {
        const int kept = s.demands[i] - popcount(a.bundles[i] & removed);
        require_invariant(kept >= 0, "player loses more items than its demand");
        if (kept == 0) continue;
        sub.player_map.push_back(i);
        sub.market.player_names.push_back(s.player_names[i]);
        sub.market.demands.push_back(kept);
        sub.market.marks.push_back(translate(s.marks[i]));
        sub.allocation.bundles.push_back(translate(a.bundles[i]));
    }
    sub.market.validate();
    return sub;
}

}  // namespace mdm
