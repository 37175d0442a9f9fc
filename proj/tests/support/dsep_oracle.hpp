#pragma once

// Exhaustive active-path oracle: enumerates every simple undirected path and
// checks the four triple conditions directly. Deliberately shares nothing
// with graph.cpp beyond the network accessors.

#include <vector>

#include "obsdet/graph.hpp"
#include "obsdet/network.hpp"

namespace obsdet::testing {

namespace dsep_detail {

inline bool edge(const BayesianNetwork& net, VarIndex a, VarIndex b) {
    for (VarIndex c : net.children(a)) {
        if (c == b) return true;
    }
    return false;
}

inline bool has_observed_descendant(const BayesianNetwork& net, VarIndex v,
                                    const VarMask& observed) {
    std::vector<bool> seen(static_cast<std::size_t>(net.size()), false);
    std::vector<VarIndex> stack{v};
    while (!stack.empty()) {
        VarIndex cur = stack.back();
        stack.pop_back();
        for (VarIndex c : net.children(cur)) {
            if (seen[static_cast<std::size_t>(c)]) continue;
            seen[static_cast<std::size_t>(c)] = true;
            if (observed[static_cast<std::size_t>(c)]) return true;
            stack.push_back(c);
        }
    }
    return false;
}

inline bool interior_active(const BayesianNetwork& net, VarIndex prev, VarIndex mid,
                            VarIndex next, const VarMask& observed) {
    const bool in_prev = edge(net, prev, mid);    // prev -> mid
    const bool out_next = edge(net, mid, next);   // mid -> next
    const bool collider = in_prev && !out_next;   // prev -> mid <- next
    if (collider) {
        return observed[static_cast<std::size_t>(mid)] ||
               has_observed_descendant(net, mid, observed);
    }
    return !observed[static_cast<std::size_t>(mid)];
}

inline bool dfs(const BayesianNetwork& net, VarIndex prev, VarIndex cur, VarIndex goal,
                const VarMask& observed, std::vector<bool>& on_path) {
    if (cur == goal) return true;
    std::vector<VarIndex> neighbours = net.children(cur);
    const auto& pa = net.parents(cur);
    neighbours.insert(neighbours.end(), pa.begin(), pa.end());
    for (VarIndex next : neighbours) {
        if (on_path[static_cast<std::size_t>(next)]) continue;
        if (prev >= 0 && !interior_active(net, prev, cur, next, observed)) continue;
        on_path[static_cast<std::size_t>(next)] = true;
        if (dfs(net, cur, next, goal, observed, on_path)) return true;
        on_path[static_cast<std::size_t>(next)] = false;
    }
    return false;
}

}  // namespace dsep_detail

inline bool active_path_oracle(const BayesianNetwork& net, VarIndex x, VarIndex y,
                               const VarMask& observed) {
    std::vector<bool> on_path(static_cast<std::size_t>(net.size()), false);
    on_path[static_cast<std::size_t>(x)] = true;
    return dsep_detail::dfs(net, -1, x, y, observed, on_path);
}

}  // namespace obsdet::testing
