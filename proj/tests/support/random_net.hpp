#pragma once

// Seeded generators for random DAGs, CPTs, evidence and queries.

#include <string>
#include <utility>
#include <vector>

#include "obsdet/inference.hpp"
#include "obsdet/network.hpp"
#include "obsdet/rng.hpp"

namespace obsdet::testing {

/// Random binary-variable DAG: edge i -> j considered for every i < j, so the
/// index order is already topological. CPT entries are kept strictly inside
/// [floor, 1 - floor]. With `spiky` set, half the rows hug the extremes,
/// which makes strong dependencies (and hence contradictions) common.
inline BayesianNetwork random_binary_network(Rng& rng, int n, double edge_prob,
                                             double floor = 0.02, bool spiky = false) {
    std::vector<Variable> vars;
    for (int i = 0; i < n; ++i) {
        vars.push_back({"v" + std::to_string(i), {"0", "1"}});
    }
    std::vector<std::pair<VarIndex, VarIndex>> edges;
    std::vector<std::vector<VarIndex>> parents(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.uniform01() < edge_prob) {
                edges.emplace_back(i, j);
                parents[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
    std::vector<Cpt> cpts;
    for (int v = 0; v < n; ++v) {
        Cpt cpt;
        cpt.parent_order = parents[static_cast<std::size_t>(v)];
        std::size_t rows = std::size_t{1} << cpt.parent_order.size();
        for (std::size_t r = 0; r < rows; ++r) {
            double p;
            if (spiky && rng.below(2) == 0) {
                double edge = floor + 0.05 * rng.uniform01();
                p = rng.below(2) == 0 ? edge : 1.0 - edge;
            } else {
                p = floor + (1.0 - 2.0 * floor) * rng.uniform01();
            }
            cpt.rows.push_back({1.0 - p, p});
        }
        cpts.push_back(std::move(cpt));
    }
    return BayesianNetwork(std::move(vars), std::move(edges), std::move(cpts));
}

/// Evidence on a random subset of variables, excluding `avoid`.
inline Evidence random_evidence(Rng& rng, const BayesianNetwork& net, int count, VarIndex avoid) {
    std::vector<VarIndex> pool;
    for (int v = 0; v < net.size(); ++v) {
        if (v != avoid) pool.push_back(v);
    }
    rng.shuffle(pool);
    Evidence evidence;
    for (int i = 0; i < count && i < static_cast<int>(pool.size()); ++i) {
        VarIndex v = pool[static_cast<std::size_t>(i)];
        evidence[v] = static_cast<ValueIndex>(rng.below(
            static_cast<std::uint64_t>(net.domain_size(v))));
    }
    return evidence;
}

inline Query random_query(Rng& rng, const BayesianNetwork& net, int max_evidence) {
    Query q;
    q.target = static_cast<VarIndex>(rng.below(static_cast<std::uint64_t>(net.size())));
    q.value = static_cast<ValueIndex>(
        rng.below(static_cast<std::uint64_t>(net.domain_size(q.target))));
    const int count = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_evidence) + 1));
    q.evidence = random_evidence(rng, net, count, q.target);
    return q;
}

}  // namespace obsdet::testing
