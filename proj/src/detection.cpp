#include "obsdet/detection.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "obsdet/graph.hpp"
#include "obsdet/inference.hpp"

namespace obsdet {

namespace {

std::string describe_observations(const BayesianNetwork& net, const ObservationSet& obs) {
    std::string out = "{";
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (i) out += ", ";
        out += net.var_name(obs[i].var) + "=" + net.value_label(obs[i].var, obs[i].value);
    }
    return out + "}";
}

double conditional(const BayesianNetwork& net, const Observation& o_new,
                   const ObservationSet& evidence) {
    return query(net, Query{o_new.var, o_new.value, to_evidence(evidence)});
}

// Same, but failures name the subset being probed.
double conditional_in(const BayesianNetwork& net, const Observation& o_new,
                      const ObservationSet& evidence, const ObservationSet& subset) {
    try {
        return conditional(net, o_new, evidence);
    } catch (const ImpossibleEvidenceError& e) {
        throw ImpossibleEvidenceError(std::string(e.what()) + " while probing subset " +
                                      describe_observations(net, subset));
    }
}

}  // namespace

std::pair<bool, double> is_contradictory(const BayesianNetwork& net,
                                         const ObservationSet& obs_prime,
                                         const Observation& o_new, Epsilon eps) {
    Epsilon::checked(eps.value);
    double p = conditional(net, o_new, obs_prime);
    return {p <= eps.value, p};
}

std::vector<ContradictorySubset> decompose(const BayesianNetwork& net,
                                           const ObservationSet& pruned,
                                           const Observation& o_new, Epsilon eps) {
    Epsilon::checked(eps.value);

    // Components of the dependence graph over the pruned variables, with an
    // edge wherever an active path exists given only the new variable
    // observed. One reachability pass per member.
    const std::size_t m = pruned.size();
    std::vector<std::size_t> component(m);
    std::iota(component.begin(), component.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (component[i] != i) {
            component[i] = component[component[i]];
            i = component[i];
        }
        return i;
    };

    const VarMask only_new = make_mask(net, {o_new.var});
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<bool> touched = active_from(net, pruned[i].var, only_new);
        for (std::size_t j = i + 1; j < m; ++j) {
            if (touched[static_cast<std::size_t>(pruned[j].var)]) {
                component[find(i)] = find(j);
            }
        }
    }

    // Group members in input order; components ordered by first appearance.
    std::vector<ObservationSet> groups;
    std::vector<std::size_t> root_to_group(m, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t root = find(i);
        if (root_to_group[root] == SIZE_MAX) {
            root_to_group[root] = groups.size();
            groups.emplace_back();
        }
        groups[root_to_group[root]].push_back(pruned[i]);
    }

    std::vector<ContradictorySubset> out;
    for (const ObservationSet& members : groups) {
        // Components consistent with the new observation carry no culprit.
        double p_members = conditional_in(net, o_new, members, members);
        if (p_members > eps.value) continue;

        ContradictorySubset subset;
        subset.members = members;
        ObservationSet residual;
        for (const Observation& obs : members) {
            double p_single = conditional_in(net, o_new, {obs}, members);
            if (p_single <= eps.value) {
                subset.and_set.push_back(obs);
            } else {
                residual.push_back(obs);
            }
        }

        if (!residual.empty()) {
            double p_residual = subset.and_set.empty()
                                    ? p_members
                                    : conditional_in(net, o_new, residual, members);
            if (p_residual <= eps.value) {
                // Elimination: drop every member whose removal leaves the
                // rest contradictory; each one is tested independently.
                ObservationSet kept;
                for (std::size_t i = 0; i < residual.size(); ++i) {
                    ObservationSet rest;
                    for (std::size_t j = 0; j < residual.size(); ++j) {
                        if (j != i) rest.push_back(residual[j]);
                    }
                    if (conditional_in(net, o_new, rest, members) > eps.value) {
                        kept.push_back(residual[i]);
                    }
                }

                if (kept.size() == residual.size()) {
                    subset.or_set = std::move(kept);
                } else if (conditional_in(net, o_new, kept, members) <= eps.value) {
                    subset.or_set = std::move(kept);
                    // The reduced set is only asserted, not guaranteed, to
                    // stay minimal; flag members whose removal no longer
                    // restores consistency.
                    for (std::size_t i = 0; i < subset.or_set.size(); ++i) {
                        ObservationSet rest;
                        for (std::size_t j = 0; j < subset.or_set.size(); ++j) {
                            if (j != i) rest.push_back(subset.or_set[j]);
                        }
                        if (conditional_in(net, o_new, rest, members) <= eps.value) {
                            subset.diagnostics.push_back(
                                "or-set-nonminimal: removing " +
                                describe_observations(net, {subset.or_set[i]}) +
                                " alone does not restore consistency");
                        }
                    }
                    if (subset.or_set.empty()) {
                        subset.diagnostics.push_back(
                            "or-set-empty-after-elimination: every member of " +
                            describe_observations(net, residual) + " was eliminable");
                    }
                } else {
                    subset.diagnostics.push_back(
                        "or-set-fallback: eliminated set lost the contradiction; keeping " +
                        describe_observations(net, residual));
                    subset.or_set = residual;
                }
            }
            // A residual that is not contradictory on its own is ignored.
        }

        out.push_back(std::move(subset));
    }
    return out;
}

AndOrTree compose(const ContradictorySubset& subset) {
    std::vector<AndOrTree> and_leaves;
    for (const Observation& a : subset.and_set) and_leaves.push_back(AndOrTree::make_leaf(a));
    std::vector<AndOrTree> or_leaves;
    for (const Observation& b : subset.or_set) or_leaves.push_back(AndOrTree::make_leaf(b));

    if (and_leaves.empty() && or_leaves.empty()) return AndOrTree::make_true();
    if (and_leaves.empty()) return AndOrTree::make_or(std::move(or_leaves));
    if (or_leaves.empty()) return AndOrTree::make_and(std::move(and_leaves));
    and_leaves.push_back(AndOrTree::make_or(std::move(or_leaves)));
    return AndOrTree::make_and(std::move(and_leaves));
}

DetectionResult detect(const BayesianNetwork& net, const ObservationSet& obs_prime,
                       const Observation& o_new, Epsilon eps) {
    Epsilon::checked(eps.value);
    for (const Observation& obs : obs_prime) {
        if (obs.var == o_new.var) {
            throw std::invalid_argument("detect: '" + net.var_name(o_new.var) +
                                        "' still has a prior observation; replace it first");
        }
    }

    DetectionResult result;
    ObservationSet requisite = prune(net, obs_prime, o_new.var);
    auto [contradictory, p] = is_contradictory(net, requisite, o_new, eps);
    result.contradictory = contradictory;
    result.probability = p;
    if (!contradictory) {
        result.tree = AndOrTree::make_true();
        return result;
    }

    std::vector<AndOrTree> subtrees;
    for (ContradictorySubset& subset : decompose(net, requisite, o_new, eps)) {
        subtrees.push_back(compose(subset));
        for (std::string& note : subset.diagnostics) {
            result.diagnostics.push_back(std::move(note));
        }
    }
    result.tree = simplify(AndOrTree::make_and(std::move(subtrees)));
    if (result.tree.kind == AndOrTree::Kind::True) {
        result.diagnostics.push_back(
            "contradiction-without-identifiable-culprit: the prior observations "
            "contradict the new one but no removable subset was found");
        return result;
    }

    // The per-component construction does not guarantee that a removal keeps
    // the WHOLE remaining set consistent: reduced components can still
    // contradict jointly, and an observation screened off by a removed one
    // can resurface. Verify each candidate and flag the stragglers.
    for (const ObservationSet& removal : repair_sets(result.tree)) {
        ObservationSet remaining;
        for (const Observation& obs : obs_prime) {
            if (std::find(removal.begin(), removal.end(), obs) == removal.end()) {
                remaining.push_back(obs);
            }
        }
        double p_after = conditional(net, o_new, remaining);
        if (p_after <= eps.value) {
            result.diagnostics.push_back(
                "residual-contradiction: removing " + describe_observations(net, removal) +
                " still leaves p = " + std::to_string(p_after) + " <= epsilon");
        }
    }
    return result;
}

}  // namespace obsdet
