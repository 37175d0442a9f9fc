#pragma once

#include <vector>

#include "obsdet/network.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// Membership mask over the network's variables.
using VarMask = std::vector<bool>;

VarMask make_mask(const BayesianNetwork& net, const std::vector<VarIndex>& vars);
VarMask mask_of_observations(const BayesianNetwork& net, const ObservationSet& obs);

std::vector<VarIndex> spouses(const BayesianNetwork& net, VarIndex x);

/// Parents, children and spouses of x, excluding x itself, sorted by index.
std::vector<VarIndex> markov_blanket(const BayesianNetwork& net, VarIndex x);

enum class TripleKind { ChainForward, ChainBackward, Fork, Collider };

/// Three consecutive nodes on an undirected path, with the orientation of
/// the two edges between them.
struct PathTriple {
    VarIndex left = -1;
    VarIndex mid = -1;
    VarIndex right = -1;
    TripleKind kind = TripleKind::ChainForward;
};

/// Whether the triple lets dependence flow given the observed set: a
/// non-collider is active iff its middle node is unobserved; a collider is
/// active iff its middle node or one of its descendants is observed.
/// Throws std::invalid_argument when the stated edges do not exist.
bool triple_active(const BayesianNetwork& net, const PathTriple& t, const VarMask& observed);

/// All nodes touched by some active trail starting at `source`, including
/// observed endpoints (a trail may end at an observed node; only interior
/// triples are tested). touched[source] is always true. One breadth-first
/// pass, linear in nodes plus edges.
std::vector<bool> active_from(const BayesianNetwork& net, VarIndex source,
                              const VarMask& observed);

/// True iff some undirected path from x to y has every consecutive triple
/// active given `observed`.
bool has_active_path(const BayesianNetwork& net, VarIndex x, VarIndex y, const VarMask& observed);

/// Requisite-observation restriction: keeps exactly the observations that an
/// active path connects to o_new_var when all the others are observed,
/// computed in a single pass with evidence vars(obs_prime). Input order is
/// preserved. Precondition: o_new_var does not appear in obs_prime.
ObservationSet prune(const BayesianNetwork& net, const ObservationSet& obs_prime,
                     VarIndex o_new_var);

}  // namespace obsdet
