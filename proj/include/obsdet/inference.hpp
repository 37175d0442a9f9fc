#pragma once

#include <map>
#include <vector>

#include "obsdet/network.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// Observed values keyed by variable; at most one per variable by
/// construction of the map.
using Evidence = std::map<VarIndex, ValueIndex>;

/// Throws std::invalid_argument if two observations share a variable.
Evidence to_evidence(const ObservationSet& obs);

struct Query {
    VarIndex target = -1;
    ValueIndex value = -1;
    Evidence evidence;
};

/// Conditional probability by exhaustive enumeration over all full
/// assignments of the network. Exponential; this is the testing oracle and
/// deliberately shares no machinery with the variable-elimination engine.
/// Throws ImpossibleEvidenceError when the evidence has zero marginal.
double query_enumeration(const BayesianNetwork& net, const Query& q);

/// Exact conditional probability by variable elimination restricted to the
/// requisite (ancestral) subgraph. Agrees with query_enumeration within
/// 1e-9 on every valid query. Same error contract.
double query(const BayesianNetwork& net, const Query& q);

/// Posterior over the whole domain of `target`; sums to 1 within 1e-9.
/// Precondition: target is not an evidence variable.
std::vector<double> posterior_distribution(const BayesianNetwork& net, VarIndex target,
                                           const Evidence& evidence);

/// Evidence mass below this is treated as impossible (underflow guard).
inline constexpr double kEvidenceFloor = 1e-300;

}  // namespace obsdet
