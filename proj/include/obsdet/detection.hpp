#pragma once

#include <string>
#include <utility>
#include <vector>

#include "obsdet/andor_tree.hpp"
#include "obsdet/network.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// One dependent group of prior observations that jointly contradicts the
/// new observation. and_set members are individually contradictory; or_set
/// members are jointly responsible with no single certain culprit.
struct ContradictorySubset {
    ObservationSet members;
    ObservationSet and_set;
    ObservationSet or_set;
    std::vector<std::string> diagnostics;
};

struct DetectionResult {
    bool contradictory = false;
    double probability = 1.0;  // P(o_new | requisite prior observations)
    AndOrTree tree;            // TRUE when not contradictory
    std::vector<std::string> diagnostics;
};

/// Definition test: P(o_new | obs_prime) <= eps, with the probability
/// returned alongside. Throws ImpossibleEvidenceError when obs_prime has
/// zero mass.
std::pair<bool, double> is_contradictory(const BayesianNetwork& net,
                                         const ObservationSet& obs_prime,
                                         const Observation& o_new, Epsilon eps);

/// Splits the pruned observation set into dependent components (connected
/// under active paths given only the new variable observed), keeps the
/// components that are themselves contradictory, and computes each one's
/// AND-set and OR-set.
std::vector<ContradictorySubset> decompose(const BayesianNetwork& net,
                                           const ObservationSet& pruned,
                                           const Observation& o_new, Epsilon eps);

/// Subtree for one contradictory subset: TRUE when both sets are empty, a
/// bare OR / AND when only one side is populated, otherwise
/// AND(a_1..a_k, OR(b_1..b_p)).
AndOrTree compose(const ContradictorySubset& subset);

/// Full pipeline: prune, contradiction test, decompose, per-subset compose
/// under a root AND, simplify. The non-contradictory case carries a TRUE
/// tree. Every repair set of the final tree is verified against the full
/// prior set; ones that fail to restore consistency are reported in
/// `diagnostics` ("residual-contradiction"). Precondition: o_new's variable
/// is absent from obs_prime (the caller replaces any previous observation
/// first).
DetectionResult detect(const BayesianNetwork& net, const ObservationSet& obs_prime,
                       const Observation& o_new, Epsilon eps);

}  // namespace obsdet
