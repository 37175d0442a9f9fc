#pragma once

#include <string>
#include <vector>

#include "obsdet/network.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// Root-AND tree over candidate obsolete observations. AND children must all
/// be removed; OR children offer alternatives; a TRUE tree carries no
/// removable culprit.
struct AndOrTree {
    enum class Kind { And, Or, Leaf, True };

    Kind kind = Kind::True;
    std::vector<AndOrTree> children;  // empty for Leaf / True
    Observation observation;          // meaningful for Leaf only

    static AndOrTree make_true() { return AndOrTree{}; }
    static AndOrTree make_leaf(Observation o) {
        return AndOrTree{Kind::Leaf, {}, std::move(o)};
    }
    static AndOrTree make_and(std::vector<AndOrTree> children) {
        return AndOrTree{Kind::And, std::move(children), {}};
    }
    static AndOrTree make_or(std::vector<AndOrTree> children) {
        return AndOrTree{Kind::Or, std::move(children), {}};
    }
};

/// Structural equality; leaves compare by (variable, value).
bool operator==(const AndOrTree& a, const AndOrTree& b);
inline bool operator!=(const AndOrTree& a, const AndOrTree& b) { return !(a == b); }

/// Normal form: TRUE children of AND nodes removed, AND-under-AND flattened,
/// single-child internal nodes collapsed (the root stays AND or TRUE), and
/// duplicate leaves under one parent merged. Preserves the repair sets
/// exactly.
AndOrTree simplify(AndOrTree tree);

/// Every candidate removal set: all AND leaves plus exactly one leaf per OR
/// node. Sets are sorted by (variable, value), deduplicated, and the list is
/// ordered lexicographically, so the indexing is stable for a given tree.
std::vector<ObservationSet> repair_sets(const AndOrTree& tree);

/// Infix rendering: AND children each in parentheses joined with "and", OR
/// members joined with "or", leaves as var=value. A TRUE tree renders as
/// "true".
std::string render_formula(const BayesianNetwork& net, const AndOrTree& tree);

}  // namespace obsdet
