#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obsdet/errors.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// A finite-domain network variable. Labels keep their declared order; that
/// order fixes CPT column layout and all tie-breaking.
struct Variable {
    std::string name;
    std::vector<std::string> domain;
};

/// Conditional probability table for one variable. Row k corresponds to the
/// k-th parent assignment in lexicographic order: first parent most
/// significant, values ranked by declared domain order. Each row lists
/// probabilities over the child's domain in declared order.
struct Cpt {
    std::vector<VarIndex> parent_order;
    std::vector<std::vector<double>> rows;
};

/// One broken invariant found by validate_network. Violations are data, not
/// failures; `code` is stable for machine consumption.
struct Violation {
    std::string code;
    std::string message;
};

/// Immutable directed network over finite-domain variables with one CPT per
/// variable. Construction builds lookup structures but does not enforce the
/// semantic invariants; run validate_network for that. Safe to share across
/// threads once constructed.
class BayesianNetwork {
public:
    BayesianNetwork(std::vector<Variable> variables,
                    std::vector<std::pair<VarIndex, VarIndex>> edges,
                    std::vector<Cpt> cpts,
                    std::string model_version = {});

    int size() const { return static_cast<int>(variables_.size()); }
    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(VarIndex v) const { return variables_.at(static_cast<std::size_t>(v)); }
    const std::vector<std::pair<VarIndex, VarIndex>>& edges() const { return edges_; }
    const Cpt& cpt(VarIndex v) const { return cpts_.at(static_cast<std::size_t>(v)); }
    const std::string& model_version() const { return model_version_; }

    int domain_size(VarIndex v) const { return static_cast<int>(variable(v).domain.size()); }

    /// Throws LookupError for unknown names/labels.
    VarIndex var_index(const std::string& name) const;
    ValueIndex value_index(VarIndex var, const std::string& label) const;
    std::optional<VarIndex> find_var(const std::string& name) const;

    const std::string& var_name(VarIndex v) const { return variable(v).name; }
    const std::string& value_label(VarIndex v, ValueIndex k) const {
        return variable(v).domain.at(static_cast<std::size_t>(k));
    }

    // Adjacency derived from the edge list, sorted by index.
    const std::vector<VarIndex>& parents(VarIndex v) const { return parents_.at(static_cast<std::size_t>(v)); }
    const std::vector<VarIndex>& children(VarIndex v) const { return children_.at(static_cast<std::size_t>(v)); }

    /// True iff `d` is reachable from `v` by directed edges (strict: a node
    /// is not its own descendant). Precomputed once at construction.
    bool is_descendant(VarIndex v, VarIndex d) const {
        return descendants_.at(static_cast<std::size_t>(v)).at(static_cast<std::size_t>(d));
    }
    const std::vector<bool>& descendants(VarIndex v) const {
        return descendants_.at(static_cast<std::size_t>(v));
    }

    /// Index of the CPT row selected by `full` for variable `v`; the
    /// assignment must cover all parents of v's CPT.
    std::size_t cpt_row_index(VarIndex v, const Assignment& full) const;

    /// P(v = value | parent values read from `full`).
    double local_probability(VarIndex v, ValueIndex value, const Assignment& full) const;

private:
    std::vector<Variable> variables_;
    std::vector<std::pair<VarIndex, VarIndex>> edges_;
    std::vector<Cpt> cpts_;
    std::string model_version_;

    std::unordered_map<std::string, VarIndex> index_;  // first occurrence wins
    std::vector<std::vector<VarIndex>> parents_;
    std::vector<std::vector<VarIndex>> children_;
    std::vector<std::vector<bool>> descendants_;
};

/// Checks every structural invariant and returns all violations found; an
/// empty report means the network is valid for every operation in this
/// library. Codes: "duplicate-variable", "domain-too-small",
/// "duplicate-label", "cycle", "cpt-parent-mismatch", "cpt-row-count",
/// "cpt-row-shape", "cpt-prob-range", "cpt-row-sum", "duplicate-edge".
std::vector<Violation> validate_network(const BayesianNetwork& net);

/// Chain-rule joint probability of a full assignment. Throws
/// std::invalid_argument naming the missing variables if any are unassigned.
double joint_probability(const BayesianNetwork& net, const Assignment& full);

inline constexpr double kRowSumTolerance = 1e-9;

}  // namespace obsdet
