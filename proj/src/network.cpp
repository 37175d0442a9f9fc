#include "obsdet/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace obsdet {

Epsilon Epsilon::checked(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in [0, 1], got " + std::to_string(v));
    }
    return Epsilon{v};
}

BayesianNetwork::BayesianNetwork(std::vector<Variable> variables,
                                 std::vector<std::pair<VarIndex, VarIndex>> edges,
                                 std::vector<Cpt> cpts,
                                 std::string model_version)
    : variables_(std::move(variables)),
      edges_(std::move(edges)),
      cpts_(std::move(cpts)),
      model_version_(std::move(model_version)) {
    const std::size_t n = variables_.size();
    if (cpts_.size() != n) {
        throw std::invalid_argument("network needs exactly one CPT per variable");
    }
    for (const auto& [p, c] : edges_) {
        if (p < 0 || c < 0 || p >= static_cast<int>(n) || c >= static_cast<int>(n)) {
            throw std::invalid_argument("edge endpoint out of range");
        }
    }
    for (const Cpt& cpt : cpts_) {
        for (VarIndex p : cpt.parent_order) {
            if (p < 0 || p >= static_cast<int>(n)) {
                throw std::invalid_argument("CPT parent out of range");
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        index_.emplace(variables_[i].name, static_cast<VarIndex>(i));  // keeps first
    }

    parents_.assign(n, {});
    children_.assign(n, {});
    for (const auto& [p, c] : edges_) {
        parents_[static_cast<std::size_t>(c)].push_back(p);
        children_[static_cast<std::size_t>(p)].push_back(c);
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());

    // Descendant closure; DFS with a visited mask terminates on cycles too.
    descendants_.assign(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<VarIndex> stack(children_[s].begin(), children_[s].end());
        auto& seen = descendants_[s];
        while (!stack.empty()) {
            VarIndex v = stack.back();
            stack.pop_back();
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = true;
            for (VarIndex c : children_[static_cast<std::size_t>(v)]) stack.push_back(c);
        }
        seen[s] = false;  // strict
    }
}

VarIndex BayesianNetwork::var_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw LookupError("unknown variable '" + name + "'");
    return it->second;
}

std::optional<VarIndex> BayesianNetwork::find_var(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ValueIndex BayesianNetwork::value_index(VarIndex var, const std::string& label) const {
    const auto& dom = variable(var).domain;
    auto it = std::find(dom.begin(), dom.end(), label);
    if (it == dom.end()) {
        throw LookupError("variable '" + var_name(var) + "' has no value '" + label + "'");
    }
    return static_cast<ValueIndex>(it - dom.begin());
}

std::size_t BayesianNetwork::cpt_row_index(VarIndex v, const Assignment& full) const {
    const Cpt& c = cpt(v);
    std::size_t row = 0;
    for (VarIndex p : c.parent_order) {
        ValueIndex val = full.at(static_cast<std::size_t>(p));
        if (val == kUnassigned) {
            throw std::invalid_argument("parent '" + var_name(p) + "' of '" + var_name(v) +
                                        "' is unassigned");
        }
        row = row * static_cast<std::size_t>(domain_size(p)) + static_cast<std::size_t>(val);
    }
    return row;
}

double BayesianNetwork::local_probability(VarIndex v, ValueIndex value,
                                          const Assignment& full) const {
    const Cpt& c = cpt(v);
    return c.rows.at(cpt_row_index(v, full)).at(static_cast<std::size_t>(value));
}

namespace {

std::string describe_parent_row(const BayesianNetwork& net, VarIndex v, std::size_t row) {
    const Cpt& c = net.cpt(v);
    if (c.parent_order.empty()) return "()";
    // Decode the mixed-radix row index back into labels, least significant last.
    std::vector<ValueIndex> vals(c.parent_order.size(), 0);
    std::size_t rest = row;
    for (std::size_t i = c.parent_order.size(); i-- > 0;) {
        auto card = static_cast<std::size_t>(net.domain_size(c.parent_order[i]));
        vals[i] = static_cast<ValueIndex>(rest % card);
        rest /= card;
    }
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < c.parent_order.size(); ++i) {
        if (i) out << ", ";
        out << net.var_name(c.parent_order[i]) << "="
            << net.value_label(c.parent_order[i], vals[i]);
    }
    out << ")";
    return out.str();
}

}  // namespace

std::vector<Violation> validate_network(const BayesianNetwork& net) {
    std::vector<Violation> out;
    const int n = net.size();

    std::set<std::string> names;
    for (const Variable& v : net.variables()) {
        if (!names.insert(v.name).second) {
            out.push_back({"duplicate-variable", "variable name '" + v.name + "' declared twice"});
        }
        if (v.domain.size() < 2) {
            out.push_back({"domain-too-small",
                           "variable '" + v.name + "' needs at least two values"});
        }
        std::set<std::string> labels;
        for (const std::string& label : v.domain) {
            if (!labels.insert(label).second) {
                out.push_back({"duplicate-label",
                               "variable '" + v.name + "' repeats value '" + label + "'"});
            }
        }
    }

    std::set<std::pair<VarIndex, VarIndex>> seen_edges;
    for (const auto& e : net.edges()) {
        if (!seen_edges.insert(e).second) {
            out.push_back({"duplicate-edge", "edge " + net.var_name(e.first) + " -> " +
                                                 net.var_name(e.second) + " declared twice"});
        }
    }

    // Kahn's algorithm; whatever survives is part of some cycle.
    {
        std::vector<int> indegree(static_cast<std::size_t>(n), 0);
        for (const auto& e : net.edges()) ++indegree[static_cast<std::size_t>(e.second)];
        std::deque<VarIndex> ready;
        for (int i = 0; i < n; ++i)
            if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
        int emitted = 0;
        while (!ready.empty()) {
            VarIndex v = ready.front();
            ready.pop_front();
            ++emitted;
            for (VarIndex c : net.children(v)) {
                if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
            }
        }
        if (emitted < n) {
            std::ostringstream msg;
            msg << "edge graph is cyclic; involved:";
            for (int i = 0; i < n; ++i) {
                if (indegree[static_cast<std::size_t>(i)] > 0) msg << " " << net.var_name(i);
            }
            out.push_back({"cycle", msg.str()});
        }
    }

    for (int v = 0; v < n; ++v) {
        const Cpt& c = net.cpt(v);

        std::vector<VarIndex> declared = c.parent_order;
        std::sort(declared.begin(), declared.end());
        if (declared != net.parents(v) ||
            std::adjacent_find(declared.begin(), declared.end()) != declared.end()) {
            out.push_back({"cpt-parent-mismatch",
                           "CPT of '" + net.var_name(v) + "' does not match its in-edges"});
            continue;  // row geometry is meaningless past this point
        }

        std::size_t expected_rows = 1;
        for (VarIndex p : c.parent_order) {
            expected_rows *= static_cast<std::size_t>(net.domain_size(p));
        }
        if (c.rows.size() != expected_rows) {
            out.push_back({"cpt-row-count",
                           "CPT of '" + net.var_name(v) + "' has " + std::to_string(c.rows.size()) +
                               " rows, expected " + std::to_string(expected_rows)});
            continue;
        }

        for (std::size_t r = 0; r < c.rows.size(); ++r) {
            const auto& row = c.rows[r];
            if (row.size() != static_cast<std::size_t>(net.domain_size(v))) {
                out.push_back({"cpt-row-shape",
                               "CPT of '" + net.var_name(v) + "' row " + std::to_string(r) +
                                   " has wrong width"});
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row) {
                if (!std::isfinite(p) || p < 0.0 || p > 1.0) in_range = false;
                sum += p;
            }
            if (!in_range) {
                out.push_back({"cpt-prob-range",
                               "CPT of '" + net.var_name(v) + "' row " + std::to_string(r) +
                                   " " + describe_parent_row(net, v, r) +
                                   " has entries outside [0, 1]"});
            } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
                std::ostringstream msg;
                msg << "CPT of '" << net.var_name(v) << "' row " << r << " "
                    << describe_parent_row(net, v, r) << " sums to " << sum;
                out.push_back({"cpt-row-sum", msg.str()});
            }
        }
    }

    return out;
}

double joint_probability(const BayesianNetwork& net, const Assignment& full) {
    if (full.size() != static_cast<std::size_t>(net.size())) {
        throw std::invalid_argument("assignment covers " + std::to_string(full.size()) +
                                    " variables, network has " + std::to_string(net.size()));
    }
    std::string missing;
    for (int v = 0; v < net.size(); ++v) {
        if (full[static_cast<std::size_t>(v)] == kUnassigned) {
            missing += missing.empty() ? net.var_name(v) : ", " + net.var_name(v);
        }
    }
    if (!missing.empty()) {
        throw std::invalid_argument("assignment incomplete; missing: " + missing);
    }

    double p = 1.0;
    for (int v = 0; v < net.size(); ++v) {
        p *= net.local_probability(v, full[static_cast<std::size_t>(v)], full);
    }
    return p;
}

}  // namespace obsdet
