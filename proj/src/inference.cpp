#include "obsdet/inference.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "factor.hpp"

namespace obsdet {

namespace {

void check_query_shape(const BayesianNetwork& net, VarIndex target, const Evidence& evidence) {
    if (target < 0 || target >= net.size()) {
        throw LookupError("query: target index out of range");
    }
    for (const auto& [var, val] : evidence) {
        if (var < 0 || var >= net.size()) throw LookupError("query: evidence index out of range");
        if (val < 0 || val >= net.domain_size(var)) {
            throw LookupError("query: evidence value out of range for '" + net.var_name(var) + "'");
        }
    }
    if (evidence.count(target)) {
        throw std::invalid_argument("query: target '" + net.var_name(target) +
                                    "' must not carry evidence");
    }
}

std::string render_evidence(const BayesianNetwork& net, const Evidence& evidence) {
    std::string out;
    for (const auto& [var, val] : evidence) {
        if (!out.empty()) out += ", ";
        out += net.var_name(var) + "=" + net.value_label(var, val);
    }
    return out.empty() ? "(none)" : out;
}

}  // namespace

Evidence to_evidence(const ObservationSet& obs) {
    Evidence e;
    for (const Observation& o : obs) {
        auto [it, inserted] = e.emplace(o.var, o.value);
        if (!inserted) {
            throw std::invalid_argument("observation set assigns variable index " +
                                        std::to_string(o.var) + " twice");
        }
    }
    return e;
}

double query_enumeration(const BayesianNetwork& net, const Query& q) {
    check_query_shape(net, q.target, q.evidence);
    if (q.value < 0 || q.value >= net.domain_size(q.target)) {
        throw LookupError("query: value index out of range for '" + net.var_name(q.target) + "'");
    }

    const int n = net.size();
    Assignment full(static_cast<std::size_t>(n), 0);
    for (const auto& [var, val] : q.evidence) full[static_cast<std::size_t>(var)] = val;

    // Odometer over all non-evidence variables.
    std::vector<VarIndex> free_vars;
    for (int v = 0; v < n; ++v) {
        if (!q.evidence.count(v)) free_vars.push_back(v);
    }

    double denominator = 0.0;
    double numerator = 0.0;
    bool done = false;
    while (!done) {
        double p = 1.0;
        for (int v = 0; v < n; ++v) {
            p *= net.local_probability(v, full[static_cast<std::size_t>(v)], full);
        }
        denominator += p;
        if (full[static_cast<std::size_t>(q.target)] == q.value) numerator += p;

        done = true;
        for (std::size_t i = free_vars.size(); i-- > 0;) {
            auto vi = static_cast<std::size_t>(free_vars[i]);
            if (++full[vi] < net.domain_size(free_vars[i])) {
                done = false;
                break;
            }
            full[vi] = 0;
        }
    }

    if (denominator < kEvidenceFloor) {
        throw ImpossibleEvidenceError("conditioning on impossible evidence: " +
                                      render_evidence(net, q.evidence));
    }
    return numerator / denominator;
}

namespace {

using detail::Factor;

// Variables whose factors can influence the query: the ancestral closure of
// the target and the evidence. Everything else is barren and sums to one.
std::vector<bool> relevant_set(const BayesianNetwork& net, VarIndex target,
                               const Evidence& evidence) {
    std::vector<bool> relevant(static_cast<std::size_t>(net.size()), false);
    std::vector<VarIndex> stack{target};
    for (const auto& [var, _] : evidence) stack.push_back(var);
    while (!stack.empty()) {
        VarIndex v = stack.back();
        stack.pop_back();
        if (relevant[static_cast<std::size_t>(v)]) continue;
        relevant[static_cast<std::size_t>(v)] = true;
        for (VarIndex p : net.parents(v)) stack.push_back(p);
    }
    return relevant;
}

// CPT factor of `v` with evidence variables sliced out of the scope.
Factor cpt_factor(const BayesianNetwork& net, VarIndex v, const Evidence& evidence) {
    std::vector<VarIndex> scope{v};
    scope.insert(scope.end(), net.cpt(v).parent_order.begin(), net.cpt(v).parent_order.end());

    std::vector<VarIndex> free_scope;
    for (VarIndex s : scope) {
        if (!evidence.count(s)) free_scope.push_back(s);
    }
    std::sort(free_scope.begin(), free_scope.end());
    free_scope.erase(std::unique(free_scope.begin(), free_scope.end()), free_scope.end());

    Factor f;
    f.vars = free_scope;
    f.cards.reserve(free_scope.size());
    std::size_t total = 1;
    for (VarIndex s : free_scope) {
        f.cards.push_back(net.domain_size(s));
        total *= static_cast<std::size_t>(net.domain_size(s));
    }
    f.values.resize(total);

    Assignment full(static_cast<std::size_t>(net.size()), kUnassigned);
    for (const auto& [var, val] : evidence) full[static_cast<std::size_t>(var)] = val;

    std::vector<int> idx(free_scope.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t i = 0; i < free_scope.size(); ++i) {
            full[static_cast<std::size_t>(free_scope[i])] = idx[i];
        }
        f.values[flat] = net.local_probability(v, full[static_cast<std::size_t>(v)], full);
        for (std::size_t i = free_scope.size(); i-- > 0;) {
            if (++idx[i] < f.cards[i]) break;
            idx[i] = 0;
        }
    }
    return f;
}

// Min-degree order over the moralized evidence-pruned graph; ties broken by
// declaration order (smaller index first). Lazy heap: stale entries are
// skipped, so each step pops the currently smallest (degree, index) pair.
std::vector<VarIndex> elimination_order(const std::vector<Factor>& factors,
                                        const std::vector<bool>& hidden, int n) {
    std::vector<std::set<VarIndex>> adj(static_cast<std::size_t>(n));
    for (const Factor& f : factors) {
        for (VarIndex a : f.vars) {
            for (VarIndex b : f.vars) {
                if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
            }
        }
    }

    // Degree counts only edges to still-pending (hidden, uneliminated) vars.
    std::vector<bool> pending = hidden;
    std::vector<std::size_t> degree(static_cast<std::size_t>(n), 0);
    using Entry = std::pair<std::size_t, VarIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int v = 0; v < n; ++v) {
        if (!pending[static_cast<std::size_t>(v)]) continue;
        std::size_t d = 0;
        for (VarIndex u : adj[static_cast<std::size_t>(v)]) {
            if (pending[static_cast<std::size_t>(u)]) ++d;
        }
        degree[static_cast<std::size_t>(v)] = d;
        heap.emplace(d, v);
    }

    std::vector<VarIndex> order;
    while (!heap.empty()) {
        auto [d, best] = heap.top();
        heap.pop();
        const auto bi = static_cast<std::size_t>(best);
        if (!pending[bi] || d != degree[bi]) continue;  // stale
        order.push_back(best);
        pending[bi] = false;

        std::vector<VarIndex> nbrs;
        for (VarIndex u : adj[bi]) {
            if (pending[static_cast<std::size_t>(u)]) nbrs.push_back(u);
        }
        // Fill in between the survivors, then refresh their degrees.
        for (VarIndex a : nbrs) {
            auto& row = adj[static_cast<std::size_t>(a)];
            for (VarIndex b : nbrs) {
                if (a != b) row.insert(b);
            }
        }
        for (VarIndex a : nbrs) {
            const auto ai = static_cast<std::size_t>(a);
            std::size_t refreshed = 0;
            for (VarIndex u : adj[ai]) {
                if (pending[static_cast<std::size_t>(u)]) ++refreshed;
            }
            degree[ai] = refreshed;
            heap.emplace(refreshed, a);
        }
    }
    return order;
}

}  // namespace

std::vector<double> posterior_distribution(const BayesianNetwork& net, VarIndex target,
                                           const Evidence& evidence) {
    check_query_shape(net, target, evidence);

    const std::vector<bool> relevant = relevant_set(net, target, evidence);
    std::vector<Factor> factors;
    std::vector<bool> hidden(static_cast<std::size_t>(net.size()), false);
    for (int v = 0; v < net.size(); ++v) {
        if (!relevant[static_cast<std::size_t>(v)]) continue;
        factors.push_back(cpt_factor(net, v, evidence));
        if (v != target && !evidence.count(v)) hidden[static_cast<std::size_t>(v)] = true;
    }

    // Bucket factors by the variables in their scope so each elimination
    // touches only its own factors instead of rescanning the whole pool.
    std::vector<bool> alive(factors.size(), true);
    std::vector<std::vector<std::size_t>> by_var(static_cast<std::size_t>(net.size()));
    auto register_factor = [&](std::size_t id) {
        for (VarIndex v : factors[id].vars) {
            by_var[static_cast<std::size_t>(v)].push_back(id);
        }
    };
    for (std::size_t id = 0; id < factors.size(); ++id) register_factor(id);

    for (VarIndex v : elimination_order(factors, hidden, net.size())) {
        Factor product = Factor::scalar(1.0);
        for (std::size_t id : by_var[static_cast<std::size_t>(v)]) {
            if (!alive[id]) continue;
            product = multiply(product, factors[id]);
            alive[id] = false;
        }
        factors.push_back(sum_out(product, v));
        alive.push_back(true);
        register_factor(factors.size() - 1);
    }

    Factor result = Factor::scalar(1.0);
    for (std::size_t id = 0; id < factors.size(); ++id) {
        if (alive[id]) result = multiply(result, factors[id]);
    }

    // All hidden variables are gone; the remaining scope is exactly {target}.
    if (result.vars.size() != 1 || result.vars[0] != target) {
        throw std::logic_error("variable elimination left an unexpected scope");
    }
    std::vector<double> dist = result.values;

    const double z = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (z < kEvidenceFloor) {
        throw ImpossibleEvidenceError("conditioning on impossible evidence: " +
                                      render_evidence(net, evidence));
    }
    for (double& p : dist) p /= z;
    return dist;
}

double query(const BayesianNetwork& net, const Query& q) {
    std::vector<double> dist = posterior_distribution(net, q.target, q.evidence);
    if (q.value < 0 || static_cast<std::size_t>(q.value) >= dist.size()) {
        throw LookupError("query: value index out of range for '" + net.var_name(q.target) + "'");
    }
    return dist[static_cast<std::size_t>(q.value)];
}

}  // namespace obsdet
