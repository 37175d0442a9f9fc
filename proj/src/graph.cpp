#include "obsdet/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace obsdet {

VarMask make_mask(const BayesianNetwork& net, const std::vector<VarIndex>& vars) {
    VarMask mask(static_cast<std::size_t>(net.size()), false);
    for (VarIndex v : vars) mask.at(static_cast<std::size_t>(v)) = true;
    return mask;
}

VarMask mask_of_observations(const BayesianNetwork& net, const ObservationSet& obs) {
    VarMask mask(static_cast<std::size_t>(net.size()), false);
    for (const Observation& o : obs) mask.at(static_cast<std::size_t>(o.var)) = true;
    return mask;
}

std::vector<VarIndex> spouses(const BayesianNetwork& net, VarIndex x) {
    std::vector<VarIndex> out;
    for (VarIndex child : net.children(x)) {
        for (VarIndex p : net.parents(child)) {
            if (p != x) out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<VarIndex> markov_blanket(const BayesianNetwork& net, VarIndex x) {
    if (x < 0 || x >= net.size()) throw LookupError("markov_blanket: variable index out of range");
    std::vector<VarIndex> out = net.parents(x);
    const auto& ch = net.children(x);
    out.insert(out.end(), ch.begin(), ch.end());
    auto sp = spouses(net, x);
    out.insert(out.end(), sp.begin(), sp.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), x), out.end());
    return out;
}

namespace {

bool edge_exists(const BayesianNetwork& net, VarIndex from, VarIndex to) {
    const auto& ch = net.children(from);
    return std::binary_search(ch.begin(), ch.end(), to);
}

}  // namespace

bool triple_active(const BayesianNetwork& net, const PathTriple& t, const VarMask& observed) {
    auto require_edge = [&](VarIndex a, VarIndex b) {
        if (!edge_exists(net, a, b)) {
            throw std::invalid_argument("triple_active: edge " + net.var_name(a) + " -> " +
                                        net.var_name(b) + " does not exist");
        }
    };
    switch (t.kind) {
        case TripleKind::ChainForward:
            require_edge(t.left, t.mid);
            require_edge(t.mid, t.right);
            break;
        case TripleKind::ChainBackward:
            require_edge(t.right, t.mid);
            require_edge(t.mid, t.left);
            break;
        case TripleKind::Fork:
            require_edge(t.mid, t.left);
            require_edge(t.mid, t.right);
            break;
        case TripleKind::Collider:
            require_edge(t.left, t.mid);
            require_edge(t.right, t.mid);
            break;
    }

    const auto mid = static_cast<std::size_t>(t.mid);
    if (t.kind != TripleKind::Collider) return !observed[mid];
    if (observed[mid]) return true;
    const std::vector<bool>& desc = net.descendants(t.mid);
    for (std::size_t v = 0; v < desc.size(); ++v) {
        if (desc[v] && observed[v]) return true;
    }
    return false;
}

std::vector<bool> active_from(const BayesianNetwork& net, VarIndex source,
                              const VarMask& observed) {
    const auto n = static_cast<std::size_t>(net.size());
    if (source < 0 || source >= net.size()) {
        throw LookupError("active_from: variable index out of range");
    }
    if (observed.size() != n) throw std::invalid_argument("active_from: mask size mismatch");

    // anc_obs marks nodes that are observed or have an observed descendant;
    // these are the nodes that let dependence pass through a collider.
    std::vector<bool> anc_obs(n, false);
    {
        std::deque<VarIndex> queue;
        for (std::size_t v = 0; v < n; ++v) {
            if (observed[v]) {
                anc_obs[v] = true;
                queue.push_back(static_cast<VarIndex>(v));
            }
        }
        while (!queue.empty()) {
            VarIndex v = queue.front();
            queue.pop_front();
            for (VarIndex p : net.parents(v)) {
                if (!anc_obs[static_cast<std::size_t>(p)]) {
                    anc_obs[static_cast<std::size_t>(p)] = true;
                    queue.push_back(p);
                }
            }
        }
    }

    // State (node, direction): Up = arrived from a child, Down = from a
    // parent. Interior-triple checks happen at each arrival, so observed
    // endpoints are marked touched before their expansion is blocked.
    enum Dir { Up = 0, Down = 1 };
    std::vector<bool> visited(2 * n, false);
    std::vector<bool> touched(n, false);
    std::deque<std::pair<VarIndex, Dir>> queue;

    touched[static_cast<std::size_t>(source)] = true;
    for (VarIndex p : net.parents(source)) queue.emplace_back(p, Up);
    for (VarIndex c : net.children(source)) queue.emplace_back(c, Down);

    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        const auto vi = static_cast<std::size_t>(v);
        if (visited[2 * vi + static_cast<std::size_t>(dir)]) continue;
        visited[2 * vi + static_cast<std::size_t>(dir)] = true;
        touched[vi] = true;

        if (dir == Up) {
            if (!observed[vi]) {
                for (VarIndex p : net.parents(v)) queue.emplace_back(p, Up);
                for (VarIndex c : net.children(v)) queue.emplace_back(c, Down);
            }
        } else {
            if (!observed[vi]) {
                for (VarIndex c : net.children(v)) queue.emplace_back(c, Down);
            }
            if (anc_obs[vi]) {
                for (VarIndex p : net.parents(v)) queue.emplace_back(p, Up);
            }
        }
    }
    return touched;
}

bool has_active_path(const BayesianNetwork& net, VarIndex x, VarIndex y, const VarMask& observed) {
    if (x == y) throw std::invalid_argument("has_active_path: endpoints must differ");
    return active_from(net, x, observed)[static_cast<std::size_t>(y)];
}

ObservationSet prune(const BayesianNetwork& net, const ObservationSet& obs_prime,
                     VarIndex o_new_var) {
    VarMask observed = mask_of_observations(net, obs_prime);
    if (observed.at(static_cast<std::size_t>(o_new_var))) {
        throw std::invalid_argument("prune: '" + net.var_name(o_new_var) +
                                    "' is still present in the prior observation set");
    }
    std::vector<bool> touched = active_from(net, o_new_var, observed);
    ObservationSet kept;
    for (const Observation& o : obs_prime) {
        if (touched[static_cast<std::size_t>(o.var)]) kept.push_back(o);
    }
    return kept;
}

}  // namespace obsdet
