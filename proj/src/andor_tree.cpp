#include "obsdet/andor_tree.hpp"

#include <algorithm>
#include <set>

namespace obsdet {

bool operator==(const AndOrTree& a, const AndOrTree& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == AndOrTree::Kind::Leaf) return a.observation == b.observation;
    return a.children == b.children;
}

namespace {

AndOrTree simplify_node(AndOrTree node, bool is_root) {
    using Kind = AndOrTree::Kind;
    if (node.kind == Kind::Leaf || node.kind == Kind::True) return node;

    std::vector<AndOrTree> kept;
    for (AndOrTree& child : node.children) {
        AndOrTree s = simplify_node(std::move(child), false);
        if (node.kind == Kind::And && s.kind == Kind::True) continue;
        if (s.kind == node.kind) {  // flatten same-kind nesting
            for (AndOrTree& grand : s.children) kept.push_back(std::move(grand));
        } else {
            kept.push_back(std::move(s));
        }
    }

    // Duplicate leaves under one parent are a plain duplication; merge them.
    std::vector<AndOrTree> deduped;
    std::set<std::pair<VarIndex, ValueIndex>> seen;
    for (AndOrTree& child : kept) {
        if (child.kind == Kind::Leaf &&
            !seen.insert({child.observation.var, child.observation.value}).second) {
            continue;
        }
        deduped.push_back(std::move(child));
    }
    node.children = std::move(deduped);

    if (node.children.empty()) return AndOrTree::make_true();
    if (node.children.size() == 1 && !is_root) return std::move(node.children[0]);
    if (is_root && node.children.size() == 1 && node.children[0].kind == Kind::True) {
        return AndOrTree::make_true();
    }
    return node;
}

void collect_repair_sets(const AndOrTree& node, std::vector<ObservationSet>& acc) {
    using Kind = AndOrTree::Kind;
    switch (node.kind) {
        case Kind::True:
            acc.push_back({});
            return;
        case Kind::Leaf:
            acc.push_back({node.observation});
            return;
        case Kind::Or: {
            for (const AndOrTree& child : node.children) {
                std::vector<ObservationSet> sub;
                collect_repair_sets(child, sub);
                acc.insert(acc.end(), sub.begin(), sub.end());
            }
            return;
        }
        case Kind::And: {
            std::vector<ObservationSet> product{{}};
            for (const AndOrTree& child : node.children) {
                std::vector<ObservationSet> sub;
                collect_repair_sets(child, sub);
                std::vector<ObservationSet> next;
                next.reserve(product.size() * sub.size());
                for (const ObservationSet& left : product) {
                    for (const ObservationSet& right : sub) {
                        ObservationSet merged = left;
                        merged.insert(merged.end(), right.begin(), right.end());
                        next.push_back(std::move(merged));
                    }
                }
                product = std::move(next);
            }
            acc.insert(acc.end(), product.begin(), product.end());
            return;
        }
    }
}

}  // namespace

AndOrTree simplify(AndOrTree tree) { return simplify_node(std::move(tree), true); }

std::vector<ObservationSet> repair_sets(const AndOrTree& tree) {
    std::vector<ObservationSet> sets;
    collect_repair_sets(tree, sets);
    for (ObservationSet& s : sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    auto order = [](const ObservationSet& a, const ObservationSet& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    };
    std::sort(sets.begin(), sets.end(), order);
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return sets;
}

namespace {

std::string render_node(const BayesianNetwork& net, const AndOrTree& node) {
    using Kind = AndOrTree::Kind;
    switch (node.kind) {
        case Kind::True:
            return "true";
        case Kind::Leaf:
            return net.var_name(node.observation.var) + "=" +
                   net.value_label(node.observation.var, node.observation.value);
        case Kind::Or: {
            std::string out;
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i) out += " or ";
                out += render_node(net, node.children[i]);
            }
            return out;
        }
        case Kind::And: {
            std::string out;
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i) out += " and ";
                out += "(" + render_node(net, node.children[i]) + ")";
            }
            return out;
        }
    }
    return {};
}

}  // namespace

std::string render_formula(const BayesianNetwork& net, const AndOrTree& tree) {
    return render_node(net, tree);
}

}  // namespace obsdet
