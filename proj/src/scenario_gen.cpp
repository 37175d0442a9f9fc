#include "obsdet/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "obsdet/inference.hpp"

namespace obsdet {

void GenerationConfig::validate(const BayesianNetwork& net) const {
    if (!(p_low > 0.0 && p_low < p_high && p_high <= 1.0)) {
        throw std::invalid_argument("generation requires 0 < p_low < p_high <= 1");
    }
    if (count_per_class < 1) throw std::invalid_argument("count_per_class must be >= 1");
    if (obs_count_min < 0 || obs_count_max < obs_count_min) {
        throw std::invalid_argument("observation count range is empty");
    }
    if (obs_count_max > net.size() - 1) {
        throw std::invalid_argument("observation count range must leave one variable "
                                    "for the new observation");
    }
    if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
        throw std::invalid_argument("noise_fraction must lie in [0, 1]");
    }
    if (max_retries < 1) throw std::invalid_argument("max_retries must be >= 1");
}

Assignment forward_sample(const BayesianNetwork& net, Rng& rng) {
    // Topological order: parents precede children (valid networks only).
    std::vector<VarIndex> order;
    std::vector<int> indegree(static_cast<std::size_t>(net.size()), 0);
    for (const auto& e : net.edges()) ++indegree[static_cast<std::size_t>(e.second)];
    for (int v = 0; v < net.size(); ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) order.push_back(v);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (VarIndex c : net.children(order[head])) {
            if (--indegree[static_cast<std::size_t>(c)] == 0) order.push_back(c);
        }
    }
    if (order.size() != static_cast<std::size_t>(net.size())) {
        throw std::invalid_argument("forward_sample: network is cyclic");
    }

    Assignment full(static_cast<std::size_t>(net.size()), kUnassigned);
    for (VarIndex v : order) {
        const auto& row = net.cpt(v).rows.at(net.cpt_row_index(v, full));
        full[static_cast<std::size_t>(v)] =
            static_cast<ValueIndex>(rng.pick_weighted(row));
    }
    return full;
}

namespace {

struct Draft {
    ObservationSet prior;
    VarIndex new_var;
    ValueIndex sampled_value;
};

// Shared mechanics: sample the joint, pick a prior subset and a leftover
// variable for the new observation.
Draft draw_draft(const BayesianNetwork& net, const GenerationConfig& cfg, Rng& rng) {
    Assignment full = forward_sample(net, rng);
    std::vector<VarIndex> perm(static_cast<std::size_t>(net.size()));
    for (int v = 0; v < net.size(); ++v) perm[static_cast<std::size_t>(v)] = v;
    rng.shuffle(perm);

    const int k = rng.int_in(cfg.obs_count_min, cfg.obs_count_max);
    Draft draft;
    for (int i = 0; i < k; ++i) {
        VarIndex v = perm[static_cast<std::size_t>(i)];
        draft.prior.push_back({v, full[static_cast<std::size_t>(v)], std::nullopt});
    }
    std::sort(draft.prior.begin(), draft.prior.end());
    draft.new_var = perm[static_cast<std::size_t>(k)];
    draft.sampled_value = full[static_cast<std::size_t>(draft.new_var)];
    return draft;
}

}  // namespace

LabeledScenario generate_consistent(const BayesianNetwork& net, const GenerationConfig& cfg,
                                    Rng& rng) {
    cfg.validate(net);
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        Draft draft = draw_draft(net, cfg, rng);
        double p = query(net, Query{draft.new_var, draft.sampled_value,
                                    to_evidence(draft.prior)});
        if (p >= cfg.p_high) {
            return LabeledScenario{"", 0, {draft.new_var, draft.sampled_value, std::nullopt},
                                   std::move(draft.prior)};
        }
    }
    throw RetryExhaustedError("no consistent scenario found within the retry budget; "
                              "consider a smaller p_high");
}

LabeledScenario generate_contradictory(const BayesianNetwork& net, const GenerationConfig& cfg,
                                       Rng& rng) {
    cfg.validate(net);
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        Draft draft = draw_draft(net, cfg, rng);
        std::vector<double> posterior =
            posterior_distribution(net, draft.new_var, to_evidence(draft.prior));
        std::vector<ValueIndex> candidates;
        for (ValueIndex v = 0; v < net.domain_size(draft.new_var); ++v) {
            if (posterior[static_cast<std::size_t>(v)] <= cfg.p_low) candidates.push_back(v);
        }
        if (candidates.empty()) continue;
        ValueIndex chosen = candidates[rng.below(candidates.size())];
        return LabeledScenario{"", 1, {draft.new_var, chosen, std::nullopt},
                               std::move(draft.prior)};
    }
    throw RetryExhaustedError("no contradictory scenario found within the retry budget; "
                              "consider a larger p_low");
}

std::vector<LabeledScenario> generate_dataset(const BayesianNetwork& net,
                                              const GenerationConfig& cfg) {
    cfg.validate(net);
    Rng rng(cfg.seed);
    std::vector<LabeledScenario> out;
    out.reserve(2 * static_cast<std::size_t>(cfg.count_per_class));

    char id[32];
    for (int i = 0; i < cfg.count_per_class; ++i) {
        LabeledScenario sc = generate_consistent(net, cfg, rng);
        std::snprintf(id, sizeof(id), "n-%04d", i);
        sc.id = id;
        out.push_back(std::move(sc));
    }
    for (int i = 0; i < cfg.count_per_class; ++i) {
        LabeledScenario sc = generate_contradictory(net, cfg, rng);
        std::snprintf(id, sizeof(id), "c-%04d", i);
        sc.id = id;
        out.push_back(std::move(sc));
    }

    const auto flips = static_cast<std::size_t>(
        std::lround(cfg.noise_fraction * static_cast<double>(out.size())));
    if (flips > 0) {
        std::vector<std::size_t> order(out.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        for (std::size_t i = 0; i < flips; ++i) {
            out[order[i]].label = 1 - out[order[i]].label;
        }
    }
    return out;
}

}  // namespace obsdet
