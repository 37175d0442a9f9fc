#pragma once

#include <cstdint>
#include <vector>

#include "obsdet/calibration.hpp"
#include "obsdet/network.hpp"
#include "obsdet/rng.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// Controls for the synthetic scenario generator. Labels are planted by
/// probability cutoffs: consistent scenarios have P(new | prior) >= p_high,
/// contradictory ones <= p_low, so any threshold in between separates a
/// noise-free set perfectly.
struct GenerationConfig {
    std::uint64_t seed = 0;
    int count_per_class = 200;
    int obs_count_min = 2;
    int obs_count_max = 6;
    double p_low = 1e-3;
    double p_high = 5e-2;
    double noise_fraction = 0.05;  // fraction of scenarios relabeled at random
    int max_retries = 1000;        // per scenario

    /// Throws std::invalid_argument on inconsistent settings.
    void validate(const BayesianNetwork& net) const;
};

/// One full assignment drawn from the joint, in topological order.
Assignment forward_sample(const BayesianNetwork& net, Rng& rng);

/// Label-0 scenario: sampled prior observations plus a sampled new
/// observation accepted only when P(new | prior) >= p_high. Throws
/// RetryExhaustedError when the budget runs out.
LabeledScenario generate_consistent(const BayesianNetwork& net, const GenerationConfig& cfg,
                                    Rng& rng);

/// Label-1 scenario: as generate_consistent, but the new observation's value
/// is replaced by one with P(new | prior) <= p_low; resamples when no such
/// value exists.
LabeledScenario generate_contradictory(const BayesianNetwork& net, const GenerationConfig& cfg,
                                       Rng& rng);

/// Balanced dataset: count_per_class of each label, ids "n-…" and "c-…",
/// then noise_fraction of the lines relabeled at random. Deterministic for a
/// fixed (net, cfg).
std::vector<LabeledScenario> generate_dataset(const BayesianNetwork& net,
                                              const GenerationConfig& cfg);

}  // namespace obsdet
