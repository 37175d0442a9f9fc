#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "obsdet/network.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// One calibration example: a new observation against prior observations,
/// labeled 1 (contradictory) or 0 (consistent).
struct LabeledScenario {
    std::string id;
    int label = 0;
    Observation new_obs;
    ObservationSet prior_obs;
};

struct ScoredScenario {
    std::string id;
    double p = 1.0;  // P(new observation | prior observations)
};

/// Confusion counts and rates at one threshold. Positive class is
/// "contradictory"; prediction is p <= eps, inclusive.
struct ThresholdPoint {
    double eps = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
    double tp_rate = 0.0, fp_rate = 0.0, tn_rate = 0.0, fn_rate = 0.0;
    double youden_j = 0.0;  // tp_rate - fp_rate, reported for comparison only
};

struct CalibrationReport {
    std::vector<ThresholdPoint> points;
    double selected_eps = 0.0;
    std::string selection_rule;  // "equal-error-rate"
    std::size_t excluded_count = 0;
};

struct ScoreOutcome {
    std::vector<ScoredScenario> scored;
    std::vector<int> labels;            // aligned with scored
    std::vector<std::string> excluded;  // "id: reason" per skipped scenario
};

/// Scores every scenario against the network. Scenarios whose prior
/// observations are impossible are excluded and reported, not fatal.
ScoreOutcome score_scenarios(const BayesianNetwork& net,
                             const std::vector<LabeledScenario>& scenarios);

/// FP/FN/TP/TN rates at each grid threshold. The grid must be nonempty,
/// strictly increasing and inside (0, 1); both labels must occur.
std::vector<ThresholdPoint> sweep_thresholds(const std::vector<ScoredScenario>& scored,
                                             const std::vector<int>& labels,
                                             const std::vector<double>& grid);

/// Equal-error-rate pick: smallest |fp_rate - fn_rate|, ties broken by
/// smaller fp_rate + fn_rate, then by smaller eps.
double optimal_threshold(const std::vector<ThresholdPoint>& points);

/// "eps,fp_rate,tp_rate" rows sorted by eps, with a header line.
std::string roc_csv(std::vector<ThresholdPoint> points);

/// Twelve thresholds: 1e-11 .. 1e-1 by decades, then 0.5.
std::vector<double> default_grid();

/// Deterministic seeded split; the first part holds round(fraction * n)
/// scenarios.
std::pair<std::vector<LabeledScenario>, std::vector<LabeledScenario>> split_scenarios(
    const std::vector<LabeledScenario>& scenarios, std::uint64_t seed, double train_fraction);

struct HoldoutEvaluation {
    long correct = 0;
    long total = 0;
    double accuracy = 0.0;
};

HoldoutEvaluation evaluate_at(const std::vector<ScoredScenario>& scored,
                              const std::vector<int>& labels, double eps);

struct CalibrationRun {
    CalibrationReport report;
    HoldoutEvaluation holdout;
    std::size_t train_count = 0;
    std::size_t holdout_count = 0;
};

/// End-to-end: split, score the training part, sweep, select, then evaluate
/// the selected threshold on the held-out part.
CalibrationRun run_calibration(const BayesianNetwork& net,
                               const std::vector<LabeledScenario>& scenarios,
                               const std::vector<double>& grid, std::uint64_t split_seed,
                               double train_fraction = 0.6);

}  // namespace obsdet
