#include "obsdet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "obsdet/inference.hpp"
#include "obsdet/rng.hpp"

namespace obsdet {

ScoreOutcome score_scenarios(const BayesianNetwork& net,
                             const std::vector<LabeledScenario>& scenarios) {
    ScoreOutcome out;
    for (const LabeledScenario& sc : scenarios) {
        try {
            double p = query(net, Query{sc.new_obs.var, sc.new_obs.value,
                                        to_evidence(sc.prior_obs)});
            out.scored.push_back({sc.id, p});
            out.labels.push_back(sc.label);
        } catch (const ImpossibleEvidenceError& e) {
            out.excluded.push_back(sc.id + ": " + e.what());
        }
    }
    return out;
}

std::vector<ThresholdPoint> sweep_thresholds(const std::vector<ScoredScenario>& scored,
                                             const std::vector<int>& labels,
                                             const std::vector<double>& grid) {
    if (scored.size() != labels.size()) {
        throw std::invalid_argument("sweep_thresholds: scores and labels must align");
    }
    if (grid.empty()) throw std::invalid_argument("sweep_thresholds: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
            throw std::invalid_argument("sweep_thresholds: grid values must lie in (0, 1)");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("sweep_thresholds: grid must be strictly increasing");
        }
    }

    long positives = 0, negatives = 0;
    for (int label : labels) (label == 1 ? positives : negatives)++;
    if (positives == 0 || negatives == 0) {
        throw SingleClassError("both contradictory and non-contradictory scenarios are "
                               "required to sweep thresholds");
    }

    std::vector<ThresholdPoint> points;
    points.reserve(grid.size());
    for (double eps : grid) {
        ThresholdPoint pt;
        pt.eps = eps;
        for (std::size_t i = 0; i < scored.size(); ++i) {
            const bool predicted = scored[i].p <= eps;
            if (labels[i] == 1) {
                (predicted ? pt.tp : pt.fn)++;
            } else {
                (predicted ? pt.fp : pt.tn)++;
            }
        }
        pt.tp_rate = static_cast<double>(pt.tp) / static_cast<double>(positives);
        pt.fn_rate = static_cast<double>(pt.fn) / static_cast<double>(positives);
        pt.fp_rate = static_cast<double>(pt.fp) / static_cast<double>(negatives);
        pt.tn_rate = static_cast<double>(pt.tn) / static_cast<double>(negatives);
        pt.youden_j = pt.tp_rate - pt.fp_rate;
        points.push_back(pt);
    }
    return points;
}

double optimal_threshold(const std::vector<ThresholdPoint>& points) {
    if (points.empty()) throw std::invalid_argument("optimal_threshold: no points");
    const ThresholdPoint* best = &points.front();
    for (const ThresholdPoint& pt : points) {
        const double gap = std::abs(pt.fp_rate - pt.fn_rate);
        const double best_gap = std::abs(best->fp_rate - best->fn_rate);
        if (gap < best_gap) {
            best = &pt;
        } else if (gap == best_gap) {
            const double sum = pt.fp_rate + pt.fn_rate;
            const double best_sum = best->fp_rate + best->fn_rate;
            if (sum < best_sum || (sum == best_sum && pt.eps < best->eps)) best = &pt;
        }
    }
    return best->eps;
}

std::string roc_csv(std::vector<ThresholdPoint> points) {
    std::sort(points.begin(), points.end(),
              [](const ThresholdPoint& a, const ThresholdPoint& b) { return a.eps < b.eps; });
    std::string out = "eps,fp_rate,tp_rate\n";
    char line[96];
    for (const ThresholdPoint& pt : points) {
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", pt.eps, pt.fp_rate, pt.tp_rate);
        out += line;
    }
    return out;
}

std::vector<double> default_grid() {
    std::vector<double> grid;
    for (int e = -11; e <= -1; ++e) grid.push_back(std::pow(10.0, e));
    grid.push_back(0.5);
    return grid;
}

std::pair<std::vector<LabeledScenario>, std::vector<LabeledScenario>> split_scenarios(
    const std::vector<LabeledScenario>& scenarios, std::uint64_t seed, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split_scenarios: fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(scenarios.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    const auto cut = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(scenarios.size())));
    std::pair<std::vector<LabeledScenario>, std::vector<LabeledScenario>> parts;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < cut ? parts.first : parts.second).push_back(scenarios[order[i]]);
    }
    return parts;
}

HoldoutEvaluation evaluate_at(const std::vector<ScoredScenario>& scored,
                              const std::vector<int>& labels, double eps) {
    if (scored.size() != labels.size()) {
        throw std::invalid_argument("evaluate_at: scores and labels must align");
    }
    HoldoutEvaluation eval;
    eval.total = static_cast<long>(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const int predicted = scored[i].p <= eps ? 1 : 0;
        if (predicted == labels[i]) ++eval.correct;
    }
    eval.accuracy = eval.total > 0
                        ? static_cast<double>(eval.correct) / static_cast<double>(eval.total)
                        : 0.0;
    return eval;
}

CalibrationRun run_calibration(const BayesianNetwork& net,
                               const std::vector<LabeledScenario>& scenarios,
                               const std::vector<double>& grid, std::uint64_t split_seed,
                               double train_fraction) {
    auto [train, holdout] = split_scenarios(scenarios, split_seed, train_fraction);

    CalibrationRun run;
    run.train_count = train.size();
    run.holdout_count = holdout.size();

    ScoreOutcome train_scores = score_scenarios(net, train);
    run.report.points = sweep_thresholds(train_scores.scored, train_scores.labels, grid);
    run.report.selected_eps = optimal_threshold(run.report.points);
    run.report.selection_rule = "equal-error-rate";
    run.report.excluded_count = train_scores.excluded.size();

    ScoreOutcome holdout_scores = score_scenarios(net, holdout);
    run.report.excluded_count += holdout_scores.excluded.size();
    run.holdout = evaluate_at(holdout_scores.scored, holdout_scores.labels,
                              run.report.selected_eps);
    return run;
}

}  // namespace obsdet
