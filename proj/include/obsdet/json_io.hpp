#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "obsdet/andor_tree.hpp"
#include "obsdet/calibration.hpp"
#include "obsdet/network.hpp"

namespace obsdet {

/// Result of reading a network document. `net` is absent when references
/// (edge endpoints, CPT parents, CPT keys) do not resolve; those problems
/// are listed in `violations` rather than thrown, so a validation report can
/// still be produced. Structural problems (wrong JSON types, missing keys,
/// non-finite numbers) throw ParseError.
struct LoadedNetwork {
    std::optional<BayesianNetwork> net;
    std::vector<Violation> violations;
};

LoadedNetwork network_from_json(const nlohmann::json& doc);

nlohmann::json network_to_json(const BayesianNetwork& net);

/// Reads and parses a network file; throws ParseError when the file is
/// unreadable, not JSON, or has unresolvable references.
BayesianNetwork load_network(const std::filesystem::path& path);

/// As load_network but surfaces the violation list instead of throwing on
/// reference problems.
LoadedNetwork load_network_report(const std::filesystem::path& path);

nlohmann::json tree_to_json(const BayesianNetwork& net, const AndOrTree& tree);

nlohmann::json observation_to_json(const BayesianNetwork& net, const Observation& obs);
nlohmann::json observation_set_to_json(const BayesianNetwork& net, const ObservationSet& obs);

/// One scenario per line:
/// {"id": …, "label": 0|1, "new": {"var", "value"}, "obs": [{"var", "value", "t"?}]}
std::vector<LabeledScenario> scenarios_from_jsonl(std::istream& in, const BayesianNetwork& net);
std::string scenario_to_jsonl_line(const BayesianNetwork& net, const LabeledScenario& sc);

nlohmann::json report_to_json(const CalibrationReport& report);

/// Parses a JSON document from a file; throws ParseError with the path in
/// the message on failure.
nlohmann::json parse_json_file(const std::filesystem::path& path);

}  // namespace obsdet
