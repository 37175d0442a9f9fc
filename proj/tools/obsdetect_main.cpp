// obsdetect — command-line front end: network validation, inference,
// contradiction detection, threshold calibration, scenario generation and
// the per-subject observation store. Machine-readable JSON goes to stdout,
// human logs to stderr.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "obsdet/calibration.hpp"
#include "obsdet/detection.hpp"
#include "obsdet/errors.hpp"
#include "obsdet/inference.hpp"
#include "obsdet/json_io.hpp"
#include "obsdet/scenario_gen.hpp"
#include "obsdet/store.hpp"
#include "obsdet/timeutil.hpp"

namespace {

using nlohmann::json;
using namespace obsdet;

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

int fail(int code, const std::string& error_code, const std::string& message) {
    emit(json{{"error", {{"code", error_code}, {"message", message}}}});
    std::cerr << "error: " << message << "\n";
    return code;
}

// k=v command-line pair against the network's declared names.
Observation parse_pair(const BayesianNetwork& net, const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw ParseError("expected var=value, got '" + text + "'");
    }
    Observation obs;
    obs.var = net.var_index(text.substr(0, eq));
    obs.value = net.value_index(obs.var, text.substr(eq + 1));
    return obs;
}

ObservationSet parse_obs_args(const BayesianNetwork& net, const std::vector<std::string>& pairs) {
    ObservationSet out;
    for (const std::string& p : pairs) out.push_back(parse_pair(net, p));
    return out;
}

ObservationSet parse_obs_file(const BayesianNetwork& net, const std::string& path) {
    json doc = parse_json_file(path);
    const json* items = &doc;
    if (doc.is_object() && doc.contains("obs")) items = &doc["obs"];
    if (!items->is_array()) {
        throw ParseError("'" + path + "': expected an array of observations or {\"obs\": [...]}");
    }
    ObservationSet out;
    for (const json& node : *items) {
        Observation obs;
        obs.var = net.var_index(node.at("var").get<std::string>());
        obs.value = net.value_index(obs.var, node.at("value").get<std::string>());
        if (node.contains("t")) {
            auto ts = parse_iso8601(node["t"].get<std::string>());
            if (!ts) throw ParseError("'" + path + "': bad timestamp " + node["t"].dump());
            obs.acquired_at = *ts;
        }
        out.push_back(obs);
    }
    return out;
}

double checked_eps(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw ParseError("--eps must lie in [0, 1], got " + std::to_string(eps));
    }
    return eps;
}

json detection_to_json(const BayesianNetwork& net, const DetectionResult& result) {
    json out{{"contradictory", result.contradictory},
             {"probability", result.probability},
             {"tree", tree_to_json(net, result.tree)},
             {"formula", render_formula(net, result.tree)},
             {"diagnostics", result.diagnostics}};
    json sets = json::array();
    if (result.contradictory) {
        for (const ObservationSet& rs : repair_sets(result.tree)) {
            sets.push_back(observation_set_to_json(net, rs));
        }
    }
    out["repair_sets"] = std::move(sets);
    return out;
}

json recommendation_to_json(const BayesianNetwork& net, const Recommendation& rec) {
    json groups = json::array();
    for (const ObservationSet& group : rec.choose_one_groups) {
        groups.push_back(observation_set_to_json(net, group));
    }
    json suggestions = json::object();
    for (const auto& [var, s] : rec.suggested_values) {
        suggestions[net.var_name(var)] = {{"value", net.value_label(var, s.value)},
                                          {"posterior", s.posterior}};
    }
    return json{{"must_update", observation_set_to_json(net, rec.must_update)},
                {"choose_one_groups", std::move(groups)},
                {"suggested_values", std::move(suggestions)},
                {"confidence", rec.confidence}};
}

json row_to_json(const SubjectRow& row) {
    json obs = json::object();
    for (const auto& [var, o] : row.observations) {
        json body{{"value", o.value}, {"acquired_at", format_iso8601(o.acquired_at)}};
        if (o.clock_defaulted) body["clock_defaulted"] = true;
        obs[var] = std::move(body);
    }
    json out{{"observations", std::move(obs)}};
    if (row.pending) {
        out["pending"] = {{"variable", row.pending->variable},
                          {"value", row.pending->value},
                          {"acquired_at", format_iso8601(row.pending->acquired_at)},
                          {"eps", row.pending->eps}};
    } else {
        out["pending"] = nullptr;
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& net_path) {
    LoadedNetwork loaded = load_network_report(net_path);
    std::vector<Violation> violations = loaded.violations;
    if (loaded.net) {
        auto more = validate_network(*loaded.net);
        violations.insert(violations.end(), more.begin(), more.end());
    }
    json list = json::array();
    for (const Violation& v : violations) {
        list.push_back({{"code", v.code}, {"message", v.message}});
    }
    emit(json{{"valid", violations.empty()}, {"violations", std::move(list)}});
    return violations.empty() ? 0 : 1;
}

int cmd_infer(const std::string& net_path, const std::string& target, const std::string& value,
              const std::vector<std::string>& evidence_pairs) {
    BayesianNetwork net = load_network(net_path);
    Query q;
    q.target = net.var_index(target);
    q.value = net.value_index(q.target, value);
    q.evidence = to_evidence(parse_obs_args(net, evidence_pairs));
    emit(json{{"p", query(net, q)}});
    return 0;
}

int cmd_detect(const std::string& net_path, const std::string& new_pair, double eps,
               const std::vector<std::string>& obs_pairs, const std::string& obs_file,
               const std::string& format) {
    BayesianNetwork net = load_network(net_path);
    checked_eps(eps);
    ObservationSet obs_prime = parse_obs_args(net, obs_pairs);
    if (!obs_file.empty()) {
        ObservationSet from_file = parse_obs_file(net, obs_file);
        obs_prime.insert(obs_prime.end(), from_file.begin(), from_file.end());
    }
    Observation o_new = parse_pair(net, new_pair);
    for (const Observation& obs : obs_prime) {
        if (obs.var == o_new.var) {
            throw ParseError("'" + net.var_name(o_new.var) +
                             "' appears both as prior observation and as --new");
        }
    }

    DetectionResult result = detect(net, obs_prime, o_new, Epsilon{eps});
    if (format == "text") {
        if (result.contradictory) {
            std::cout << "contradictory (p = " << result.probability << ")\n"
                      << render_formula(net, result.tree) << "\n";
        } else {
            std::cout << "consistent (p = " << result.probability << ")\n";
        }
        for (const std::string& d : result.diagnostics) std::cerr << "note: " << d << "\n";
    } else {
        json out = detection_to_json(net, result);
        out["eps"] = eps;
        emit(out);
    }
    return 0;
}

int cmd_calibrate(const std::string& net_path, const std::string& scenario_path,
                  const std::string& grid_csv, std::uint64_t split_seed,
                  const std::string& report_path, const std::string& roc_path) {
    BayesianNetwork net = load_network(net_path);
    std::ifstream in(scenario_path);
    if (!in) throw ParseError("cannot read '" + scenario_path + "'");
    std::vector<LabeledScenario> scenarios = scenarios_from_jsonl(in, net);
    if (scenarios.empty()) throw ParseError("'" + scenario_path + "' contains no scenarios");

    std::vector<double> grid;
    if (grid_csv.empty()) {
        grid = default_grid();
    } else {
        std::stringstream ss(grid_csv);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    }

    CalibrationRun run = run_calibration(net, scenarios, grid, split_seed);

    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << report_to_json(run.report).dump(2) << "\n";
    }
    if (!roc_path.empty()) {
        std::ofstream out(roc_path);
        out << roc_csv(run.report.points);
    }

    json doc = report_to_json(run.report);
    doc["train_count"] = run.train_count;
    doc["holdout_count"] = run.holdout_count;
    doc["holdout_accuracy"] = run.holdout.accuracy;
    emit(doc);
    std::cerr << "selected eps = " << run.report.selected_eps
              << " (holdout accuracy " << run.holdout.accuracy << ")\n";
    return 0;
}

int cmd_generate(const std::string& net_path, const std::string& out_path,
                 const GenerationConfig& cfg) {
    BayesianNetwork net = load_network(net_path);
    try {
        cfg.validate(net);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());  // bad flag combinations are usage errors
    }
    std::vector<LabeledScenario> scenarios = generate_dataset(net, cfg);

    std::ofstream out(out_path);
    if (!out) throw Error("io-error", "cannot write '" + out_path + "'");
    long contradictory = 0;
    for (const LabeledScenario& sc : scenarios) {
        out << scenario_to_jsonl_line(net, sc) << "\n";
        contradictory += sc.label;
    }
    emit(json{{"out", out_path},
              {"total", scenarios.size()},
              {"contradictory", contradictory},
              {"consistent", static_cast<long>(scenarios.size()) - contradictory},
              {"seed", cfg.seed}});
    return 0;
}

int cmd_ingest(const std::string& store_path, const std::string& net_path,
               const std::string& subject, const std::string& new_pair,
               const std::string& time_text, double eps) {
    BayesianNetwork net = load_network(net_path);
    checked_eps(eps);
    FileLock lock(store_path);
    SubjectStore store = std::filesystem::exists(store_path)
                             ? SubjectStore::load(store_path)
                             : SubjectStore(net.model_version());
    if (!std::filesystem::exists(store_path)) {
        std::cerr << "note: creating new store '" << store_path << "'\n";
    }

    Observation new_obs = parse_pair(net, new_pair);
    if (!time_text.empty()) {
        auto ts = parse_iso8601(time_text);
        if (!ts) throw ParseError("--time must be YYYY-MM-DDTHH:MM:SSZ, got '" + time_text + "'");
        new_obs.acquired_at = *ts;
    }

    IngestOutcome outcome = store.ingest(subject, net, new_obs, Epsilon{eps});
    store.save(store_path);

    json doc{{"subject", subject},
             {"committed", outcome.committed},
             {"detection", detection_to_json(net, outcome.detection)}};
    doc["recommendation"] = outcome.recommendation
                                ? recommendation_to_json(net, *outcome.recommendation)
                                : json(nullptr);
    emit(doc);
    return 0;
}

int cmd_resolve(const std::string& store_path, const std::string& net_path,
                const std::string& subject, long choice) {
    BayesianNetwork net = load_network(net_path);
    FileLock lock(store_path);
    SubjectStore store = SubjectStore::load(store_path);

    std::vector<ObservationSet> candidates = store.pending_repair_sets(subject, net);
    if (choice < 0 || static_cast<std::size_t>(choice) >= candidates.size()) {
        throw RepairSetError("choice " + std::to_string(choice) + " out of range; " +
                             std::to_string(candidates.size()) + " repair sets available");
    }
    const SubjectRow& row =
        store.apply_resolution(subject, net, candidates[static_cast<std::size_t>(choice)]);
    store.save(store_path);

    emit(json{{"subject", subject},
              {"applied", observation_set_to_json(net, candidates[static_cast<std::size_t>(choice)])},
              {"row", row_to_json(row)}});
    return 0;
}

int cmd_show(const std::string& store_path, const std::string& subject) {
    SubjectStore store = SubjectStore::load(store_path);
    json doc = row_to_json(store.row(subject));
    doc["subject"] = subject;
    doc["model_version"] = store.model_version();
    emit(doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Obsolete-observation detection over a fixed Bayesian network"};
    app.require_subcommand(1);

    std::string net_path, store_path, scenario_path, out_path;
    std::string target, value, new_pair, obs_file, time_text;
    std::string grid_csv, report_path, roc_path, format = "json";
    std::string subject;
    std::vector<std::string> evidence_pairs, obs_pairs;
    double eps = 1e-2;  // default operating point; override with --eps
    long choice = -1;
    std::uint64_t split_seed = 0;
    GenerationConfig gen_cfg;

    auto* validate = app.add_subcommand("validate", "Check a network file's invariants");
    validate->add_option("net", net_path, "network JSON file")->required();

    auto* infer = app.add_subcommand("infer", "Conditional probability of one value");
    infer->add_option("net", net_path)->required();
    infer->add_option("--target", target, "query variable")->required();
    infer->add_option("--value", value, "query value label")->required();
    infer->add_option("--evidence", evidence_pairs, "var=value evidence pairs");

    auto* detect_cmd = app.add_subcommand("detect", "Detect obsolete observations");
    detect_cmd->add_option("net", net_path)->required();
    detect_cmd->add_option("--new", new_pair, "new observation, var=value")->required();
    detect_cmd->add_option("--eps", eps, "contradiction threshold in [0,1]");
    detect_cmd->add_option("--obs", obs_pairs, "prior observations, var=value");
    detect_cmd->add_option("--obs-file", obs_file, "prior observations JSON file");
    detect_cmd->add_option("--format", format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));

    auto* calibrate = app.add_subcommand("calibrate", "Select the threshold from scenarios");
    calibrate->add_option("net", net_path)->required();
    calibrate->add_option("scenarios", scenario_path, "labeled scenarios, JSON Lines")->required();
    calibrate->add_option("--grid", grid_csv, "comma-separated thresholds (default: 12 decades)");
    calibrate->add_option("--split-seed", split_seed, "seed for the 60/40 split");
    calibrate->add_option("--report", report_path, "write the report JSON here");
    calibrate->add_option("--roc", roc_path, "write the ROC CSV here");

    auto* generate = app.add_subcommand("generate", "Generate labeled synthetic scenarios");
    generate->add_option("net", net_path)->required();
    generate->add_option("--out", out_path, "output JSONL path")->required();
    generate->add_option("--seed", gen_cfg.seed);
    generate->add_option("--count-per-class", gen_cfg.count_per_class);
    generate->add_option("--obs-min", gen_cfg.obs_count_min);
    generate->add_option("--obs-max", gen_cfg.obs_count_max);
    generate->add_option("--p-low", gen_cfg.p_low, "plant cutoff for contradictory scenarios");
    generate->add_option("--p-high", gen_cfg.p_high, "consistency floor for label-0 scenarios");
    generate->add_option("--noise", gen_cfg.noise_fraction, "fraction relabeled at random");
    generate->add_option("--max-retries", gen_cfg.max_retries);

    auto* ingest = app.add_subcommand("ingest", "Ingest one observation for a subject");
    ingest->add_option("store", store_path, "store JSON file")->required();
    ingest->add_option("net", net_path)->required();
    ingest->add_option("--subject", subject)->required();
    ingest->add_option("--new", new_pair, "var=value")->required();
    ingest->add_option("--time", time_text, "acquisition time, ISO-8601 UTC");
    ingest->add_option("--eps", eps);

    auto* resolve = app.add_subcommand("resolve", "Apply one repair set of the pending detection");
    resolve->add_option("store", store_path)->required();
    resolve->add_option("net", net_path)->required();
    resolve->add_option("--subject", subject)->required();
    resolve->add_option("--choice", choice, "repair set index from ingest output")->required();

    auto* show = app.add_subcommand("show", "Print one subject row");
    show->add_option("store", store_path)->required();
    show->add_option("--subject", subject)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) return cmd_validate(net_path);
        if (*infer) return cmd_infer(net_path, target, value, evidence_pairs);
        if (*detect_cmd) return cmd_detect(net_path, new_pair, eps, obs_pairs, obs_file, format);
        if (*calibrate) {
            return cmd_calibrate(net_path, scenario_path, grid_csv, split_seed, report_path,
                                 roc_path);
        }
        if (*generate) return cmd_generate(net_path, out_path, gen_cfg);
        if (*ingest) return cmd_ingest(store_path, net_path, subject, new_pair, time_text, eps);
        if (*resolve) return cmd_resolve(store_path, net_path, subject, choice);
        if (*show) return cmd_show(store_path, subject);
    } catch (const ParseError& e) {
        return fail(2, e.code(), e.what());
    } catch (const LookupError& e) {
        return fail(2, e.code(), e.what());
    } catch (const Error& e) {
        // Domain-level failures: impossible evidence, single-class input,
        // pending conflicts, bad repair choices, retry exhaustion, IO.
        return fail(1, e.code(), e.what());
    } catch (const std::invalid_argument& e) {
        return fail(2, "invalid-argument", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal-error", e.what());
    }
    return 2;
}
