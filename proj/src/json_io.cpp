#include "obsdet/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "obsdet/timeutil.hpp"

namespace obsdet {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key, const char* where) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw ParseError(std::string(where) + ": missing key '" + key + "'");
    }
    return *it;
}

std::string require_string(const json& value, const char* where) {
    if (!value.is_string()) throw ParseError(std::string(where) + ": expected a string");
    return value.get<std::string>();
}

double require_probability(const json& value, const char* where) {
    if (!value.is_number()) throw ParseError(std::string(where) + ": expected a number");
    double p = value.get<double>();
    if (!std::isfinite(p)) throw ParseError(std::string(where) + ": NaN/Inf not allowed");
    return p;
}

}  // namespace

LoadedNetwork network_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("network: top level must be an object");

    std::vector<Variable> variables;
    for (const json& v : require(doc, "variables", "network")) {
        Variable var;
        var.name = require_string(require(v, "name", "variable"), "variable name");
        const json& dom = require(v, "domain", "variable");
        if (!dom.is_array()) throw ParseError("variable '" + var.name + "': domain must be an array");
        for (const json& label : dom) {
            var.domain.push_back(require_string(label, "domain label"));
        }
        variables.push_back(std::move(var));
    }

    // First-occurrence name resolution; duplicates become validation findings.
    auto find_var = [&](const std::string& name) -> std::optional<VarIndex> {
        for (std::size_t i = 0; i < variables.size(); ++i) {
            if (variables[i].name == name) return static_cast<VarIndex>(i);
        }
        return std::nullopt;
    };

    LoadedNetwork out;
    bool resolvable = true;

    std::vector<std::pair<VarIndex, VarIndex>> edges;
    const json& edge_doc = require(doc, "edges", "network");
    if (!edge_doc.is_array()) throw ParseError("network: edges must be an array");
    for (const json& e : edge_doc) {
        if (!e.is_array() || e.size() != 2) {
            throw ParseError("network: each edge must be a [parent, child] pair");
        }
        std::string pname = require_string(e[0], "edge parent");
        std::string cname = require_string(e[1], "edge child");
        auto p = find_var(pname);
        auto c = find_var(cname);
        if (!p || !c) {
            out.violations.push_back({"dangling-reference",
                                      "edge [" + pname + ", " + cname +
                                          "] names an undeclared variable"});
            resolvable = false;
            continue;
        }
        edges.emplace_back(*p, *c);
    }

    std::vector<Cpt> cpts(variables.size());
    const json& cpt_doc = require(doc, "cpts", "network");
    if (!cpt_doc.is_object()) throw ParseError("network: cpts must be an object");
    std::vector<bool> have_cpt(variables.size(), false);
    for (const auto& [name, body] : cpt_doc.items()) {
        auto child = find_var(name);
        if (!child) {
            out.violations.push_back({"dangling-reference",
                                      "cpt entry '" + name + "' names an undeclared variable"});
            resolvable = false;
            continue;
        }
        Cpt cpt;
        for (const json& pname : require(body, "parents", "cpt")) {
            auto p = find_var(require_string(pname, "cpt parent"));
            if (!p) {
                out.violations.push_back({"dangling-reference",
                                          "cpt of '" + name + "' names an undeclared parent"});
                resolvable = false;
                continue;
            }
            cpt.parent_order.push_back(*p);
        }
        const json& rows = require(body, "rows", "cpt");
        if (!rows.is_array()) throw ParseError("cpt of '" + name + "': rows must be an array");
        for (const json& row : rows) {
            if (!row.is_array()) throw ParseError("cpt of '" + name + "': each row must be an array");
            std::vector<double> values;
            for (const json& p : row) values.push_back(require_probability(p, "cpt entry"));
            cpt.rows.push_back(std::move(values));
        }
        cpts[static_cast<std::size_t>(*child)] = std::move(cpt);
        have_cpt[static_cast<std::size_t>(*child)] = true;
    }
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (!have_cpt[i]) {
            out.violations.push_back({"cpt-missing",
                                      "no CPT declared for variable '" + variables[i].name + "'"});
        }
    }

    std::string model_version;
    if (auto it = doc.find("model_version"); it != doc.end()) {
        model_version = require_string(*it, "model_version");
    }

    if (resolvable) {
        out.net.emplace(std::move(variables), std::move(edges), std::move(cpts),
                        std::move(model_version));
    }
    return out;
}

json network_to_json(const BayesianNetwork& net) {
    json doc;
    if (!net.model_version().empty()) doc["model_version"] = net.model_version();
    doc["variables"] = json::array();
    for (const Variable& v : net.variables()) {
        doc["variables"].push_back({{"name", v.name}, {"domain", v.domain}});
    }
    doc["edges"] = json::array();
    for (const auto& [p, c] : net.edges()) {
        doc["edges"].push_back(json::array({net.var_name(p), net.var_name(c)}));
    }
    doc["cpts"] = json::object();
    for (int v = 0; v < net.size(); ++v) {
        json parents = json::array();
        for (VarIndex p : net.cpt(v).parent_order) parents.push_back(net.var_name(p));
        doc["cpts"][net.var_name(v)] = {{"parents", parents}, {"rows", net.cpt(v).rows}};
    }
    return doc;
}

json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return doc;
}

LoadedNetwork load_network_report(const std::filesystem::path& path) {
    return network_from_json(parse_json_file(path));
}

BayesianNetwork load_network(const std::filesystem::path& path) {
    LoadedNetwork loaded = load_network_report(path);
    if (!loaded.net) {
        std::string detail;
        for (const Violation& v : loaded.violations) {
            if (!detail.empty()) detail += "; ";
            detail += v.message;
        }
        throw ParseError("'" + path.string() + "' has unresolvable references: " + detail);
    }
    return std::move(*loaded.net);
}

json observation_to_json(const BayesianNetwork& net, const Observation& obs) {
    json out{{"variable", net.var_name(obs.var)},
             {"value", net.value_label(obs.var, obs.value)}};
    if (obs.acquired_at) out["acquired_at"] = format_iso8601(*obs.acquired_at);
    return out;
}

json observation_set_to_json(const BayesianNetwork& net, const ObservationSet& obs) {
    json out = json::array();
    for (const Observation& o : obs) out.push_back(observation_to_json(net, o));
    return out;
}

json tree_to_json(const BayesianNetwork& net, const AndOrTree& tree) {
    switch (tree.kind) {
        case AndOrTree::Kind::True:
            return json{{"kind", "true"}};
        case AndOrTree::Kind::Leaf:
            return json{{"kind", "leaf"},
                        {"observation",
                         {{"variable", net.var_name(tree.observation.var)},
                          {"value", net.value_label(tree.observation.var,
                                                    tree.observation.value)}}}};
        case AndOrTree::Kind::And:
        case AndOrTree::Kind::Or: {
            json children = json::array();
            for (const AndOrTree& child : tree.children) {
                children.push_back(tree_to_json(net, child));
            }
            return json{{"kind", tree.kind == AndOrTree::Kind::And ? "and" : "or"},
                        {"children", std::move(children)}};
        }
    }
    return {};
}

std::vector<LabeledScenario> scenarios_from_jsonl(std::istream& in, const BayesianNetwork& net) {
    std::vector<LabeledScenario> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("scenario line " + std::to_string(line_no) + ": " + e.what());
        }
        const char* where = "scenario";
        LabeledScenario sc;
        sc.id = require_string(require(doc, "id", where), "scenario id");
        const json& label = require(doc, "label", where);
        if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
            throw ParseError("scenario '" + sc.id + "': label must be 0 or 1");
        }
        sc.label = label.get<int>();

        auto to_obs = [&](const json& node) {
            std::string var = require_string(require(node, "var", where), "observation var");
            std::string value = require_string(require(node, "value", where), "observation value");
            Observation obs;
            obs.var = net.var_index(var);
            obs.value = net.value_index(obs.var, value);
            if (auto it = node.find("t"); it != node.end()) {
                auto ts = parse_iso8601(require_string(*it, "timestamp"));
                if (!ts) {
                    throw ParseError("scenario '" + sc.id + "': bad timestamp '" +
                                     it->get<std::string>() + "'");
                }
                obs.acquired_at = *ts;
            }
            return obs;
        };

        sc.new_obs = to_obs(require(doc, "new", where));
        for (const json& node : require(doc, "obs", where)) {
            sc.prior_obs.push_back(to_obs(node));
        }
        for (const Observation& o : sc.prior_obs) {
            if (o.var == sc.new_obs.var) {
                throw ParseError("scenario '" + sc.id +
                                 "': the new observation's variable also appears in obs");
            }
        }
        out.push_back(std::move(sc));
    }
    return out;
}

std::string scenario_to_jsonl_line(const BayesianNetwork& net, const LabeledScenario& sc) {
    json doc;
    doc["id"] = sc.id;
    doc["label"] = sc.label;
    doc["new"] = {{"var", net.var_name(sc.new_obs.var)},
                  {"value", net.value_label(sc.new_obs.var, sc.new_obs.value)}};
    json obs = json::array();
    for (const Observation& o : sc.prior_obs) {
        json node{{"var", net.var_name(o.var)}, {"value", net.value_label(o.var, o.value)}};
        if (o.acquired_at) node["t"] = format_iso8601(*o.acquired_at);
        obs.push_back(std::move(node));
    }
    doc["obs"] = std::move(obs);
    return doc.dump();
}

json report_to_json(const CalibrationReport& report) {
    json points = json::array();
    for (const ThresholdPoint& pt : report.points) {
        points.push_back({{"eps", pt.eps},
                          {"tp", pt.tp},
                          {"fp", pt.fp},
                          {"tn", pt.tn},
                          {"fn", pt.fn},
                          {"tp_rate", pt.tp_rate},
                          {"fp_rate", pt.fp_rate},
                          {"tn_rate", pt.tn_rate},
                          {"fn_rate", pt.fn_rate},
                          {"youden_j", pt.youden_j}});
    }
    return json{{"points", std::move(points)},
                {"selected_eps", report.selected_eps},
                {"selection_rule", report.selection_rule},
                {"excluded_scenarios", report.excluded_count}};
}

}  // namespace obsdet
