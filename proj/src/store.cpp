#include "obsdet/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>

#include "obsdet/inference.hpp"
#include "obsdet/json_io.hpp"
#include "obsdet/timeutil.hpp"

namespace obsdet {

using nlohmann::json;

SubjectStore SubjectStore::from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("store: top level must be an object");
    SubjectStore store;
    if (auto it = doc.find("model_version"); it != doc.end() && it->is_string()) {
        store.model_version_ = it->get<std::string>();
    }
    auto subjects = doc.find("subjects");
    if (subjects == doc.end() || !subjects->is_object()) {
        throw ParseError("store: missing 'subjects' object");
    }
    for (const auto& [id, row_doc] : subjects->items()) {
        SubjectRow row;
        auto obs_doc = row_doc.find("observations");
        if (obs_doc == row_doc.end() || !obs_doc->is_object()) {
            throw ParseError("store: subject '" + id + "' lacks an observations object");
        }
        for (const auto& [var, body] : obs_doc->items()) {
            NamedObservation obs;
            obs.variable = var;
            if (!body.contains("value") || !body["value"].is_string()) {
                throw ParseError("store: subject '" + id + "', variable '" + var +
                                 "': missing value");
            }
            obs.value = body["value"].get<std::string>();
            if (!body.contains("acquired_at") || !body["acquired_at"].is_string()) {
                throw ParseError("store: subject '" + id + "', variable '" + var +
                                 "': missing acquired_at");
            }
            auto ts = parse_iso8601(body["acquired_at"].get<std::string>());
            if (!ts) {
                throw ParseError("store: subject '" + id + "', variable '" + var +
                                 "': bad timestamp");
            }
            obs.acquired_at = *ts;
            obs.clock_defaulted = body.value("clock_defaulted", false);
            row.observations.emplace(var, std::move(obs));
        }
        if (auto it = row_doc.find("pending"); it != row_doc.end() && !it->is_null()) {
            PendingObservation pending;
            pending.variable = (*it).at("variable").get<std::string>();
            pending.value = (*it).at("value").get<std::string>();
            auto ts = parse_iso8601((*it).at("acquired_at").get<std::string>());
            if (!ts) throw ParseError("store: subject '" + id + "': bad pending timestamp");
            pending.acquired_at = *ts;
            pending.clock_defaulted = it->value("clock_defaulted", false);
            pending.eps = (*it).at("eps").get<double>();
            row.pending = std::move(pending);
        }
        store.subjects_.emplace(id, std::move(row));
    }
    return store;
}

SubjectStore SubjectStore::load(const std::filesystem::path& path) {
    return from_json(parse_json_file(path));
}

json SubjectStore::to_json() const {
    json subjects = json::object();
    for (const auto& [id, row] : subjects_) {
        json obs = json::object();
        for (const auto& [var, o] : row.observations) {
            json body{{"value", o.value}, {"acquired_at", format_iso8601(o.acquired_at)}};
            if (o.clock_defaulted) body["clock_defaulted"] = true;
            obs[var] = std::move(body);
        }
        json row_doc{{"observations", std::move(obs)}};
        if (row.pending) {
            json pending{{"variable", row.pending->variable},
                         {"value", row.pending->value},
                         {"acquired_at", format_iso8601(row.pending->acquired_at)},
                         {"eps", row.pending->eps}};
            if (row.pending->clock_defaulted) pending["clock_defaulted"] = true;
            row_doc["pending"] = std::move(pending);
        }
        subjects[id] = std::move(row_doc);
    }
    return json{{"model_version", model_version_}, {"subjects", std::move(subjects)}};
}

void SubjectStore::save(const std::filesystem::path& path) const {
    atomic_write(path, to_json().dump(2) + "\n");
}

const SubjectRow& SubjectStore::row(const std::string& id) const {
    auto it = subjects_.find(id);
    if (it == subjects_.end()) throw LookupError("unknown subject '" + id + "'");
    return it->second;
}

ObservationSet SubjectStore::observations_of(const BayesianNetwork& net, const SubjectRow& row,
                                             std::optional<VarIndex> skip) const {
    ObservationSet out;
    for (const auto& [name, obs] : row.observations) {
        VarIndex var = net.var_index(name);
        if (skip && var == *skip) continue;
        out.push_back({var, net.value_index(var, obs.value), obs.acquired_at});
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

Recommendation build_recommendation(const BayesianNetwork& net, const ObservationSet& obs_prime,
                                    const DetectionResult& detection,
                                    const Observation& new_obs) {
    Recommendation rec;
    rec.confidence = detection.probability;

    std::set<VarIndex> leaf_vars;
    const AndOrTree& root = detection.tree;
    if (root.kind == AndOrTree::Kind::Leaf) {
        rec.must_update.push_back(root.observation);
        leaf_vars.insert(root.observation.var);
    } else if (root.kind == AndOrTree::Kind::And || root.kind == AndOrTree::Kind::Or) {
        for (const AndOrTree& child : root.children) {
            if (child.kind == AndOrTree::Kind::Leaf) {
                rec.must_update.push_back(child.observation);
                leaf_vars.insert(child.observation.var);
            } else if (child.kind == AndOrTree::Kind::Or) {
                ObservationSet group;
                for (const AndOrTree& leaf : child.children) {
                    group.push_back(leaf.observation);
                    leaf_vars.insert(leaf.observation.var);
                }
                // Older observations are more likely to be obsolete.
                std::stable_sort(group.begin(), group.end(),
                                 [](const Observation& a, const Observation& b) {
                                     return a.acquired_at.value_or(0) < b.acquired_at.value_or(0);
                                 });
                rec.choose_one_groups.push_back(std::move(group));
            }
        }
    }

    ObservationSet untouched;
    for (const Observation& obs : obs_prime) {
        if (!leaf_vars.count(obs.var)) untouched.push_back(obs);
    }
    rec.suggested_values = suggest_values(
        net, untouched, new_obs, std::vector<VarIndex>(leaf_vars.begin(), leaf_vars.end()));
    return rec;
}

}  // namespace

IngestOutcome SubjectStore::ingest(const std::string& subject, const BayesianNetwork& net,
                                   const Observation& new_obs, Epsilon eps) {
    Epsilon::checked(eps.value);
    if (new_obs.var < 0 || new_obs.var >= net.size()) {
        throw LookupError("ingest: variable index out of range");
    }
    if (new_obs.value < 0 || new_obs.value >= net.domain_size(new_obs.var)) {
        throw LookupError("ingest: value out of domain for '" + net.var_name(new_obs.var) + "'");
    }

    // Work against the existing row (or an empty one for a new subject); the
    // store is only touched once detection has succeeded.
    auto existing = subjects_.find(subject);
    const SubjectRow empty_row;
    const SubjectRow& row = existing != subjects_.end() ? existing->second : empty_row;
    if (row.pending) {
        throw PendingConflictError("subject '" + subject + "' has an unresolved detection on '" +
                                   row.pending->variable + "'");
    }

    Observation stamped = new_obs;
    bool clock_defaulted = false;
    if (!stamped.acquired_at) {
        stamped.acquired_at = now_utc();
        clock_defaulted = true;
    }

    // The new observation replaces any prior one on the same variable.
    ObservationSet obs_prime = observations_of(net, row, stamped.var);

    IngestOutcome outcome;
    outcome.detection = detect(net, obs_prime, stamped, eps);

    if (!outcome.detection.contradictory) {
        NamedObservation committed;
        committed.variable = net.var_name(stamped.var);
        committed.value = net.value_label(stamped.var, stamped.value);
        committed.acquired_at = *stamped.acquired_at;
        committed.clock_defaulted = clock_defaulted;
        subjects_[subject].observations[committed.variable] = std::move(committed);
        outcome.committed = true;
        return outcome;
    }

    outcome.recommendation = build_recommendation(net, obs_prime, outcome.detection, stamped);
    if (outcome.detection.tree.kind == AndOrTree::Kind::True) {
        // Contradiction without an identifiable culprit: there is no removal
        // to choose from, so parking a pending detection would wedge the
        // subject. Leave the row unchanged and let the caller act on the
        // diagnostics.
        subjects_[subject];  // still materialize the row for a new subject
        return outcome;
    }
    subjects_[subject].pending =
        PendingObservation{net.var_name(stamped.var), net.value_label(stamped.var, stamped.value),
                           *stamped.acquired_at, clock_defaulted, eps.value};
    return outcome;
}

DetectionResult SubjectStore::detect_pending(const BayesianNetwork& net, const SubjectRow& row,
                                             const PendingObservation& pending,
                                             Observation& out_new) const {
    out_new.var = net.var_index(pending.variable);
    out_new.value = net.value_index(out_new.var, pending.value);
    out_new.acquired_at = pending.acquired_at;
    ObservationSet obs_prime = observations_of(net, row, out_new.var);
    return detect(net, obs_prime, out_new, Epsilon{pending.eps});
}

std::vector<ObservationSet> SubjectStore::pending_repair_sets(const std::string& subject,
                                                              const BayesianNetwork& net) const {
    const SubjectRow& r = row(subject);
    if (!r.pending) throw NoPendingError("subject '" + subject + "' has no pending detection");
    Observation pending_obs;
    DetectionResult detection = detect_pending(net, r, *r.pending, pending_obs);
    return repair_sets(detection.tree);
}

const SubjectRow& SubjectStore::apply_resolution(const std::string& subject,
                                                 const BayesianNetwork& net,
                                                 const ObservationSet& removal) {
    auto it = subjects_.find(subject);
    if (it == subjects_.end()) throw LookupError("unknown subject '" + subject + "'");
    SubjectRow& row = it->second;
    if (!row.pending) throw NoPendingError("subject '" + subject + "' has no pending detection");

    Observation pending_obs;
    DetectionResult detection = detect_pending(net, row, *row.pending, pending_obs);
    std::vector<ObservationSet> candidates = repair_sets(detection.tree);

    ObservationSet chosen = removal;
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    if (std::find(candidates.begin(), candidates.end(), chosen) == candidates.end()) {
        throw RepairSetError("the chosen removal set is not a repair set of the pending "
                             "detection for subject '" + subject + "'");
    }

    ObservationSet obs_prime = observations_of(net, row, pending_obs.var);
    ObservationSet remaining;
    for (const Observation& obs : obs_prime) {
        if (std::find(chosen.begin(), chosen.end(), obs) == chosen.end()) {
            remaining.push_back(obs);
        }
    }

    double p = query(net, Query{pending_obs.var, pending_obs.value, to_evidence(remaining)});
    if (p <= row.pending->eps) {
        throw RepairSetError("removing the chosen set leaves '" + row.pending->variable +
                             "=" + row.pending->value + "' contradictory (p = " +
                             std::to_string(p) + "); row unchanged");
    }

    for (const Observation& obs : chosen) {
        row.observations.erase(net.var_name(obs.var));
    }
    NamedObservation committed;
    committed.variable = row.pending->variable;
    committed.value = row.pending->value;
    committed.acquired_at = row.pending->acquired_at;
    committed.clock_defaulted = row.pending->clock_defaulted;
    row.observations[committed.variable] = std::move(committed);
    row.pending.reset();
    return row;
}

std::map<VarIndex, Recommendation::Suggestion> suggest_values(
    const BayesianNetwork& net, const ObservationSet& remaining_evidence,
    const Observation& new_obs, const std::vector<VarIndex>& obsolete_vars) {
    ObservationSet evidence = remaining_evidence;
    evidence.push_back(new_obs);
    Evidence conditioning = to_evidence(evidence);
    for (VarIndex var : obsolete_vars) {
        if (conditioning.count(var)) {
            throw std::invalid_argument("suggest_values: '" + net.var_name(var) +
                                        "' still carries evidence");
        }
    }

    std::map<VarIndex, Recommendation::Suggestion> out;
    for (VarIndex var : obsolete_vars) {
        std::vector<double> posterior = posterior_distribution(net, var, conditioning);
        std::size_t best = 0;  // ties keep the earliest domain value
        for (std::size_t v = 1; v < posterior.size(); ++v) {
            if (posterior[v] > posterior[best]) best = v;
        }
        out[var] = {static_cast<ValueIndex>(best), posterior[best]};
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, std::string_view content,
                  const WriteHook& hook) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        // O_TRUNC so a leftover temp file from an earlier crash is reused.
        int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd < 0) {
            throw Error("io-error", "cannot create '" + tmp.string() + "': " +
                                        std::strerror(errno));
        }
        constexpr std::size_t kChunk = 4096;
        std::size_t written = 0;
        try {
            while (written < content.size()) {
                const std::size_t n = std::min(kChunk, content.size() - written);
                ssize_t rc = ::write(fd, content.data() + written, n);
                if (rc < 0) {
                    throw Error("io-error", "write to '" + tmp.string() + "' failed: " +
                                                std::strerror(errno));
                }
                written += static_cast<std::size_t>(rc);
                if (hook) hook(written);
            }
            if (::fsync(fd) != 0) {
                throw Error("io-error", "fsync of '" + tmp.string() + "' failed");
            }
        } catch (...) {
            ::close(fd);
            throw;
        }
        ::close(fd);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error("io-error", "rename onto '" + path.string() + "' failed: " + ec.message());
    }
}

FileLock::FileLock(const std::filesystem::path& path) {
    const std::string lock_path = path.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) {
        throw Error("io-error", "cannot open lock file '" + lock_path + "': " +
                                    std::strerror(errno));
    }
    if (::flock(fd_, LOCK_EX) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Error("io-error", "cannot lock '" + lock_path + "'");
    }
}

FileLock::~FileLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

}  // namespace obsdet
