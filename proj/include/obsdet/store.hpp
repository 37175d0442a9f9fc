#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "obsdet/detection.hpp"
#include "obsdet/network.hpp"
#include "obsdet/types.hpp"

namespace obsdet {

/// Store-level observation, kept by name so a store file stands on its own.
struct NamedObservation {
    std::string variable;
    std::string value;
    Timestamp acquired_at = 0;
    bool clock_defaulted = false;  // acquired_at was filled at ingest time
};

/// A contradictory observation waiting for an explicit resolution.
struct PendingObservation {
    std::string variable;
    std::string value;
    Timestamp acquired_at = 0;
    bool clock_defaulted = false;
    double eps = 0.0;  // threshold in force when the contradiction was found
};

struct SubjectRow {
    std::map<std::string, NamedObservation> observations;  // keyed by variable
    std::optional<PendingObservation> pending;
};

/// How to update a row after a contradiction: the AND leaves must all be
/// replaced; each OR group needs at least one member replaced, listed oldest
/// first. Suggested replacement values come with their posteriors given the
/// untouched observations plus the new one; confidence is the detection
/// probability itself.
struct Recommendation {
    ObservationSet must_update;
    std::vector<ObservationSet> choose_one_groups;
    struct Suggestion {
        ValueIndex value = -1;
        double posterior = 0.0;
    };
    std::map<VarIndex, Suggestion> suggested_values;
    double confidence = 0.0;
};

struct IngestOutcome {
    DetectionResult detection;
    std::optional<Recommendation> recommendation;  // present iff contradictory
    bool committed = false;
};

/// Per-subject observation database. All mutation goes through ingest /
/// apply_resolution; persistence is a single JSON document written with
/// atomic replace.
class SubjectStore {
public:
    SubjectStore() = default;
    explicit SubjectStore(std::string model_version)
        : model_version_(std::move(model_version)) {}

    static SubjectStore from_json(const nlohmann::json& doc);
    static SubjectStore load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;

    const std::string& model_version() const { return model_version_; }
    const std::map<std::string, SubjectRow>& subjects() const { return subjects_; }
    bool has_subject(const std::string& id) const { return subjects_.count(id) > 0; }
    const SubjectRow& row(const std::string& id) const;

    /// Detects against the subject's current observations (creating the row
    /// for unknown subjects). Consistent observations are committed;
    /// contradictory ones are parked as pending and a recommendation is
    /// returned. Throws PendingConflictError while a resolution is pending.
    IngestOutcome ingest(const std::string& subject, const BayesianNetwork& net,
                         const Observation& new_obs, Epsilon eps);

    /// Applies one of the pending detection's repair sets: removes exactly
    /// those observations and commits the pending observation. The chosen
    /// set must be one of repair_sets(tree), and the post-state must be
    /// consistent; otherwise the row is left untouched and RepairSetError is
    /// thrown. Returns the updated row.
    const SubjectRow& apply_resolution(const std::string& subject, const BayesianNetwork& net,
                                       const ObservationSet& removal);

    /// Repair sets of the pending detection, recomputed deterministically so
    /// indices stay stable across processes.
    std::vector<ObservationSet> pending_repair_sets(const std::string& subject,
                                                    const BayesianNetwork& net) const;

private:
    std::string model_version_;
    std::map<std::string, SubjectRow> subjects_;

    ObservationSet observations_of(const BayesianNetwork& net, const SubjectRow& row,
                                   std::optional<VarIndex> skip) const;
    DetectionResult detect_pending(const BayesianNetwork& net, const SubjectRow& row,
                                   const PendingObservation& pending, Observation& out_new) const;
};

/// Most likely replacement per obsolete variable given the evidence plus the
/// new observation; ties broken by domain order. Precondition: the obsolete
/// variables carry no evidence.
std::map<VarIndex, Recommendation::Suggestion> suggest_values(
    const BayesianNetwork& net, const ObservationSet& remaining_evidence,
    const Observation& new_obs, const std::vector<VarIndex>& obsolete_vars);

/// Writes content to a temporary sibling file, fsyncs, then renames over the
/// target, so the target is always either the old or the new complete state.
/// `hook` (tests only) runs after each chunk with the byte count written so
/// far; a throwing hook simulates a crash mid-write.
using WriteHook = std::function<void(std::size_t)>;
void atomic_write(const std::filesystem::path& path, std::string_view content,
                  const WriteHook& hook = {});

/// Advisory exclusive lock on <path>.lock, held for the object's lifetime.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path);
    ~FileLock();
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace obsdet
