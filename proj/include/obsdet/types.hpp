#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace obsdet {

// Variables and values are addressed by their position in the network's
// declaration order. Names are resolved once at the I/O boundary.
using VarIndex = int;
using ValueIndex = int;

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// One recorded value for a network variable. The timestamp is optional at
/// the algorithm layer; the subject store always fills it in.
struct Observation {
    VarIndex var = -1;
    ValueIndex value = -1;
    std::optional<Timestamp> acquired_at;
};

// Identity of an observation is its (variable, value) pair; acquisition time
// is metadata and does not participate in comparisons.
inline bool operator==(const Observation& a, const Observation& b) {
    return a.var == b.var && a.value == b.value;
}
inline bool operator!=(const Observation& a, const Observation& b) { return !(a == b); }
inline bool operator<(const Observation& a, const Observation& b) {
    return std::tie(a.var, a.value) < std::tie(b.var, b.value);
}

// At most one observation per variable; order is meaningful for output only.
using ObservationSet = std::vector<Observation>;

/// Contradiction tolerance. A new observation contradicts the evidence when
/// its conditional probability is at or below this value.
struct Epsilon {
    double value = 1e-2;

    /// Throws std::invalid_argument outside [0, 1].
    static Epsilon checked(double v);
};

/// Full assignment over the network: one value index per variable, aligned
/// with declaration order. kUnassigned marks holes.
using Assignment = std::vector<ValueIndex>;
inline constexpr ValueIndex kUnassigned = -1;

}  // namespace obsdet
