#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "obsdet/types.hpp"

namespace obsdet {

/// Strict "YYYY-MM-DDTHH:MM:SSZ" (UTC) to epoch seconds; nullopt on any
/// deviation, including out-of-range fields.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Epoch seconds to "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

Timestamp now_utc();

}  // namespace obsdet
