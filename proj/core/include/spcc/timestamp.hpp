#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace spcc {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds (truncated)
// and an optional zone designator ("Z" or "+HH:MM"/"-HH:MM"). A missing zone
// is read as UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_iso8601(Timestamp t);

}  // namespace spcc
