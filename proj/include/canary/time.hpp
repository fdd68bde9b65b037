#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace canary {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;
using Clock = std::function<Timestamp()>;

Timestamp now_utc();
Clock system_clock();

/// "2025-03-01T12:00:00Z", or with ".123" when milliseconds are non-zero.
std::string to_rfc3339(Timestamp ts);

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)".
/// Throws InputError on anything else.
Timestamp parse_rfc3339(std::string_view text);

/// "YYYY-MM-DD" of the UTC day containing ts.
std::string utc_date(Timestamp ts);

constexpr Duration days(long long n) { return std::chrono::duration_cast<Duration>(std::chrono::hours(24 * n)); }
constexpr Duration hours(long long n) { return std::chrono::duration_cast<Duration>(std::chrono::hours(n)); }

}  // namespace canary
