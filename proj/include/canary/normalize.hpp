#pragma once

#include <string>
#include <string_view>

namespace canary {

/// Canonical form both responses and token values are matched in:
///   - ASCII lowercase, whitespace runs collapsed to one space, trimmed;
///   - dates rewritten to YYYY-MM-DD ("March 5, 2024", "5 Mar 2024",
///     "2024/03/05", "03/05/2024" read as M/D/Y, "05.03.2024" read as D.M.Y,
///     "2024-3-5");
///   - ten-digit phone renderings rewritten to XXX-XXX-XXXX, with an optional
///     leading +1 / 1 country code dropped;
///   - thousands separators removed from digit groups ("1,234,567").
/// Idempotent: normalize_response(normalize_response(x)) == normalize_response(x).
std::string normalize_response(std::string_view raw);

}  // namespace canary
