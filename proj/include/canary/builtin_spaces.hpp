#pragma once

#include <vector>

#include "canary/value_space.hpp"

namespace canary {

/// Fictional value spaces shipped with the toolkit, addressable from
/// configs by id: place-name (4761 values), given-name, surname, org-name,
/// title, number, date, phone.
std::vector<ValueSpaceSpec> builtin_space_specs();

}  // namespace canary
