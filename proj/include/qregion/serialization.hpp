#pragma once

#include <string>

#include "qregion/states.hpp"

namespace qregion {

/// JSON state format:
///   {"dims":[...], "labels":[...], "kind":"ket"|"density",
///    "data": nested arrays of [re, im]}
/// Kets use a flat list of [re, im] pairs, densities a list of rows.
/// Doubles round-trip losslessly (shortest-round-trip printing).
std::string state_to_json(const PureState& s);
std::string state_to_json(const MultipartiteState& s);

/// Parse and validate; FormatError messages carry the offending field path.
BuiltState load_state_json(const std::string& text);

}  // namespace qregion
