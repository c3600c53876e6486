#pragma once

#include <string>

#include "stochorder/distribution.hpp"

namespace stochorder {

// Distribution spec ingestion format shared with the CLI:
//   {"family": "gamma", "params": {"shape": 2, "scale": 1}}
//   {"family": "piecewise", "pieces": [{"from":0,"to":1,"expr":"1+x"}, ...]}
//   {"family": "tabulated", "support": [0, 3], "weights": [0.1,0.2,0.3,0.4]}
// "to" may be the string "inf" on the last piece. Expressions are arithmetic
// over x (and the free constant c) composed with exp; see expression.hpp.
// Throws InputError with context on malformed input.
FamilySpec parse_family_spec(const std::string& json_text,
                             const std::string& origin = "<input>");

FamilySpec load_family_spec_file(const std::string& path);

// Spec serialization (used to dump corpus scenarios for replay).
std::string family_spec_to_json(const FamilySpec& spec);

}  // namespace stochorder
