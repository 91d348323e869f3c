#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "symkawa/equiv.hpp"

namespace symkawa {

using json = nlohmann::json;

// {"class": ..., "f": ..., "alpha": ..., "beta": ..., "sigma": ..., "b": ...,
//  "params": {name: expr or null}, "assumptions": [...]}.  A missing class is
// "full", or "linear-b" when b is given; missing elements default to 1 (f to u).
PdeInstance pde_from_json(const json& j);
json pde_to_json(const PdeInstance& pde);

// {"T": ..., "X1": ..., "X0": ..., "U1": ..., "U0": ..., "assumptions": [...]}
PointTransformation transformation_from_json(const json& j);
json transformation_to_json(const PointTransformation& tr);

// {"group": name, "params": {name: number or "p/q"}, "Tfun": expr}
GroupElement group_element_from_json(const json& j);
json group_element_to_json(const GroupElement& g);

// Inline JSON (text starting with '{') or the path of a JSON file.
json load_json_argument(const std::string& text);

}  // namespace symkawa
