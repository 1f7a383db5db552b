#pragma once

#include <json.hpp>
#include <string>

#include "fidlab/channel.hpp"
#include "fidlab/predual.hpp"

// Wire formats.  Complex scalars serialize as [re, im]; matrices are
// row-major arrays of rows; an element carries its algebra:
//   {"algebra": {"blocks": [{"dim": d, "weight": w}, ...]},
//    "blocks": [[[ [re, im], ... ], ...], ...]}
// Parse failures raise ParseError with the offending field in the message.

namespace fidlab {

using Json = nlohmann::json;

Json algebra_to_json(const TracialAlgebra& algebra);
TracialAlgebra algebra_from_json(const Json& j, const std::string& context = "algebra");

/// The "blocks" payload of an element, without the algebra envelope.
Json element_blocks_to_json(const AlgebraElement& x);
AlgebraElement element_blocks_from_json(const Json& j, const TracialAlgebra& algebra,
                                        const std::string& context = "blocks");

Json element_to_json(const AlgebraElement& x);
AlgebraElement element_from_json(const Json& j, const std::string& context = "element");

Json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const Json& j, const std::string& context = "channel");

Json predual_to_json(const PredualMatrix& omega);
PredualMatrix predual_from_json(const Json& j, const std::string& context = "predual");

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace fidlab
