#pragma once

#include <json.hpp>

#include "pmv/pmg.hpp"
#include "pmv/transforms.hpp"

namespace pmv {

using Json = nlohmann::ordered_json;

// Key order is fixed by these encoders.
Json to_json(const TransformParams& params);
TransformParams params_from_json(TransformKind kind, const Json& j);

Json to_json(const ParamRanges& ranges);
// Keys absent from `j` keep the values of `base`.
ParamRanges ranges_from_json(const Json& j, ParamRanges base = {});

Json to_json(const TransformSet& set);
TransformSet transform_set_from_json(const Json& j);

Json to_json(const ClipRecipe& recipe);
ClipRecipe recipe_from_json(const Json& j);

}  // namespace pmv
