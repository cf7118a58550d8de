#pragma once

#include <dwm/decompose.hpp>
#include <dwm/transform.hpp>

#include <json.hpp>

namespace dwm {

/// {"m", "r", "l", "points", "G", "B_t", "A_t"} with every entry as a rational string.
nlohmann::json transform_json(const TransformSet &ts);

/// Spec, per-axis parts and the 2-D parts in aggregation order.
nlohmann::json plan_json(const DecompositionPlan &plan);

} // namespace dwm
