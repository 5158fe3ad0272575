#pragma once

#include <string>

#include <json.hpp>

#include "perturbmap/model.hpp"

namespace perturbmap {

// JSON model document:
//   {
//     "domains":  [[label, ...], ...],
//     "unary":    [{"var": i, "label": v, "score": s}, ...],
//     "pairwise": [{"var_i": i, "var_j": j, "label_i": a, "label_j": b, "score": s}, ...],
//     "forbidden": [[label, ...], ...]          // full configurations, optional
//   }
// Labels are the domain values, not indices. Malformed documents raise
// std::invalid_argument.
DiscreteModel model_from_json(const nlohmann::json& doc);

// Inverse of model_from_json: emits every non-zero unary and pairwise score in
// deterministic (variable, label) order. Models carrying a constant offset
// (e.g. conditional slices) have no representation in this format and are
// rejected.
nlohmann::json model_to_json(const DiscreteModel& model);

DiscreteModel load_model_file(const std::string& path);
void save_model_file(const DiscreteModel& model, const std::string& path);

}  // namespace perturbmap
