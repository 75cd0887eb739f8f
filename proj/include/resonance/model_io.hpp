#pragma once

#include "resonance/lattice_model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace resonance {

// Model file format (site indices 1-based):
//   {"n_sites": 2, "epsilon": [-0.85, 0],
//    "hoppings": [{"i": 1, "j": 2, "t": 1.0}],
//    "leads": [{"site": 2, "coupling": 1.0, "label": "L"}, ...]}
// A full "dot_matrix" (array of rows) may replace epsilon/hoppings.
ModelConfig config_from_json(const nlohmann::json& doc);
OpenLatticeModel model_from_json(const nlohmann::json& doc);
OpenLatticeModel load_model_file(const std::filesystem::path& path);

nlohmann::json model_to_json(const OpenLatticeModel& model);

}  // namespace resonance
