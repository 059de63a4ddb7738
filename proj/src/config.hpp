#pragma once

#include <string>

#include <json.hpp>

#include "model.hpp"
#include "sensing.hpp"

namespace sqd {

// Model JSON: {"X","Y","A","P","B","c","f","d","rho","pi0"}, matrices as arrays
// of rows. Sensing JSON replaces "B" with "B1" and "B2"; "B", "Q1" and "Q2"
// may be added to supply a factorization B1 = B Q1, B2 = B Q2.
// Shape problems throw Error(Errc::validation); invariants are left to
// validate_model.
DetectionModel model_from_json(const nlohmann::json& j);
SensingModel sensing_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const DetectionModel& m);
nlohmann::json sensing_to_json(const SensingModel& sm);

// Throws Error(Errc::validation) on malformed JSON text.
nlohmann::json parse_json_text(const std::string& text);
nlohmann::json read_json_file(const std::string& path);

bool is_sensing_config(const nlohmann::json& j);

}  // namespace sqd
