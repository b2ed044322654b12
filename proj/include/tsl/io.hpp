#pragma once

#include <string>

#include <json.hpp>

#include "tsl/field.hpp"

namespace tsl {

// Flat binary field container ("TSLF"): magic, version u32, d, N, c as u32,
// then little-endian float64 re/im coefficient pairs in row-major k order,
// component by component. A JSON sidecar <path>.json carries metadata.
void save_field(const std::string& path, const SpectralField& f,
                const nlohmann::json& meta = nlohmann::json::object());

SpectralField load_field(const std::string& path);

nlohmann::json load_sidecar(const std::string& path);

}  // namespace tsl
