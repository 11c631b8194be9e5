#pragma once

#include <string>

#include <json.hpp>

#include "hypowave/gevrey.hpp"

namespace hypowave::io {

// {"group":"su2","lmax2":n,"coeffs":{"<2l>":[[[re,im],...],...]}}
// {"group":"heis","trunc":N,"lambdas":[...],"coeffs":[[[[re,im],...],...],...]}
SpectralField field_from_json(const nlohmann::json& j);
nlohmann::json field_to_json(const SpectralField& f);

SpectralField load_field(const std::string& path);
void save_field(const std::string& path, const SpectralField& f);

}  // namespace hypowave::io
