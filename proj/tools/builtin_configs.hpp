#pragma once

#include <map>
#include <string>

namespace uscqed::cli {

/// Figure id -> TOML text of the bundled reproduction configs (configs/*.toml).
const std::map<std::string, std::string>& builtin_configs();

}  // namespace uscqed::cli
