#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mfc/scenario.hpp"

namespace mfc {

/// Names of the built-in scenarios, in display order.
std::vector<std::string> preset_names();

/// Built-in scenario by name; throws ConfigError for an unknown name.
Scenario preset(std::string_view name);

}  // namespace mfc
