#pragma once

#include <string_view>

namespace jolopt::log {

// Thin wrappers over spdlog so that public headers stay free of it. The level
// is read once from JOLOPT_LOG (error|warn|info|debug, default warn).
void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

/// Re-read JOLOPT_LOG; returns false if the value is not a known level.
bool configure_from_env();

}  // namespace jolopt::log
