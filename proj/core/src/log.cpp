#include "jolopt/log.hpp"

#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace jolopt::log {
namespace {

bool apply_env_level(spdlog::logger& lg) {
  const char* env = std::getenv("JOLOPT_LOG");
  if (env == nullptr) return true;
  const std::string level(env);
  if (level == "error") lg.set_level(spdlog::level::err);
  else if (level == "warn") lg.set_level(spdlog::level::warn);
  else if (level == "info") lg.set_level(spdlog::level::info);
  else if (level == "debug") lg.set_level(spdlog::level::debug);
  else return false;
  return true;
}

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto lg = spdlog::stderr_color_mt("jolopt");
    lg->set_pattern("[%l] %v");
    lg->set_level(spdlog::level::warn);
    apply_env_level(*lg);
    return lg;
  }();
  return *instance;
}

}  // namespace

void warn(std::string_view message) { logger().warn("{}", message); }
void info(std::string_view message) { logger().info("{}", message); }
void debug(std::string_view message) { logger().debug("{}", message); }

bool configure_from_env() { return apply_env_level(logger()); }

}  // namespace jolopt::log
