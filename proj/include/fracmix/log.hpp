#pragma once

#include <string_view>

#include <spdlog/spdlog.h>

namespace fracmix {

/// Library logger; writes to stderr, default level warn.
spdlog::logger& log();

/// Accepts error, warn, info, debug. Throws InvalidArgument otherwise.
void set_log_level(std::string_view level);
/// Applies FRACMIX_LOG when set.
void configure_logging_from_env();

}  // namespace fracmix
