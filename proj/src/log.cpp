#include "fracmix/log.hpp"

#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>

#include "fracmix/errors.hpp"

namespace fracmix {

spdlog::logger& log() {
    static std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto lg = std::make_shared<spdlog::logger>("fracmix", sink);
        lg->set_pattern("[%l] %v");
        lg->set_level(spdlog::level::warn);
        return lg;
    }();
    return *instance;
}

void set_log_level(std::string_view level) {
    spdlog::level::level_enum lv;
    if (level == "error") lv = spdlog::level::err;
    else if (level == "warn") lv = spdlog::level::warn;
    else if (level == "info") lv = spdlog::level::info;
    else if (level == "debug") lv = spdlog::level::debug;
    else fail(ErrorCode::InvalidArgument, "unknown log level '" + std::string(level) + "'");
    log().set_level(lv);
}

void configure_logging_from_env() {
    if (const char* v = std::getenv("FRACMIX_LOG"); v && *v) set_log_level(v);
}

}  // namespace fracmix
