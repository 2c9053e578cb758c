#include "plg/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace plg::log {

namespace {

spdlog::logger& logger() {
    static auto instance = [] {
        auto l = spdlog::stderr_color_mt("plg");
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::warn);
        return l;
    }();
    return *instance;
}

}  // namespace

void info(std::string_view msg) { logger().info("{}", msg); }
void warn(std::string_view msg) { logger().warn("{}", msg); }
void debug(std::string_view msg) { logger().debug("{}", msg); }

void set_level(int level) {
    static constexpr spdlog::level::level_enum levels[] = {
        spdlog::level::debug, spdlog::level::info, spdlog::level::warn, spdlog::level::off};
    logger().set_level(levels[level < 0 ? 0 : (level > 3 ? 3 : level)]);
}

}  // namespace plg::log
