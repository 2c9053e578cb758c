#pragma once

#include <string_view>

namespace plg::log {

// Thin wrapper so callers do not depend on the logging backend.
void info(std::string_view msg);
void warn(std::string_view msg);
void debug(std::string_view msg);

/// 0 = debug, 1 = info, 2 = warn, 3 = off
void set_level(int level);

}  // namespace plg::log
