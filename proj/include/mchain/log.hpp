#pragma once

#include <string_view>

namespace mchain::log {

enum class Level { quiet = 0, warn = 1, info = 2 };

void set_level(Level level);
Level level();

void warn(std::string_view msg);
void info(std::string_view msg);

}  // namespace mchain::log
