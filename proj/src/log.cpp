#include "mchain/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mchain::log {
namespace {
std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;
}  // namespace

void set_level(Level l) { g_level.store(l); }
Level level() { return g_level.load(); }

void warn(std::string_view msg) {
  if (g_level.load() < Level::warn) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[warn] " << msg << '\n';
}

void info(std::string_view msg) {
  if (g_level.load() < Level::info) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[info] " << msg << '\n';
}

}  // namespace mchain::log
