#include "quip/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace quip::log {
namespace {

std::mutex g_mutex;
std::atomic<Level> g_min_level{Level::Info};

void stderr_sink(Level level, std::string_view message) {
  std::cerr << "[" << level_name(level) << "] " << message << '\n';
}

Sink& sink_ref() {
  static Sink sink = stderr_sink;
  return sink;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
  }
  return "?";
}

Sink set_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  Sink previous = std::move(sink_ref());
  sink_ref() = std::move(sink);
  return previous;
}

void set_min_level(Level level) { g_min_level = level; }

void write(Level level, std::string_view message) {
  if (level < g_min_level.load()) return;
  std::lock_guard lock(g_mutex);
  if (sink_ref()) sink_ref()(level, message);
}

Capture::Capture() {
  previous_ = set_sink([this](Level level, std::string_view message) {
    text_.append(level_name(level));
    text_.append(": ");
    text_.append(message);
    text_.push_back('\n');
  });
}

Capture::~Capture() { set_sink(std::move(previous_)); }

}  // namespace quip::log
