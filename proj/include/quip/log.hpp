#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <string_view>

namespace quip::log {

enum class Level { Debug, Info, Warn, Error };

using Sink = std::function<void(Level, std::string_view)>;

// Replaces the process-wide sink and returns the previous one. The default
// sink writes Info and above to stderr.
Sink set_sink(Sink sink);
void set_min_level(Level level);
void write(Level level, std::string_view message);

std::string_view level_name(Level level);

template <typename... Args>
void emit(Level level, const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}

template <typename... Args> void debug(const Args&... a) { emit(Level::Debug, a...); }
template <typename... Args> void info(const Args&... a) { emit(Level::Info, a...); }
template <typename... Args> void warn(const Args&... a) { emit(Level::Warn, a...); }
template <typename... Args> void error(const Args&... a) { emit(Level::Error, a...); }

// Captures everything logged while alive. Used by tests and by the CLI audit trail.
class Capture {
 public:
  Capture();
  ~Capture();
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  const std::string& text() const { return text_; }

 private:
  std::string text_;
  Sink previous_;
};

}  // namespace quip::log
