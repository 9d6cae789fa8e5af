#pragma once

#include <cstddef>

namespace quip {

// Sampling settings passed verbatim to the generation client.
struct GenerationConfig {
  double temperature = 0.75;
  double top_p = 0.9;
  double repetition_penalty = 1.1;
  std::size_t max_tokens = 128;

  // Throws ConfigError unless temperature > 0, top_p in (0, 1],
  // repetition_penalty >= 1 and max_tokens > 0.
  void validate() const;
  bool operator==(const GenerationConfig&) const = default;
};

}  // namespace quip
