#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 handling for the bilingual text paths. Invalid sequences
// decode to U+FFFD one byte at a time so tokenization never throws.
namespace quip::utf8 {

std::vector<char32_t> decode(std::string_view text);
void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

bool is_cjk(char32_t cp);
// Letters and digits in the scripts we care about (Latin, Greek, Cyrillic,
// Hangul, CJK). Everything else (punctuation, symbols, emoji, spaces) separates words.
bool is_word_char(char32_t cp);
bool is_space(char32_t cp);

// Fullwidth ASCII (U+FF01..U+FF5E) and the ideographic space fold to ASCII.
char32_t fold_width(char32_t cp);
// Simple case folding: ASCII, Latin-1, Latin Extended-A pairs, Greek, Cyrillic.
char32_t to_lower(char32_t cp);

// fold_width + to_lower over the whole string.
std::string normalize(std::string_view text);

std::string trim(std::string_view text);
// Number of code points that are not whitespace.
std::size_t count_non_space(std::string_view text);
// Whitespace-delimited word count.
std::size_t count_words(std::string_view text);

}  // namespace quip::utf8
