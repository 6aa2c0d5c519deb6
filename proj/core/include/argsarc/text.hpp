#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace argsarc::text {

// Word tokenizer used across the feature extractors and encoders.
// Word tokens are maximal runs of letters/digits with internal
// apostrophes ("don't" stays one token); each maximal run of one
// repeated punctuation character is a single token ("!!", "??");
// emoji and other astral-plane code points are single tokens.
std::vector<std::string> tokenize(std::string_view text, bool lowercase = true);

// Splits on {.?!} runs followed by whitespace (or end of text).
// Terminator punctuation stays attached to its sentence.
std::vector<std::string> split_sentences(std::string_view text);

std::string to_lower(std::string_view s);

// Collapses internal whitespace runs to single spaces and trims.
std::string normalize_whitespace(std::string_view s);

// Decodes one UTF-8 code point starting at s[i]; advances i past it.
// Malformed bytes decode as the byte value (never throws).
uint32_t decode_utf8(std::string_view s, size_t& i);

bool is_emoji(uint32_t cp);

// FNV-1a, used for run-manifest content ids.
uint64_t fnv1a(std::string_view data);

}  // namespace argsarc::text
