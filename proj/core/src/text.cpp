#include "argsarc/text.hpp"

#include <cctype>

namespace argsarc::text {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0; }

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

uint32_t decode_utf8(std::string_view s, size_t& i) {
    unsigned char c = s[i];
    size_t extra = 0;
    uint32_t cp = c;
    if ((c & 0x80u) == 0) {
        extra = 0;
    } else if ((c & 0xE0u) == 0xC0u) {
        extra = 1;
        cp = c & 0x1Fu;
    } else if ((c & 0xF0u) == 0xE0u) {
        extra = 2;
        cp = c & 0x0Fu;
    } else if ((c & 0xF8u) == 0xF0u) {
        extra = 3;
        cp = c & 0x07u;
    } else {
        ++i;
        return c;
    }
    if (i + extra >= s.size()) {
        ++i;
        return c;
    }
    for (size_t k = 1; k <= extra; ++k) {
        unsigned char cont = s[i + k];
        if ((cont & 0xC0u) != 0x80u) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cont & 0x3Fu);
    }
    i += extra + 1;
    return cp;
}

bool is_emoji(uint32_t cp) {
    return (cp >= 0x1F000 && cp <= 0x1FAFF) ||  // emoji blocks
           (cp >= 0x2600 && cp <= 0x27BF) ||    // misc symbols, dingbats
           (cp >= 0x2190 && cp <= 0x21FF && cp != 0x2212) ||
           cp == 0xFE0F;                        // variation selector
}

std::vector<std::string> tokenize(std::string_view textv, bool lowercase) {
    std::vector<std::string> tokens;
    size_t i = 0;
    const size_t n = textv.size();
    while (i < n) {
        unsigned char c = textv[i];
        if (c < 0x80) {
            if (is_space_byte(c)) {
                ++i;
                continue;
            }
            if (is_word_byte(c)) {
                std::string tok;
                while (i < n) {
                    unsigned char w = textv[i];
                    if (w < 0x80 && is_word_byte(w)) {
                        tok.push_back(lowercase ? static_cast<char>(std::tolower(w))
                                                : static_cast<char>(w));
                        ++i;
                    } else if (w == '\'' && i + 1 < n &&
                               static_cast<unsigned char>(textv[i + 1]) < 0x80 &&
                               is_word_byte(textv[i + 1])) {
                        tok.push_back('\'');
                        ++i;
                    } else {
                        break;
                    }
                }
                tokens.push_back(std::move(tok));
                continue;
            }
            // run of one repeated punctuation char
            std::string tok(1, static_cast<char>(c));
            ++i;
            while (i < n && static_cast<unsigned char>(textv[i]) == c) {
                tok.push_back(static_cast<char>(c));
                ++i;
            }
            tokens.push_back(std::move(tok));
            continue;
        }
        size_t start = i;
        uint32_t cp = decode_utf8(textv, i);
        std::string raw(textv.substr(start, i - start));
        if (is_emoji(cp)) {
            tokens.push_back(std::move(raw));
        } else {
            // treat non-ASCII letters as word material
            std::string tok = std::move(raw);
            while (i < n) {
                unsigned char w = textv[i];
                if (w < 0x80) {
                    if (!is_word_byte(w)) break;
                    tok.push_back(lowercase ? static_cast<char>(std::tolower(w))
                                            : static_cast<char>(w));
                    ++i;
                } else {
                    size_t s2 = i;
                    uint32_t cp2 = decode_utf8(textv, i);
                    if (is_emoji(cp2)) {
                        i = s2;
                        break;
                    }
                    tok.append(textv.substr(s2, i - s2));
                }
            }
            tokens.push_back(std::move(tok));
        }
    }
    return tokens;
}

std::vector<std::string> split_sentences(std::string_view textv) {
    std::vector<std::string> sentences;
    std::string cur;
    size_t i = 0;
    const size_t n = textv.size();
    auto flush = [&] {
        std::string trimmed = normalize_whitespace(cur);
        if (!trimmed.empty()) sentences.push_back(std::move(trimmed));
        cur.clear();
    };
    while (i < n) {
        char c = textv[i];
        cur.push_back(c);
        if (c == '.' || c == '?' || c == '!') {
            size_t j = i + 1;
            while (j < n && (textv[j] == '.' || textv[j] == '?' || textv[j] == '!')) {
                cur.push_back(textv[j]);
                ++j;
            }
            if (j >= n || is_space_byte(textv[j])) {
                flush();
            }
            i = j;
        } else {
            ++i;
        }
    }
    flush();
    return sentences;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;
    for (char c : s) {
        if (is_space_byte(static_cast<unsigned char>(c))) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_space = false;
        }
    }
    return out;
}

uint64_t fnv1a(std::string_view data) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace argsarc::text
