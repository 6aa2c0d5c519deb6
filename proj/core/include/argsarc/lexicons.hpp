#pragma once

#include <map>
#include <string>
#include <vector>

namespace argsarc::features {

// Relation class of a discourse marker. Temporal markers are filtered
// out when a marker file is loaded.
enum class DiscourseRelation { Comparison, Contingency, Expansion, Temporal };

struct LexiconSet {
    std::vector<std::string> agree_words;     // 20 entries in the bundle
    std::vector<std::string> disagree_words;  // 20 entries in the bundle
    std::map<std::string, int> sentiment;     // word -> +1 / -1
    std::vector<std::string> hedges;
    std::map<std::string, DiscourseRelation> discourse_markers;  // temporal excluded
    std::vector<std::string> modals;
    std::vector<std::string> pronouns;
    std::vector<std::string> negation_cues;
    std::vector<std::string> interjections;
    std::vector<std::string> hyperbole;
    std::vector<std::string> tag_question_patterns;  // two-word openers
    std::map<std::string, std::vector<std::string>> category_lexicon;

    std::vector<std::string> warnings;
};

// Built-in word lists, lowercase, seeded from common usage.
LexiconSet default_lexicons();

// One entry per line, "word" or "word<TAB>tag". Lines are lowercased.
std::vector<std::string> load_word_list(const std::string& path);

// "word<TAB>pos|neg" lines.
std::map<std::string, int> load_sentiment_lexicon(const std::string& path);

// "marker<TAB>relation" lines; temporal-relation markers are dropped.
std::map<std::string, DiscourseRelation> load_discourse_markers(const std::string& path);

// "category<TAB>word" lines.
std::map<std::string, std::vector<std::string>> load_category_lexicon(const std::string& path);

}  // namespace argsarc::features
