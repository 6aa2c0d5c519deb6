#include "argsarc/lexicons.hpp"

#include <fstream>
#include <stdexcept>

#include "argsarc/text.hpp"

namespace argsarc::features {

namespace {

std::vector<std::string> words(std::initializer_list<const char*> list) {
    return {list.begin(), list.end()};
}

DiscourseRelation relation_from_string(const std::string& s) {
    if (s == "comparison") return DiscourseRelation::Comparison;
    if (s == "contingency") return DiscourseRelation::Contingency;
    if (s == "expansion") return DiscourseRelation::Expansion;
    if (s == "temporal") return DiscourseRelation::Temporal;
    throw std::runtime_error("unknown discourse relation '" + s + "'");
}

}  // namespace

LexiconSet default_lexicons() {
    LexiconSet lex;
    lex.agree_words = words({
        "agree", "agreed", "accord", "concur", "consent", "accept", "approve",
        "support", "endorse", "affirm", "acknowledge", "grant", "concede",
        "second", "confirm", "assent", "yes", "yeah", "exactly", "right"});
    lex.disagree_words = words({
        "disagree", "differ", "oppose", "object", "dispute", "deny", "reject",
        "refute", "contradict", "dissent", "contest", "counter", "rebut",
        "no", "nope", "wrong", "false", "incorrect", "nonsense", "disapprove"});
    for (const auto& w : words({
             "good", "great", "wonderful", "excellent", "amazing", "love",
             "nice", "best", "happy", "beautiful", "awesome", "brilliant",
             "fantastic", "perfect", "fine", "superb", "positive", "clever",
             "smart", "helpful"})) {
        lex.sentiment[w] = 1;
    }
    for (const auto& w : words({
             "bad", "terrible", "awful", "horrible", "hate", "worst", "stupid",
             "ugly", "wrong", "poor", "dumb", "pathetic", "ridiculous",
             "nasty", "lousy", "negative", "ignorant", "foolish", "absurd",
             "disgusting"})) {
        lex.sentiment[w] = -1;
    }
    lex.hedges = words({
        "maybe", "perhaps", "possibly", "probably", "somewhat", "apparently",
        "seemingly", "arguably", "presumably", "roughly", "sort", "kind",
        "likely", "generally", "usually", "almost", "rather", "fairly"});
    // PDTB-style marker list; temporal markers live only in external
    // files and are filtered on load.
    for (const auto& m : words({"but", "however", "although", "though",
                                "whereas", "instead", "nevertheless",
                                "nonetheless", "conversely", "yet"})) {
        lex.discourse_markers[m] = DiscourseRelation::Comparison;
    }
    for (const auto& m : words({"because", "so", "therefore", "thus", "hence",
                                "consequently", "since", "if", "unless"})) {
        lex.discourse_markers[m] = DiscourseRelation::Contingency;
    }
    for (const auto& m : words({"and", "also", "furthermore", "moreover",
                                "for", "particularly", "incidentally",
                                "additionally", "besides", "indeed"})) {
        lex.discourse_markers[m] = DiscourseRelation::Expansion;
    }
    lex.modals = words({"can", "could", "may", "might", "must", "shall",
                        "should", "will", "would", "ought"});
    lex.pronouns = words({"i", "me", "my", "mine", "you", "your", "yours",
                          "we", "us", "our", "ours", "he", "she", "it",
                          "they", "them", "their", "theirs"});
    lex.negation_cues = words({"not", "don't", "no", "never", "nothing",
                               "none", "neither", "nor", "cannot", "can't",
                               "won't", "didn't", "doesn't", "isn't",
                               "aren't", "wasn't", "wouldn't", "shouldn't"});
    lex.interjections = words({"oops", "wow", "gee", "oh", "ah", "huh",
                               "ya", "yeah", "aha", "hmm", "ugh", "duh",
                               "so", "agreed", "absolutely", "well"});
    lex.hyperbole = words({"wonderful", "nonsense", "biased", "hypocrite",
                           "lunatic", "terrible", "amazing", "incredible",
                           "unbelievable", "absolutely", "totally", "always",
                           "never", "everyone", "nobody", "insane"});
    lex.tag_question_patterns = words({"are you", "do you", "don't you",
                                       "aren't you", "isn't it", "is it",
                                       "did you", "will you", "were i",
                                       "will i", "right ?"});
    return lex;
}

std::vector<std::string> load_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        std::string word = tab == std::string::npos ? line : line.substr(0, tab);
        word = text::normalize_whitespace(text::to_lower(word));
        if (!word.empty()) out.push_back(word);
    }
    return out;
}

std::map<std::string, int> load_sentiment_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sentiment lexicon: " + path);
    std::map<std::string, int> out;
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string word = text::to_lower(line.substr(0, tab));
        std::string tag = text::normalize_whitespace(text::to_lower(line.substr(tab + 1)));
        if (tag == "pos" || tag == "positive" || tag == "+1") out[word] = 1;
        else if (tag == "neg" || tag == "negative" || tag == "-1") out[word] = -1;
        else throw std::runtime_error("bad polarity tag '" + tag + "' in " + path);
    }
    return out;
}

std::map<std::string, DiscourseRelation> load_discourse_markers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open marker file: " + path);
    std::map<std::string, DiscourseRelation> out;
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string marker = text::to_lower(line.substr(0, tab));
        DiscourseRelation rel =
            relation_from_string(text::normalize_whitespace(text::to_lower(line.substr(tab + 1))));
        if (rel == DiscourseRelation::Temporal) continue;
        out[marker] = rel;
    }
    return out;
}

std::map<std::string, std::vector<std::string>> load_category_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open category lexicon: " + path);
    std::map<std::string, std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string cat = text::normalize_whitespace(text::to_lower(line.substr(0, tab)));
        std::string word = text::normalize_whitespace(text::to_lower(line.substr(tab + 1)));
        if (!cat.empty() && !word.empty()) out[cat].push_back(word);
    }
    return out;
}

}  // namespace argsarc::features
