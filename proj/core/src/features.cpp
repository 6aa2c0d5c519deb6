#include "argsarc/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "argsarc/text.hpp"

namespace argsarc::features {

using nlohmann::json;

std::string feature_vector_to_json_line(const std::string& id, const FeatureVector& fv) {
    json j;
    j["id"] = id;
    j["features"] = json::object();
    for (const auto& [k, v] : fv.entries) j["features"][k] = v;
    return j.dump();
}

std::pair<std::string, FeatureVector> feature_vector_from_json_line(const std::string& line) {
    json j = json::parse(line);
    FeatureVector fv;
    for (auto it = j.at("features").begin(); it != j.at("features").end(); ++it) {
        fv.entries[it.key()] = it.value().get<double>();
    }
    return {j.at("id").get<std::string>(), fv};
}

NgramVocabulary build_ngram_vocabulary(const std::vector<std::string>& texts,
                                       const std::set<int>& orders) {
    NgramVocabulary vocab;
    for (const auto& t : texts) {
        auto toks = text::tokenize(t);
        for (int n : orders) {
            if (n < 1 || static_cast<size_t>(n) > toks.size()) continue;
            for (size_t i = 0; i + n <= toks.size(); ++i) {
                std::string gram = toks[i];
                for (int k = 1; k < n; ++k) gram += " " + toks[i + k];
                vocab.grams.insert(std::move(gram));
            }
        }
    }
    return vocab;
}

FeatureVector extract_ngrams(const std::string& input, const std::set<int>& orders,
                             const NgramVocabulary& vocab) {
    if (vocab.grams.empty()) {
        throw std::runtime_error("n-gram vocabulary is empty; build it from the train split");
    }
    FeatureVector fv;
    auto toks = text::tokenize(input);
    for (int n : orders) {
        if (n < 1 || static_cast<size_t>(n) > toks.size()) continue;
        for (size_t i = 0; i + n <= toks.size(); ++i) {
            std::string gram = toks[i];
            for (int k = 1; k < n; ++k) gram += " " + toks[i + k];
            if (vocab.grams.count(gram)) {
                fv.bump("argf:ngram:" + std::to_string(n) + ":" + gram);
            }
        }
    }
    return fv;
}

namespace {

std::unordered_set<std::string> to_set(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

}  // namespace

FeatureVector lexicon_features(const std::string& ct, const LexiconSet& lex) {
    FeatureVector fv;
    auto toks = text::tokenize(ct);
    auto agree = to_set(lex.agree_words);
    auto disagree = to_set(lex.disagree_words);
    auto hedges = to_set(lex.hedges);
    auto modals = to_set(lex.modals);
    auto pronouns = to_set(lex.pronouns);
    auto negation = to_set(lex.negation_cues);
    for (const auto& tok : toks) {
        if (agree.count(tok)) fv.bump("argf:agree_lexicon");
        if (disagree.count(tok)) fv.bump("argf:disagree_lexicon");
        auto sent = lex.sentiment.find(tok);
        if (sent != lex.sentiment.end()) {
            fv.bump(sent->second > 0 ? "argf:sent_pos" : "argf:sent_neg");
        }
        if (hedges.count(tok)) fv.bump("argf:hedge");
        auto marker = lex.discourse_markers.find(tok);
        if (marker != lex.discourse_markers.end()) {
            fv.bump("argf:discourse:" + tok);
        }
        if (modals.count(tok)) fv.bump("argf:modal:" + tok);
        if (pronouns.count(tok)) fv.bump("argf:pronoun:" + tok);
        if (negation.count(tok)) fv.bump("argf:negation");
    }
    return fv;
}

namespace {

const std::unordered_map<std::string, std::string>& irregular_verbs() {
    static const std::unordered_map<std::string, std::string> table = {
        {"ran", "run"},     {"run", "run"},     {"running", "run"},
        {"was", "be"},      {"were", "be"},     {"been", "be"},
        {"is", "be"},       {"are", "be"},      {"am", "be"},
        {"went", "go"},     {"gone", "go"},     {"goes", "go"},
        {"said", "say"},    {"says", "say"},    {"saw", "see"},
        {"seen", "see"},    {"did", "do"},      {"does", "do"},
        {"done", "do"},     {"had", "have"},    {"has", "have"},
        {"made", "make"},   {"took", "take"},   {"taken", "take"},
        {"thought", "think"}, {"told", "tell"}, {"came", "come"},
        {"knew", "know"},   {"known", "know"},  {"got", "get"},
        {"gave", "give"},   {"given", "give"},  {"found", "find"},
        {"wrote", "write"}, {"written", "write"}, {"spoke", "speak"},
        {"meant", "mean"},  {"kept", "keep"},   {"felt", "feel"},
        {"left", "leave"},  {"held", "hold"},   {"stood", "stand"},
        {"lost", "lose"},   {"paid", "pay"},    {"met", "meet"},
        {"sat", "sit"},     {"read", "read"},   {"put", "put"},
    };
    return table;
}

const std::unordered_set<std::string>& common_verbs() {
    static const std::unordered_set<std::string> table = {
        "run",  "be",    "go",    "say",   "see",   "do",     "have",
        "make", "take",  "think", "tell",  "come",  "know",   "get",
        "give", "find",  "write", "speak", "mean",  "keep",   "feel",
        "leave","hold",  "stand", "lose",  "pay",   "meet",   "sit",
        "read", "put",   "agree", "disagree", "believe", "want",
        "need", "argue", "claim", "prove", "deny",  "accept", "reject",
        "talk", "walk",  "look",  "ask",   "use",   "try",    "call",
        "work", "seem",  "help",  "show",  "hear",  "play",   "move",
        "live", "happen","vote",  "support",
    };
    return table;
}

const std::unordered_set<std::string>& function_words() {
    static const std::unordered_set<std::string> table = {
        "the", "a",  "an",  "and", "or",  "but",  "of",   "to",  "in",
        "on",  "at", "by",  "for", "with","from", "as",   "that","this",
        "it",  "i",  "you", "he",  "she", "we",   "they", "my",  "your",
        "his", "her","its", "our", "their","not", "no",   "so",  "if",
        "then","than","too","very","just","there","here", "when","what",
        "who", "how","why", "all", "any", "some", "can",  "could","may",
        "might","must","shall","should","will","would","is","are","was",
        "were","been","being","am","do","does","did","have","has","had",
    };
    return table;
}

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

std::vector<LemmaTag> HeuristicLemmatizer::analyze(const std::string& input) const {
    std::vector<LemmaTag> out;
    for (const auto& tok : text::tokenize(input)) {
        if (tok.empty() || !std::isalpha(static_cast<unsigned char>(tok[0]))) continue;
        const auto& irr = irregular_verbs();
        auto it = irr.find(tok);
        if (it != irr.end()) {
            out.push_back({it->second, Pos::Verb});
            continue;
        }
        if (function_words().count(tok)) {
            out.push_back({tok, Pos::Other});
            continue;
        }
        std::string lemma = tok;
        Pos pos = Pos::Noun;
        if (has_suffix(tok, "ing") && tok.size() > 5) {
            lemma = tok.substr(0, tok.size() - 3);
            pos = Pos::Verb;
        } else if (has_suffix(tok, "ed") && tok.size() > 4) {
            lemma = tok.substr(0, tok.size() - 2);
            pos = Pos::Verb;
        } else if (has_suffix(tok, "ies")) {
            lemma = tok.substr(0, tok.size() - 3) + "y";
        } else if (has_suffix(tok, "es") && tok.size() > 4) {
            lemma = tok.substr(0, tok.size() - 2);
        } else if (has_suffix(tok, "s") && tok.size() > 3 && !has_suffix(tok, "ss")) {
            lemma = tok.substr(0, tok.size() - 1);
        }
        if (common_verbs().count(lemma)) {
            pos = Pos::Verb;
        } else if (has_suffix(lemma, "ous") || has_suffix(lemma, "ful") ||
                   has_suffix(lemma, "ive") || has_suffix(lemma, "able") ||
                   has_suffix(lemma, "ible") || has_suffix(lemma, "al") ||
                   has_suffix(lemma, "ic") || has_suffix(lemma, "less")) {
            pos = Pos::Adjective;
        }
        out.push_back({lemma, pos});
    }
    return out;
}

FeatureVector lemma_overlap(const std::string& pt, const std::string& ct,
                            const PosLemmatizer& analyzer,
                            std::vector<std::string>* warnings) {
    FeatureVector fv;
    std::vector<LemmaTag> lt_pt, lt_ct;
    try {
        lt_pt = analyzer.analyze(pt);
        lt_ct = analyzer.analyze(ct);
    } catch (const std::exception& e) {
        if (warnings) warnings->push_back(std::string("lemma_overlap: tagger failed: ") + e.what());
        return fv;
    }
    auto types = [](const std::vector<LemmaTag>& tags, Pos pos) {
        std::unordered_set<std::string> s;
        for (const auto& t : tags) {
            if (t.pos == pos) s.insert(t.lemma);
        }
        return s;
    };
    const std::array<std::pair<Pos, const char*>, 3> kinds = {{
        {Pos::Noun, "argf:noun_overlap"},
        {Pos::Verb, "argf:verb_overlap"},
        {Pos::Adjective, "argf:adj_overlap"},
    }};
    for (const auto& [pos, name] : kinds) {
        auto a = types(lt_pt, pos);
        auto b = types(lt_ct, pos);
        int overlap = 0;
        for (const auto& l : a) overlap += b.count(l) ? 1 : 0;
        fv.bump(name, overlap);
    }
    return fv;
}

FeatureVector entailment_feature(const std::string& pt, const std::string& ct,
                                 const EntailmentScorer& scorer,
                                 std::vector<std::string>* warnings) {
    FeatureVector fv;
    try {
        fv.entries["argf:entailment"] = scorer.score(pt, ct);
    } catch (const std::exception& e) {
        if (warnings) warnings->push_back(std::string("entailment: scorer failed: ") + e.what());
    }
    return fv;
}

FeatureVector sentiment_incongruity(const std::string& pt, const std::string& ct,
                                    const std::map<std::string, int>& sentiment) {
    FeatureVector fv;
    int flips = 0;
    int prev = 0;
    auto walk = [&](const std::string& turn, const char* pos_name, const char* neg_name) {
        int pos = 0, neg = 0;
        for (const auto& tok : text::tokenize(turn)) {
            auto it = sentiment.find(tok);
            if (it == sentiment.end()) continue;
            int polarity = it->second;
            if (polarity > 0) ++pos; else ++neg;
            if (prev != 0 && polarity != prev) ++flips;
            prev = polarity;
        }
        fv.bump(pos_name, pos);
        fv.bump(neg_name, neg);
    };
    walk(pt, "sarcf:pos_pt", "sarcf:neg_pt");
    walk(ct, "sarcf:pos_ct", "sarcf:neg_ct");
    fv.bump("sarcf:incongruity_flips", flips);
    return fv;
}

namespace {

bool is_all_caps(const std::string& tok) {
    if (tok.size() < 2) return false;
    bool has_letter = false;
    for (unsigned char c : tok) {
        if (std::isalpha(c)) {
            has_letter = true;
            if (!std::isupper(c)) return false;
        }
    }
    return has_letter;
}

int count_emoticons(const std::string& s) {
    static const std::array<const char*, 12> patterns = {
        ":)", ":(", ":D", ":P", ";)", ":-)", ":-(", ":-D", ":'(", "xD", ":/", ":|"};
    int count = 0;
    for (const char* p : patterns) {
        size_t pos = 0;
        std::string pat(p);
        while ((pos = s.find(pat, pos)) != std::string::npos) {
            ++count;
            pos += pat.size();
        }
    }
    return count;
}

}  // namespace

FeatureVector sarcasm_markers(const std::string& ct, const LexiconSet& lex) {
    FeatureVector fv;
    auto raw_toks = text::tokenize(ct, /*lowercase=*/false);
    auto toks = text::tokenize(ct);
    auto interjections = to_set(lex.interjections);
    auto hyperbole = to_set(lex.hyperbole);

    for (const auto& tok : raw_toks) {
        if (is_all_caps(tok)) fv.bump("sarcf:allcaps");
    }

    int quote_chars = static_cast<int>(std::count(ct.begin(), ct.end(), '"'));
    fv.bump("sarcf:quoted_spans", quote_chars / 2);

    // punctuation runs over {?, !}
    size_t i = 0;
    int exclaim_total = 0;
    while (i < ct.size()) {
        char c = ct[i];
        if (c == '?' || c == '!') {
            size_t j = i;
            bool mixed = false;
            while (j < ct.size() && (ct[j] == '?' || ct[j] == '!')) {
                if (ct[j] != c) mixed = true;
                if (ct[j] == '!') ++exclaim_total;
                ++j;
            }
            size_t len = j - i;
            if (len >= 2) {
                if (mixed) fv.bump("sarcf:multi_mixed");
                else if (c == '?') fv.bump("sarcf:multi_question");
                else fv.bump("sarcf:multi_exclaim");
            }
            i = j;
        } else {
            ++i;
        }
    }
    fv.bump("sarcf:exclamation", exclaim_total);

    std::string joined;
    for (const auto& t : toks) {
        if (!joined.empty()) joined += " ";
        joined += t;
    }
    for (const auto& pattern : lex.tag_question_patterns) {
        size_t pos = 0;
        while ((pos = joined.find(pattern, pos)) != std::string::npos) {
            bool at_start = pos == 0 || joined[pos - 1] == ' ';
            size_t end = pos + pattern.size();
            bool at_end = end == joined.size() || joined[end] == ' ';
            if (at_start && at_end) fv.bump("sarcf:tag_question");
            pos = end;
        }
    }

    for (const auto& tok : toks) {
        if (interjections.count(tok)) fv.bump("sarcf:interjection");
        if (hyperbole.count(tok)) fv.bump("sarcf:hyperbole");
    }

    fv.bump("sarcf:emoticon", count_emoticons(ct));
    int emoji = 0;
    size_t k = 0;
    while (k < ct.size()) {
        uint32_t cp = text::decode_utf8(ct, k);
        if (text::is_emoji(cp)) ++emoji;
    }
    fv.bump("sarcf:emoji", emoji);
    return fv;
}

FeatureVector category_lexicon_features(
    const std::string& ct,
    const std::map<std::string, std::vector<std::string>>& category_lexicon) {
    FeatureVector fv;
    auto toks = text::tokenize(ct);
    if (toks.empty() || category_lexicon.empty()) return fv;
    double n = static_cast<double>(toks.size());
    for (const auto& [category, word_list] : category_lexicon) {
        auto word_set = to_set(word_list);
        int hits = 0;
        for (const auto& tok : toks) hits += word_set.count(tok) ? 1 : 0;
        if (hits > 0) fv.entries["sarcf:liwc:" + category] = hits / n;
    }
    return fv;
}

FeatureVector Extractor::compose(const corpus::TurnPair& pair, FeatureMode mode,
                                 std::vector<std::string>* warnings) const {
    FeatureVector fv;
    if (use_ngrams && !vocabulary.grams.empty()) {
        fv.merge(extract_ngrams(pair.current_turn, ngram_orders, vocabulary));
    }
    fv.merge(lexicon_features(pair.current_turn, lexicons));
    fv.merge(lemma_overlap(pair.prior_turn, pair.current_turn, *lemmatizer, warnings));
    fv.merge(entailment_feature(pair.prior_turn, pair.current_turn, *entailment, warnings));
    if (mode == FeatureMode::ArgFSarcF) {
        if (!lexicons.category_lexicon.empty()) {
            fv.merge(category_lexicon_features(pair.current_turn, lexicons.category_lexicon));
        } else if (warnings) {
            warnings->push_back("no category lexicon loaded; sarcf category features skipped");
        }
        fv.merge(sentiment_incongruity(pair.prior_turn, pair.current_turn, lexicons.sentiment));
        fv.merge(sarcasm_markers(pair.current_turn, lexicons));
    }
    return fv;
}

}  // namespace argsarc::features
