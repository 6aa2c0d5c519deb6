#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "argsarc/corpus.hpp"
#include "argsarc/lexicons.hpp"

namespace argsarc::features {

// Sparse named-feature map. Absent names are implicit zeros.
// ArgF extractors emit only "argf:"-prefixed names, SarcF only "sarcf:".
struct FeatureVector {
    std::map<std::string, double> entries;

    double get(const std::string& name) const {
        auto it = entries.find(name);
        return it == entries.end() ? 0.0 : it->second;
    }
    void bump(const std::string& name, double v = 1.0) {
        if (v != 0.0) entries[name] += v;
    }
    void merge(const FeatureVector& other) {
        for (const auto& [k, v] : other.entries) entries[k] += v;
    }
};

std::string feature_vector_to_json_line(const std::string& id, const FeatureVector& fv);
std::pair<std::string, FeatureVector> feature_vector_from_json_line(const std::string& line);

// ---- ArgF extractors -------------------------------------------------

// Token n-gram vocabulary, built from the training split only.
struct NgramVocabulary {
    std::set<std::string> grams;  // space-joined token n-grams
};

NgramVocabulary build_ngram_vocabulary(const std::vector<std::string>& texts,
                                       const std::set<int>& orders);

// Counts of in-vocabulary n-grams; OOV n-grams are ignored.
FeatureVector extract_ngrams(const std::string& text, const std::set<int>& orders,
                             const NgramVocabulary& vocab);

// Agree/disagree lexicon hits, sentiment word counts, hedges, discourse
// markers (non-temporal), modal verbs, pronouns, negation cues.
FeatureVector lexicon_features(const std::string& ct, const LexiconSet& lex);

enum class Pos { Noun, Verb, Adjective, Other };

struct LemmaTag {
    std::string lemma;
    Pos pos;
};

// Pluggable POS tagger + lemmatizer.
class PosLemmatizer {
public:
    virtual ~PosLemmatizer() = default;
    virtual std::vector<LemmaTag> analyze(const std::string& text) const = 0;
};

// Default rule-based analyzer: small irregular-verb and common-word
// tables plus suffix heuristics. An approximation; swap in a real
// tagger for full-scale runs.
class HeuristicLemmatizer : public PosLemmatizer {
public:
    std::vector<LemmaTag> analyze(const std::string& text) const override;
};

// Overlapping noun/verb/adjective lemma types between pt and ct.
FeatureVector lemma_overlap(const std::string& pt, const std::string& ct,
                            const PosLemmatizer& analyzer,
                            std::vector<std::string>* warnings = nullptr);

class EntailmentScorer {
public:
    virtual ~EntailmentScorer() = default;
    // score in [0,1]; deterministic for fixed inputs
    virtual double score(const std::string& premise, const std::string& hypothesis) const = 0;
};

class NullEntailmentScorer : public EntailmentScorer {
public:
    double score(const std::string&, const std::string&) const override { return 0.5; }
};

FeatureVector entailment_feature(const std::string& pt, const std::string& ct,
                                 const EntailmentScorer& scorer,
                                 std::vector<std::string>* warnings = nullptr);

// ---- SarcF extractors ------------------------------------------------

// Polarity-flip count over the concatenated pt||ct token sequence
// (neutral tokens skipped) plus per-turn positive/negative counts.
FeatureVector sentiment_incongruity(const std::string& pt, const std::string& ct,
                                    const std::map<std::string, int>& sentiment);

// Surface sarcasm markers on the current turn: ALL-CAPS words, quoted
// spans, repeated punctuation, exclamations, tag questions,
// interjections, hyperbole, emoticons and emoji.
FeatureVector sarcasm_markers(const std::string& ct, const LexiconSet& lex);

// Per-category match counts normalized by token count.
FeatureVector category_lexicon_features(
    const std::string& ct,
    const std::map<std::string, std::vector<std::string>>& category_lexicon);

// ---- Composition -----------------------------------------------------

enum class FeatureMode { ArgF, ArgFSarcF };

struct Extractor {
    LexiconSet lexicons = default_lexicons();
    std::set<int> ngram_orders = {1, 2, 3};
    NgramVocabulary vocabulary;
    bool use_ngrams = true;
    std::shared_ptr<const PosLemmatizer> lemmatizer = std::make_shared<HeuristicLemmatizer>();
    std::shared_ptr<const EntailmentScorer> entailment = std::make_shared<NullEntailmentScorer>();

    // Union of the selected namespaces. All features come from the
    // current turn except entailment, lemma overlap, and incongruity,
    // which read both turns.
    FeatureVector compose(const corpus::TurnPair& pair, FeatureMode mode,
                          std::vector<std::string>* warnings = nullptr) const;
};

}  // namespace argsarc::features
