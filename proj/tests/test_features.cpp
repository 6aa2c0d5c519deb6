#include <doctest.h>

#include "argsarc/features.hpp"
#include "fixtures.hpp"

using namespace argsarc;
using features::FeatureVector;

TEST_CASE("ngram vocabulary comes from training texts only") {
    auto vocab = features::build_ngram_vocabulary(
        {"the cat sat", "the dog sat"}, {1, 2});
    CHECK(vocab.grams.count("the"));
    CHECK(vocab.grams.count("the cat"));
    CHECK(vocab.grams.count("dog sat"));
    CHECK(!vocab.grams.count("the bird"));

    auto fv = features::extract_ngrams("the cat sat on the cat", {1, 2}, vocab);
    CHECK(fv.get("argf:ngram:1:the") == 2.0);
    CHECK(fv.get("argf:ngram:2:the cat") == 2.0);
    CHECK(fv.get("argf:ngram:1:on") == 0.0);  // OOV dropped
}

TEST_CASE("extract_ngrams refuses an empty vocabulary") {
    features::NgramVocabulary empty;
    CHECK_THROWS(features::extract_ngrams("anything", {1}, empty));
}

TEST_CASE("lexicon features count agree/disagree/sentiment/negation hits") {
    auto lex = features::default_lexicons();
    auto fv = features::lexicon_features(
        "I agree, that is a great point, not terrible nonsense.", lex);
    CHECK(fv.get("argf:agree_lexicon") == 1.0);
    CHECK(fv.get("argf:disagree_lexicon") == 1.0);  // nonsense
    CHECK(fv.get("argf:sent_pos") >= 1.0);          // great
    CHECK(fv.get("argf:sent_neg") >= 1.0);          // terrible
    CHECK(fv.get("argf:negation") == 1.0);          // not
}

TEST_CASE("every lexicon feature name is argf-prefixed") {
    auto lex = features::default_lexicons();
    auto fv = features::lexicon_features(
        "However, you may think so, because I will differ.", lex);
    CHECK(!fv.entries.empty());
    for (const auto& [name, v] : fv.entries) {
        CHECK(name.rfind("argf:", 0) == 0);
    }
    CHECK(fv.get("argf:discourse:however") == 1.0);
    CHECK(fv.get("argf:modal:may") == 1.0);
}

TEST_CASE("lemma overlap catches inflection variants") {
    features::HeuristicLemmatizer lem;
    auto fv = features::lemma_overlap("The dogs ran home quickly",
                                      "My dog runs home", lem);
    CHECK(fv.get("argf:noun_overlap") >= 1.0);  // dogs/dog, home/home
    CHECK(fv.get("argf:verb_overlap") >= 1.0);  // ran/runs -> run
}

TEST_CASE("lemma overlap of disjoint texts is zero") {
    features::HeuristicLemmatizer lem;
    auto fv = features::lemma_overlap("cats sleep", "birds chirp", lem);
    CHECK(fv.get("argf:noun_overlap") == 0.0);
    CHECK(fv.get("argf:verb_overlap") == 0.0);
    CHECK(fv.get("argf:adj_overlap") == 0.0);
}

TEST_CASE("null entailment scorer pins the feature at one half") {
    features::NullEntailmentScorer scorer;
    auto fv = features::entailment_feature("p text", "c text", scorer);
    CHECK(fv.get("argf:entailment") == 0.5);
}

TEST_CASE("incongruity counts polarity flips across the concatenated pair") {
    std::map<std::string, int> sent = {
        {"great", 1}, {"wonderful", 1}, {"terrible", -1}, {"awful", -1}};
    // sequence over pt||ct: + - + -  => 3 flips
    auto fv = features::sentiment_incongruity("great awful day", "wonderful terrible", sent);
    CHECK(fv.get("sarcf:incongruity_flips") == 3.0);
    CHECK(fv.get("sarcf:pos_pt") == 1.0);
    CHECK(fv.get("sarcf:neg_pt") == 1.0);
    CHECK(fv.get("sarcf:pos_ct") == 1.0);
    CHECK(fv.get("sarcf:neg_ct") == 1.0);
}

TEST_CASE("incongruity with no sentiment tokens is all zero") {
    std::map<std::string, int> sent = {{"great", 1}};
    auto fv = features::sentiment_incongruity("plain words", "more words", sent);
    CHECK(fv.get("sarcf:incongruity_flips") == 0.0);
    CHECK(fv.get("sarcf:pos_pt") == 0.0);
}

TEST_CASE("sarcasm markers: caps, punctuation runs, quotes, emoji") {
    auto lex = features::default_lexicons();
    auto fv = features::sarcasm_markers(
        "Oh SURE, \"brilliant\" plan!! Really?!? wow :) \xF0\x9F\x98\x82", lex);
    CHECK(fv.get("sarcf:allcaps") == 1.0);        // SURE only; "Oh" is mixed case
    CHECK(fv.get("sarcf:quoted_spans") == 1.0);
    CHECK(fv.get("sarcf:multi_exclaim") >= 1.0);  // !!
    CHECK(fv.get("sarcf:multi_mixed") >= 1.0);    // ?!?
    CHECK(fv.get("sarcf:interjection") >= 1.0);   // wow
    CHECK(fv.get("sarcf:emoticon") >= 1.0);       // :)
    CHECK(fv.get("sarcf:emoji") == 1.0);
}

TEST_CASE("tag question detection respects token boundaries") {
    auto lex = features::default_lexicons();
    auto hit = features::sarcasm_markers("That went well, do you think?", lex);
    CHECK(hit.get("sarcf:tag_question") >= 1.0);
    auto miss = features::sarcasm_markers("The dodo youth festival was fine.", lex);
    CHECK(miss.get("sarcf:tag_question") == 0.0);
}

TEST_CASE("category lexicon features normalize by token count") {
    std::map<std::string, std::vector<std::string>> cats = {
        {"anger", {"mad", "furious"}}};
    auto fv = features::category_lexicon_features("I am so mad mad today", cats);
    CHECK(fv.get("sarcf:liwc:anger") == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("composed modes honor the namespace contract") {
    auto pair = fixtures::make_pair(
        "c1", corpus::ArgLabel::Disagree, corpus::SarcLabel::Sarcastic,
        "I think this policy is wonderful and fair.",
        "Oh sure, a GREAT idea!! That is nonsense, do you agree?");
    features::Extractor ex;
    ex.vocabulary = features::build_ngram_vocabulary(
        {pair.current_turn}, ex.ngram_orders);

    auto argf = ex.compose(pair, features::FeatureMode::ArgF);
    CHECK(!argf.entries.empty());
    for (const auto& [name, v] : argf.entries) {
        CHECK(name.rfind("argf:", 0) == 0);
    }

    auto both = ex.compose(pair, features::FeatureMode::ArgFSarcF);
    bool has_sarcf = false;
    for (const auto& [name, v] : both.entries) {
        bool argp = name.rfind("argf:", 0) == 0;
        bool sarcp = name.rfind("sarcf:", 0) == 0;
        CHECK((argp || sarcp));
        has_sarcf |= sarcp;
    }
    CHECK(has_sarcf);
    // ArgF entries carry over unchanged
    for (const auto& [name, v] : argf.entries) {
        CHECK(both.get(name) == v);
    }
}

TEST_CASE("composition is deterministic") {
    auto pair = fixtures::toy_corpus(1)[0];
    features::Extractor ex;
    ex.vocabulary = features::build_ngram_vocabulary(
        {pair.current_turn}, ex.ngram_orders);
    auto a = ex.compose(pair, features::FeatureMode::ArgFSarcF);
    auto b = ex.compose(pair, features::FeatureMode::ArgFSarcF);
    CHECK(a.entries == b.entries);
}

TEST_CASE("feature vector jsonl round trip") {
    FeatureVector fv;
    fv.bump("argf:agree_lexicon", 2.0);
    fv.bump("sarcf:allcaps", 1.0);
    auto line = features::feature_vector_to_json_line("id7", fv);
    auto [id, back] = features::feature_vector_from_json_line(line);
    CHECK(id == "id7");
    CHECK(back.entries == fv.entries);
}

TEST_CASE("missing category lexicon produces a warning, not a failure") {
    auto pair = fixtures::toy_corpus(1)[0];
    features::Extractor ex;
    ex.use_ngrams = false;
    std::vector<std::string> warnings;
    auto fv = ex.compose(pair, features::FeatureMode::ArgFSarcF, &warnings);
    CHECK(!fv.entries.empty());
    bool mentioned = false;
    for (const auto& w : warnings) {
        mentioned |= w.find("category") != std::string::npos;
    }
    CHECK(mentioned);
}
