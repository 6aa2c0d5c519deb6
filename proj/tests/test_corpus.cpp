#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "argsarc/corpus.hpp"
#include "fixtures.hpp"

using namespace argsarc;
using corpus::ArgLabel;
using corpus::SarcLabel;
using corpus::Split;
using corpus::TurnPair;

TEST_CASE("scalar-to-label band edges") {
    CHECK(corpus::map_scalar_to_arg_label(-5) == ArgLabel::Disagree);
    CHECK(corpus::map_scalar_to_arg_label(-2) == ArgLabel::Disagree);
    CHECK(corpus::map_scalar_to_arg_label(-1) == ArgLabel::None);
    CHECK(corpus::map_scalar_to_arg_label(0) == ArgLabel::None);
    CHECK(corpus::map_scalar_to_arg_label(1) == ArgLabel::None);
    CHECK(corpus::map_scalar_to_arg_label(2) == ArgLabel::Agree);
    CHECK(corpus::map_scalar_to_arg_label(5) == ArgLabel::Agree);
    CHECK_THROWS_AS(corpus::map_scalar_to_arg_label(6), corpus::ValidationError);
    CHECK_THROWS_AS(corpus::map_scalar_to_arg_label(-6), corpus::ValidationError);
}

TEST_CASE("scalar mapping partitions -5..5 into 4/3/4") {
    int d = 0, n = 0, a = 0;
    for (int s = -5; s <= 5; ++s) {
        switch (corpus::map_scalar_to_arg_label(s)) {
            case ArgLabel::Disagree: ++d; break;
            case ArgLabel::None: ++n; break;
            case ArgLabel::Agree: ++a; break;
        }
    }
    CHECK(d == 4);
    CHECK(n == 3);
    CHECK(a == 4);
}

TEST_CASE("validate rejects inconsistent scalar/label and empty turns") {
    TurnPair p = fixtures::make_pair("x", ArgLabel::Agree, SarcLabel::Sarcastic);
    CHECK_NOTHROW(corpus::validate(p));
    p.arg_scalar = -4;  // maps to D, label says A
    CHECK_THROWS_AS(corpus::validate(p), corpus::ValidationError);
    p = fixtures::make_pair("y", ArgLabel::Agree, SarcLabel::Sarcastic, "  \t ", "ok.");
    CHECK_THROWS_AS(corpus::validate(p), corpus::ValidationError);
}

TEST_CASE("stratified split: 10-pair single stratum splits 8/1/1") {
    auto pairs = std::vector<TurnPair>();
    for (int i = 0; i < 10; ++i) {
        pairs.push_back(fixtures::make_pair("p" + std::to_string(i), ArgLabel::Agree,
                                            SarcLabel::Sarcastic));
    }
    corpus::SplitSpec spec;
    spec.seed = 7;
    auto result = corpus::stratified_split(pairs, spec);
    CHECK(result.train.size() == 8);
    CHECK(result.dev.size() == 1);
    CHECK(result.test.size() == 1);
}

TEST_CASE("stratified split: empty input gives three empty lists") {
    auto result = corpus::stratified_split({}, corpus::SplitSpec{});
    CHECK(result.train.empty());
    CHECK(result.dev.empty());
    CHECK(result.test.empty());
}

TEST_CASE("stratified split is a seed-deterministic partition") {
    auto pairs = fixtures::toy_corpus(37);
    corpus::SplitSpec spec;
    spec.seed = 99;
    auto r1 = corpus::stratified_split(pairs, spec);
    auto r2 = corpus::stratified_split(pairs, spec);
    auto ids = [](const std::vector<TurnPair>& v) {
        std::set<std::string> s;
        for (const auto& p : v) s.insert(p.id);
        return s;
    };
    CHECK(ids(r1.train) == ids(r2.train));
    CHECK(ids(r1.dev) == ids(r2.dev));
    CHECK(ids(r1.test) == ids(r2.test));
    // partition: disjoint, union covers everything
    std::set<std::string> all = ids(r1.train);
    size_t total = r1.train.size() + r1.dev.size() + r1.test.size();
    for (const auto& p : r1.dev) all.insert(p.id);
    for (const auto& p : r1.test) all.insert(p.id);
    CHECK(all.size() == pairs.size());
    CHECK(total == pairs.size());
}

TEST_CASE("tiny stratum goes whole to train with warning") {
    std::vector<TurnPair> pairs;
    for (int i = 0; i < 10; ++i) {
        pairs.push_back(fixtures::make_pair("a" + std::to_string(i), ArgLabel::Agree,
                                            SarcLabel::Sarcastic));
    }
    pairs.push_back(fixtures::make_pair("lone", ArgLabel::None, SarcLabel::NotSarcastic));
    auto result = corpus::stratified_split(pairs, corpus::SplitSpec{});
    CHECK(result.warnings.size() == 1);
    bool lone_in_train = false;
    for (const auto& p : result.train) lone_in_train |= p.id == "lone";
    CHECK(lone_in_train);
}

TEST_CASE("merge keeps main untouched and drops aux duplicates") {
    auto main = fixtures::toy_corpus(6);
    main[0].split = Split::Test;
    std::vector<TurnPair> aux;
    TurnPair dup;
    dup.id = "dup";
    dup.prior_turn = "whatever text.";
    dup.current_turn = "  " + main[2].current_turn + "  ";  // same after folding
    dup.sarc_label = SarcLabel::Sarcastic;
    aux.push_back(dup);
    TurnPair fresh;
    fresh.id = "fresh";
    fresh.prior_turn = "aux prior.";
    fresh.current_turn = "brand new sarcastic line !!";
    fresh.sarc_label = SarcLabel::Sarcastic;
    aux.push_back(fresh);

    auto result = corpus::merge_auxiliary_sarcasm(main, aux);
    CHECK(result.merged.size() == main.size() + 1);
    CHECK(result.duplicates_dropped == 1);
    CHECK(result.merged[0].split == Split::Test);  // test membership untouched
    const auto& added = result.merged.back();
    CHECK(added.source == corpus::Source::Auxiliary);
    CHECK(!added.arg_label.has_value());
}

TEST_CASE("merge rejects aux pairs carrying an arg label") {
    auto main = fixtures::toy_corpus(2);
    std::vector<TurnPair> aux = {fixtures::make_pair("bad", ArgLabel::Agree,
                                                     SarcLabel::Sarcastic)};
    auto result = corpus::merge_auxiliary_sarcasm(main, aux);
    CHECK(result.merged.size() == main.size());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].find("bad") != std::string::npos);
}

TEST_CASE("merge with empty aux is identity") {
    auto main = fixtures::toy_corpus(4);
    auto result = corpus::merge_auxiliary_sarcasm(main, {});
    CHECK(result.merged.size() == main.size());
    CHECK(result.duplicates_dropped == 0);
}

TEST_CASE("corpus stats reproduce the dataset table layout") {
    auto pairs = fixtures::table1_corpus();
    auto stats = corpus::compute_stats(pairs);
    CHECK(stats.total == 9982);
    auto ds = stats.cells.at({ArgLabel::Disagree, SarcLabel::Sarcastic});
    CHECK(ds.count == 2207);
    CHECK(ds.row_percent == doctest::Approx(57.0).epsilon(0.01));
    // percentages per row sum to 100
    double row = ds.row_percent +
                 stats.cells.at({ArgLabel::Disagree, SarcLabel::NotSarcastic}).row_percent;
    CHECK(row == doctest::Approx(100.0).epsilon(0.005));
}

TEST_CASE("jsonl round trip and malformed-line reporting") {
    std::string path = "corpus_test_tmp.jsonl";
    {
        std::ofstream out(path);
        out << corpus::to_json_line(fixtures::make_pair("a", ArgLabel::Agree,
                                                        SarcLabel::Sarcastic))
            << "\n";
        out << R"({"id":"bad","prior_turn":"x"})" << "\n";  // missing current_turn
        out << R"({"id":"s","prior_turn":"p.","current_turn":"c.","arg_scalar":3})" << "\n";
    }
    auto report = corpus::load_corpus(path);
    REQUIRE(report.pairs.size() == 2);
    REQUIRE(report.errors.size() == 1);
    CHECK(report.errors[0].line == 2);
    // scalar implies the label
    CHECK(report.pairs[1].arg_label == ArgLabel::Agree);
    std::remove(path.c_str());
}

TEST_CASE("loader rejects non-integer scalar") {
    CHECK_THROWS(corpus::from_json_line(
        R"({"id":"r","prior_turn":"p.","current_turn":"c.","arg_scalar":2.5})"));
}

TEST_CASE("empty corpus file loads to empty list with zero stats") {
    std::string path = "corpus_empty_tmp.jsonl";
    std::ofstream(path).close();
    auto report = corpus::load_corpus(path);
    CHECK(report.pairs.empty());
    CHECK(report.errors.empty());
    auto stats = corpus::compute_stats(report.pairs);
    CHECK(stats.total == 0);
    std::remove(path.c_str());
}
