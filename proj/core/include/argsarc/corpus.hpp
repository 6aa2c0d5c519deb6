#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace argsarc::corpus {

enum class ArgLabel { Agree, Disagree, None };
enum class SarcLabel { Sarcastic, NotSarcastic };
enum class Source { Main, Auxiliary };
enum class Split { Train, Dev, Test };

std::string to_string(ArgLabel l);
std::string to_string(SarcLabel l);
std::string to_string(Source s);
std::string to_string(Split s);
ArgLabel arg_label_from_string(const std::string& s);
SarcLabel sarc_label_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TurnPair {
    std::string id;
    std::string prior_turn;
    std::string current_turn;
    std::optional<int> arg_scalar;  // [-5, 5]
    std::optional<ArgLabel> arg_label;
    std::optional<SarcLabel> sarc_label;
    Source source = Source::Main;
    std::optional<Split> split;
};

// [-5,-2] -> Disagree, [-1,1] -> None, [2,5] -> Agree.
ArgLabel map_scalar_to_arg_label(int scalar);

// Checks the TurnPair invariants, throws ValidationError naming the
// offending field/value.
void validate(const TurnPair& pair);

struct CorpusStats {
    struct Cell {
        int count = 0;
        double row_percent = 0.0;  // within the arg-label row
    };
    // keyed by (arg label, sarc label)
    std::map<std::pair<ArgLabel, SarcLabel>, Cell> cells;
    std::map<Split, int> split_sizes;
    int total = 0;
    int missing_either_label = 0;
};

CorpusStats compute_stats(const std::vector<TurnPair>& pairs);

std::string render_stats(const CorpusStats& stats);

struct SplitSpec {
    double train_ratio = 0.8;
    double dev_ratio = 0.1;
    double test_ratio = 0.1;
    uint64_t seed = 0;

    void validate() const;
};

struct SplitResult {
    std::vector<TurnPair> train, dev, test;
    std::vector<std::string> warnings;
};

// Stratified by (arg_label, sarc_label). Within each stratum, pairs are
// shuffled with the spec seed; train/dev/test get floor(ratio*n) each
// and leftovers go to dev then test. Strata with fewer than 3 members
// go whole to train with a warning.
SplitResult stratified_split(const std::vector<TurnPair>& pairs, const SplitSpec& spec);

struct MergeResult {
    std::vector<TurnPair> merged;
    int duplicates_dropped = 0;
    std::vector<std::string> diagnostics;
};

// Appends aux pairs (sarcasm-only) to main, dropping aux pairs whose
// case-folded whitespace-collapsed current_turn already appears in main.
// Aux pairs carrying an arg_label are rejected with a diagnostic.
// Main pairs, including the test split, pass through untouched.
MergeResult merge_auxiliary_sarcasm(const std::vector<TurnPair>& main,
                                    const std::vector<TurnPair>& aux);

struct LoadReport {
    std::vector<TurnPair> pairs;
    struct LineError {
        int line;
        std::string message;
    };
    std::vector<LineError> errors;
};

// JSON-lines corpus file, one object per pair. Malformed lines are
// collected with their line numbers; good lines still load.
LoadReport load_corpus(const std::string& path);

void save_corpus(const std::vector<TurnPair>& pairs, const std::string& path);

std::string to_json_line(const TurnPair& pair);
TurnPair from_json_line(const std::string& line);

}  // namespace argsarc::corpus
