#include "argsarc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "argsarc/text.hpp"

namespace argsarc::corpus {

using nlohmann::json;

std::string to_string(ArgLabel l) {
    switch (l) {
        case ArgLabel::Agree: return "A";
        case ArgLabel::Disagree: return "D";
        case ArgLabel::None: return "N";
    }
    return "?";
}

std::string to_string(SarcLabel l) {
    return l == SarcLabel::Sarcastic ? "S" : "NS";
}

std::string to_string(Source s) {
    return s == Source::Main ? "main" : "auxiliary";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
    }
    return "?";
}

ArgLabel arg_label_from_string(const std::string& s) {
    if (s == "A") return ArgLabel::Agree;
    if (s == "D") return ArgLabel::Disagree;
    if (s == "N") return ArgLabel::None;
    throw ValidationError("unknown arg_label '" + s + "'");
}

SarcLabel sarc_label_from_string(const std::string& s) {
    if (s == "S") return SarcLabel::Sarcastic;
    if (s == "NS") return SarcLabel::NotSarcastic;
    throw ValidationError("unknown sarc_label '" + s + "'");
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "dev") return Split::Dev;
    if (s == "test") return Split::Test;
    throw ValidationError("unknown split '" + s + "'");
}

ArgLabel map_scalar_to_arg_label(int scalar) {
    if (scalar < -5 || scalar > 5) {
        throw ValidationError("arg_scalar " + std::to_string(scalar) +
                              " outside [-5, 5]");
    }
    if (scalar <= -2) return ArgLabel::Disagree;
    if (scalar <= 1) return ArgLabel::None;
    return ArgLabel::Agree;
}

void validate(const TurnPair& pair) {
    if (text::normalize_whitespace(pair.prior_turn).empty()) {
        throw ValidationError("pair '" + pair.id + "': empty prior_turn");
    }
    if (text::normalize_whitespace(pair.current_turn).empty()) {
        throw ValidationError("pair '" + pair.id + "': empty current_turn");
    }
    if (!pair.arg_label && !pair.sarc_label) {
        throw ValidationError("pair '" + pair.id +
                              "': neither arg_label nor sarc_label present");
    }
    if (pair.arg_scalar) {
        ArgLabel mapped = map_scalar_to_arg_label(*pair.arg_scalar);
        if (pair.arg_label && *pair.arg_label != mapped) {
            throw ValidationError("pair '" + pair.id + "': arg_label " +
                                  to_string(*pair.arg_label) +
                                  " inconsistent with arg_scalar " +
                                  std::to_string(*pair.arg_scalar));
        }
    }
}

CorpusStats compute_stats(const std::vector<TurnPair>& pairs) {
    CorpusStats stats;
    stats.total = static_cast<int>(pairs.size());
    std::map<ArgLabel, int> row_totals;
    for (const auto& p : pairs) {
        if (p.split) stats.split_sizes[*p.split]++;
        if (p.arg_label && p.sarc_label) {
            stats.cells[{*p.arg_label, *p.sarc_label}].count++;
            row_totals[*p.arg_label]++;
        } else {
            stats.missing_either_label++;
        }
    }
    for (auto& [key, cell] : stats.cells) {
        int row = row_totals[key.first];
        cell.row_percent = row > 0 ? 100.0 * cell.count / row : 0.0;
    }
    return stats;
}

std::string render_stats(const CorpusStats& stats) {
    std::ostringstream os;
    os << "Arg. Rel.  Sarcasm  # of turns\n";
    for (ArgLabel a : {ArgLabel::Agree, ArgLabel::Disagree, ArgLabel::None}) {
        for (SarcLabel s : {SarcLabel::Sarcastic, SarcLabel::NotSarcastic}) {
            auto it = stats.cells.find({a, s});
            int count = it == stats.cells.end() ? 0 : it->second.count;
            double pct = it == stats.cells.end() ? 0.0 : it->second.row_percent;
            os << to_string(a) << "          " << to_string(s)
               << (s == SarcLabel::Sarcastic ? "       " : "      ") << count
               << " (" << static_cast<int>(std::lround(pct)) << "%)\n";
        }
    }
    os << "total: " << stats.total << "\n";
    for (const auto& [split, n] : stats.split_sizes) {
        os << to_string(split) << ": " << n << "\n";
    }
    return os.str();
}

void SplitSpec::validate() const {
    for (double r : {train_ratio, dev_ratio, test_ratio}) {
        if (!(r > 0.0 && r < 1.0)) {
            throw ValidationError("split ratio " + std::to_string(r) +
                                  " outside (0, 1)");
        }
    }
    if (std::abs(train_ratio + dev_ratio + test_ratio - 1.0) > 1e-12) {
        throw ValidationError("split ratios must sum to 1.0");
    }
}

SplitResult stratified_split(const std::vector<TurnPair>& pairs, const SplitSpec& spec) {
    spec.validate();
    for (const auto& p : pairs) {
        if (!p.arg_label || !p.sarc_label) {
            throw ValidationError("pair '" + p.id +
                                  "': stratified_split requires both labels");
        }
    }
    std::map<std::pair<ArgLabel, SarcLabel>, std::vector<size_t>> strata;
    for (size_t i = 0; i < pairs.size(); ++i) {
        strata[{*pairs[i].arg_label, *pairs[i].sarc_label}].push_back(i);
    }
    SplitResult out;
    for (auto& [key, members] : strata) {
        // per-stratum seed so adding a stratum does not reshuffle others
        uint64_t stratum_seed = spec.seed ^ text::fnv1a(
            to_string(key.first) + "/" + to_string(key.second));
        std::mt19937_64 rng(stratum_seed);
        std::shuffle(members.begin(), members.end(), rng);
        size_t n = members.size();
        if (n < 3) {
            out.warnings.push_back("stratum (" + to_string(key.first) + "," +
                                   to_string(key.second) + ") has " +
                                   std::to_string(n) +
                                   " members; all assigned to train");
            for (size_t idx : members) {
                TurnPair p = pairs[idx];
                p.split = Split::Train;
                out.train.push_back(std::move(p));
            }
            continue;
        }
        // train gets exactly floor(ratio * n); leftovers to dev then test
        size_t n_train = static_cast<size_t>(std::floor(spec.train_ratio * n));
        size_t n_dev = static_cast<size_t>(std::floor(spec.dev_ratio * n));
        size_t n_test = static_cast<size_t>(std::floor(spec.test_ratio * n));
        size_t rem = n - n_train - n_dev - n_test;
        if (rem > 0) { ++n_dev; --rem; }
        n_test = n - n_train - n_dev;
        size_t pos = 0;
        auto take = [&](size_t count, Split split, std::vector<TurnPair>& dst) {
            for (size_t k = 0; k < count; ++k, ++pos) {
                TurnPair p = pairs[members[pos]];
                p.split = split;
                dst.push_back(std::move(p));
            }
        };
        take(n_train, Split::Train, out.train);
        take(n_dev, Split::Dev, out.dev);
        take(n_test, Split::Test, out.test);
    }
    return out;
}

namespace {

std::string dedup_key(const TurnPair& p) {
    return text::normalize_whitespace(text::to_lower(p.current_turn));
}

}  // namespace

MergeResult merge_auxiliary_sarcasm(const std::vector<TurnPair>& main,
                                    const std::vector<TurnPair>& aux) {
    MergeResult out;
    out.merged = main;
    std::unordered_set<std::string> seen;
    seen.reserve(main.size());
    for (const auto& p : main) seen.insert(dedup_key(p));
    for (const auto& p : aux) {
        if (p.arg_label) {
            out.diagnostics.push_back("aux pair '" + p.id +
                                      "' carries an arg_label; rejected");
            continue;
        }
        if (!p.sarc_label) {
            out.diagnostics.push_back("aux pair '" + p.id +
                                      "' has no sarc_label; rejected");
            continue;
        }
        std::string key = dedup_key(p);
        if (seen.count(key)) {
            out.duplicates_dropped++;
            continue;
        }
        seen.insert(key);
        TurnPair copy = p;
        copy.source = Source::Auxiliary;
        copy.arg_label.reset();
        copy.arg_scalar.reset();
        out.merged.push_back(std::move(copy));
    }
    return out;
}

std::string to_json_line(const TurnPair& pair) {
    json j;
    j["id"] = pair.id;
    j["prior_turn"] = pair.prior_turn;
    j["current_turn"] = pair.current_turn;
    if (pair.arg_scalar) j["arg_scalar"] = *pair.arg_scalar;
    if (pair.arg_label) j["arg_label"] = to_string(*pair.arg_label);
    if (pair.sarc_label) j["sarc_label"] = to_string(*pair.sarc_label);
    j["source"] = to_string(pair.source);
    if (pair.split) j["split"] = to_string(*pair.split);
    return j.dump();
}

TurnPair from_json_line(const std::string& line) {
    json j = json::parse(line);
    if (!j.is_object()) throw ValidationError("record is not a JSON object");
    TurnPair p;
    p.id = j.at("id").get<std::string>();
    p.prior_turn = j.at("prior_turn").get<std::string>();
    p.current_turn = j.at("current_turn").get<std::string>();
    if (j.contains("arg_scalar")) {
        const auto& v = j["arg_scalar"];
        if (!v.is_number_integer()) {
            throw ValidationError("pair '" + p.id +
                                  "': arg_scalar must be an integer");
        }
        p.arg_scalar = v.get<int>();
    }
    if (j.contains("arg_label")) {
        p.arg_label = arg_label_from_string(j["arg_label"].get<std::string>());
    }
    if (j.contains("sarc_label")) {
        p.sarc_label = sarc_label_from_string(j["sarc_label"].get<std::string>());
    }
    if (j.contains("source")) {
        std::string s = j["source"].get<std::string>();
        if (s == "main") p.source = Source::Main;
        else if (s == "auxiliary") p.source = Source::Auxiliary;
        else throw ValidationError("unknown source '" + s + "'");
    }
    if (j.contains("split")) {
        p.split = split_from_string(j["split"].get<std::string>());
    }
    if (p.arg_scalar && !p.arg_label) {
        p.arg_label = map_scalar_to_arg_label(*p.arg_scalar);
    }
    validate(p);
    return p;
}

LoadReport load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    LoadReport report;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::normalize_whitespace(line).empty()) continue;
        try {
            report.pairs.push_back(from_json_line(line));
        } catch (const std::exception& e) {
            report.errors.push_back({lineno, e.what()});
        }
    }
    return report;
}

void save_corpus(const std::vector<TurnPair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& p : pairs) out << to_json_line(p) << "\n";
}

}  // namespace argsarc::corpus
