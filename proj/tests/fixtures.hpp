#pragma once

#include <string>
#include <vector>

#include "argsarc/corpus.hpp"

namespace fixtures {

using argsarc::corpus::ArgLabel;
using argsarc::corpus::SarcLabel;
using argsarc::corpus::TurnPair;

inline TurnPair make_pair(const std::string& id, ArgLabel a, SarcLabel s,
                          const std::string& pt = "prior turn text.",
                          const std::string& ct = "current turn text.") {
    TurnPair p;
    p.id = id;
    p.prior_turn = pt;
    p.current_turn = ct;
    p.arg_label = a;
    p.sarc_label = s;
    return p;
}

// The published dataset statistics table: (label pair, count).
inline std::vector<TurnPair> table1_corpus() {
    struct Cell {
        ArgLabel a;
        SarcLabel s;
        int count;
    };
    const std::vector<Cell> cells = {
        {ArgLabel::Agree, SarcLabel::Sarcastic, 315},
        {ArgLabel::Agree, SarcLabel::NotSarcastic, 638},
        {ArgLabel::Disagree, SarcLabel::Sarcastic, 2207},
        {ArgLabel::Disagree, SarcLabel::NotSarcastic, 1696},
        {ArgLabel::None, SarcLabel::Sarcastic, 2285},
        {ArgLabel::None, SarcLabel::NotSarcastic, 2841},
    };
    std::vector<TurnPair> pairs;
    int serial = 0;
    for (const auto& cell : cells) {
        for (int i = 0; i < cell.count; ++i) {
            std::string id = "p" + std::to_string(serial++);
            pairs.push_back(make_pair(id, cell.a, cell.s, "prior " + id + ".",
                                      "current " + id + "."));
        }
    }
    return pairs;
}

// Tiny two-cluster corpus the neural models can overfit: agreeing pairs
// mention "agree"/"exactly", disagreeing ones "wrong"/"nonsense";
// sarcastic ones carry "!!".
inline std::vector<TurnPair> toy_corpus(int n_pairs, unsigned seed = 1) {
    std::vector<TurnPair> pairs;
    const char* topics[] = {"guns", "taxes", "schools", "evolution",
                            "climate", "voting", "borders", "medicine"};
    for (int i = 0; i < n_pairs; ++i) {
        const char* topic = topics[(i + seed) % 8];
        bool agree = i % 2 == 0;
        bool sarcastic = (i / 2) % 2 == 0;
        TurnPair p;
        p.id = "toy" + std::to_string(i);
        p.prior_turn = std::string("I think ") + topic + " matter a lot here.";
        std::string body = agree ? std::string("I agree exactly about ") + topic
                                 : std::string("That is wrong nonsense about ") + topic;
        p.current_turn = body + (sarcastic ? " !! sure." : ".");
        p.arg_label = agree ? ArgLabel::Agree : ArgLabel::Disagree;
        p.sarc_label = sarcastic ? SarcLabel::Sarcastic : SarcLabel::NotSarcastic;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace fixtures
