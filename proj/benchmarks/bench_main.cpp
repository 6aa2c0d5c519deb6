#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <sstream>
#include <vector>

#include "argsarc/dual_encoder.hpp"
#include "argsarc/encoder_adapter.hpp"
#include "argsarc/eval.hpp"
#include "argsarc/features.hpp"
#include "argsarc/text.hpp"

using namespace argsarc;

namespace {

std::string sample_turn(int n_sentences, int words_per_sentence, unsigned seed) {
    const char* words[] = {"the",  "policy", "wrong",   "agree", "think", "about",
                           "guns", "taxes",  "climate", "sure",  "that",  "because"};
    std::mt19937 rng(seed);
    std::ostringstream os;
    for (int s = 0; s < n_sentences; ++s) {
        for (int w = 0; w < words_per_sentence; ++w) {
            os << words[rng() % 12] << " ";
        }
        os << ". ";
    }
    return os.str();
}

corpus::TurnPair sample_pair() {
    corpus::TurnPair p;
    p.id = "bench";
    p.prior_turn = sample_turn(3, 12, 1);
    p.current_turn = sample_turn(4, 10, 2);
    p.arg_label = corpus::ArgLabel::Disagree;
    p.sarc_label = corpus::SarcLabel::Sarcastic;
    return p;
}

}  // namespace

static void BM_Tokenize(benchmark::State& state) {
    std::string text = sample_turn(5, 15, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(text::tokenize(text));
    }
}
BENCHMARK(BM_Tokenize);

static void BM_FeatureCompose(benchmark::State& state) {
    auto pair = sample_pair();
    features::Extractor extractor;
    extractor.vocabulary = features::build_ngram_vocabulary(
        {pair.current_turn}, extractor.ngram_orders);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            extractor.compose(pair, features::FeatureMode::ArgFSarcF));
    }
}
BENCHMARK(BM_FeatureCompose);

static void BM_DualForward(benchmark::State& state) {
    auto pair = sample_pair();
    dualenc::EncoderConfig cfg;
    cfg.embed_dim = static_cast<int>(state.range(0));
    cfg.hidden_size = static_cast<int>(state.range(0));
    cfg.dropout = 0.0;
    dualenc::EmbeddingOptions eopts;
    eopts.dim = cfg.embed_dim;
    eopts.min_frequency = 1;
    auto table = dualenc::build_embeddings({pair.prior_turn, pair.current_turn},
                                           nullptr, eopts);
    dualenc::DualEncoder model(cfg, std::move(table));
    for (auto _ : state) {
        nn::Graph g;
        benchmark::DoNotOptimize(
            model.forward(g, pair, dualenc::TaskMode::Multitask));
    }
}
BENCHMARK(BM_DualForward)->Arg(16)->Arg(64);

static void BM_TinyEncoderForward(benchmark::State& state) {
    auto pair = sample_pair();
    encadapter::TinyBackendConfig cfg;
    auto backend = std::make_shared<encadapter::TinyTransformerBackend>(cfg);
    encadapter::EncoderAdapter adapter(backend, encadapter::HeadConfig{});
    auto input = encadapter::format_pair(pair, adapter.tokenizer(), 64);
    for (auto _ : state) {
        nn::Graph g;
        benchmark::DoNotOptimize(
            adapter.forward(g, input, encadapter::EncoderMode::Multitask));
    }
}
BENCHMARK(BM_TinyEncoderForward);

static void BM_McNemarExact(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval::mcnemar_from_counts(480, 520));
    }
}
BENCHMARK(BM_McNemarExact);

BENCHMARK_MAIN();
