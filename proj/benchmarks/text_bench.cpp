#include <benchmark/benchmark.h>

#include <string>

#include "desc/features.hpp"
#include "desc/resources.hpp"
#include "desc/text.hpp"

namespace {

const std::string kTweet =
    "Sooooo happy about ANOTHER Monday at work!!! #blessed #mondaymotivation "
    "@boss you are the best \U0001F612 http://example.com/really 100% fine...";

desc::resources::ResourceBundle fixture_bundle() {
  using namespace desc::resources;
  const std::filesystem::path dir = DESC_FIXTURES_DIR;
  ResourceBundle bundle;
  bundle.sentiment[0] = load_sentiment_lexicon(dir / "sentiwordnet.tsv");
  bundle.sentiment[1] = load_sentiment_lexicon(dir / "vader.tsv");
  bundle.sentiment[2] = load_sentiment_lexicon(dir / "afinn.tsv");
  bundle.mood = load_mood_lexicon(dir / "depechemood.tsv");
  bundle.sentiment[3] = sentiment_from_mood(bundle.mood);
  bundle.easy_words = load_wordlist(dir / "easy_words.txt");
  bundle.pos = load_pos_lexicon(dir / "pos_lexicon.tsv");
  return bundle;
}

void Tokenize(benchmark::State& state) {
  for (auto _ : state) {
    auto doc = desc::text::analyze(kTweet);
    benchmark::DoNotOptimize(doc);
  }
}
BENCHMARK(Tokenize);

void ExtractFeatures(benchmark::State& state) {
  const auto bundle = fixture_bundle();
  const auto doc = desc::text::analyze(kTweet);
  for (auto _ : state) {
    auto fv = desc::features::extract_features(doc, bundle);
    benchmark::DoNotOptimize(fv);
  }
}
BENCHMARK(ExtractFeatures);

void SyllableCount(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(desc::text::count_syllables("motivation"));
  }
}
BENCHMARK(SyllableCount);

}  // namespace
