#include <doctest.h>

#include <cmath>

#include "desc/digest.hpp"
#include "desc/ensemble.hpp"
#include "desc/errors.hpp"
#include "desc/rng.hpp"
#include "helpers.hpp"

using namespace desc;
using namespace desc::ensemble;

namespace {

models::ConfidenceVector cv(std::initializer_list<double> probs) {
  return models::ConfidenceVector{std::vector<double>(probs)};
}

models::ConfidenceVector random_simplex(std::size_t c, Rng& rng) {
  models::ConfidenceVector out;
  out.probs.resize(c);
  double total = 0.0;
  for (double& p : out.probs) {
    p = rng.uniform() + 1e-9;
    total += p;
  }
  for (double& p : out.probs) p /= total;
  return out;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("softmax weighting of the member F1 scores") {
  const auto w = compute_weights({0.70, 0.70, 0.67});
  CHECK(w.w[0] == doctest::Approx(0.33665).epsilon(1e-5));
  CHECK(w.w[1] == doctest::Approx(0.33665).epsilon(1e-5));
  CHECK(w.w[2] == doctest::Approx(0.32670).epsilon(1e-5));

  const auto equal = compute_weights({0.5, 0.5, 0.5});
  for (double v : equal.w) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const auto spread = compute_weights({1.0, 0.0, 0.0});
  const double e = std::exp(1.0);
  CHECK(spread.w[0] == doctest::Approx(e / (e + 2)).epsilon(1e-12));
  CHECK(spread.w[1] == doctest::Approx(1 / (e + 2)).epsilon(1e-12));

  CHECK_THROWS_AS(compute_weights({1.2, 0.5, 0.5}), desc::OutOfRangeF1);
  CHECK_THROWS_AS(compute_weights({-0.1, 0.5, 0.5}), desc::OutOfRangeF1);
}

TEST_CASE("weights stay positive, normalized, and order-preserving") {
  Rng rng(21);
  for (int round = 0; round < 200; ++round) {
    std::array<double, 3> f1{rng.uniform(), rng.uniform(), rng.uniform()};
    const auto w = compute_weights(f1);
    double total = 0.0;
    for (double v : w.w) {
      CHECK(v > 0.0);  // no member is ever silenced
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (f1[i] > f1[j]) CHECK(w.w[i] > w.w[j]);
      }
    }
  }
}

TEST_CASE("a common shift in F1 scores keeps the ranking") {
  const auto base = compute_weights({0.2, 0.5, 0.35});
  const auto shifted = compute_weights({0.4, 0.7, 0.55});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK((base.w[i] > base.w[j]) == (shifted.w[i] > shifted.w[j]));
    }
  }
}

TEST_CASE("weighted soft vote follows the worked example") {
  const auto p1 = cv({0.9, 0.1});
  const auto p2 = cv({0.2, 0.8});
  const auto p3 = cv({0.4, 0.6});
  const auto out = combine({0.5, 0.3, 0.2}, {&p1, &p2, &p3});
  CHECK(out.confidence.probs[0] == doctest::Approx(0.59).epsilon(1e-12));
  CHECK(out.confidence.probs[1] == doctest::Approx(0.41).epsilon(1e-12));
  CHECK(out.class_id == 0);
}

TEST_CASE("one-hot weights defer to that member") {
  Rng rng(22);
  for (int round = 0; round < 200; ++round) {
    const auto p1 = random_simplex(3, rng);
    const auto p2 = random_simplex(3, rng);
    const auto p3 = random_simplex(3, rng);
    const std::size_t hot = rng.below(3);
    std::array<double, 3> w{};
    w[hot] = 1.0;
    const auto out = combine(w, {&p1, &p2, &p3});
    const auto& member = hot == 0 ? p1 : hot == 1 ? p2 : p3;
    CHECK(out.class_id == member.argmax());
  }
}

TEST_CASE("uniform members tie toward class zero") {
  const auto u = cv({0.5, 0.5});
  const auto out = combine({1.0 / 3, 1.0 / 3, 1.0 / 3}, {&u, &u, &u});
  CHECK(out.class_id == 0);
}

TEST_CASE("equal weights reduce to the unweighted mean vote") {
  Rng rng(23);
  for (int round = 0; round < 100; ++round) {
    const auto p1 = random_simplex(4, rng);
    const auto p2 = random_simplex(4, rng);
    const auto p3 = random_simplex(4, rng);
    const auto out = combine({1.0 / 3, 1.0 / 3, 1.0 / 3}, {&p1, &p2, &p3});
    double total = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      const double mean = (p1.probs[c] + p2.probs[c] + p3.probs[c]) / 3.0;
      CHECK(out.confidence.probs[c] == doctest::Approx(mean).epsilon(1e-12));
      total += out.confidence.probs[c];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);  // convexity keeps the simplex
  }
}

TEST_CASE("stratified folds reach every class or refuse") {
  Rng rng(24);
  std::vector<std::size_t> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 2);

  const auto fold_of = stratified_fold_assignment(labels, 5, rng);
  std::vector<std::array<std::size_t, 2>> counts(5, {0, 0});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++counts[fold_of[i]][labels[i]];
  }
  for (const auto& fold : counts) {
    CHECK(fold[0] > 0);
    CHECK(fold[1] > 0);
  }

  std::vector<std::size_t> skewed(20, 0);
  skewed[0] = skewed[1] = skewed[2] = 1;  // minority class of 3
  CHECK_THROWS_AS(stratified_fold_assignment(skewed, 4, rng),
                  desc::TooFewSamplesPerClass);
}

TEST_CASE("cross-validated F1: perfect and constant predictors") {
  std::vector<std::size_t> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(i % 2);

  const FitFn perfect = [&](const std::vector<std::size_t>&) {
    return [&](std::size_t i) { return labels[i]; };
  };
  CHECK(cross_validated_f1(labels, 2, perfect, 5, 99) == doctest::Approx(1.0));

  // constant class-0 predictor on balanced binary data:
  // class 0 has P=1/2, R=1 -> F1=2/3; class 1 has F1=0; macro = 1/3
  const FitFn constant = [](const std::vector<std::size_t>&) {
    return [](std::size_t) { return std::size_t{0}; };
  };
  CHECK(cross_validated_f1(labels, 2, constant, 5, 99) ==
        doctest::Approx(1.0 / 3).epsilon(1e-12));

  CHECK_THROWS_AS(cross_validated_f1(labels, 2, constant, 21, 99),
                  desc::TooFewSamplesPerClass);
}

TEST_CASE("manifest round-trip and digest verification") {
  testutil::TempDir dir("manifest");
  EnsembleManifest manifest;
  manifest.task = "binary";
  manifest.classes = 2;
  manifest.weights = compute_weights({0.9, 0.8, 0.7});
  manifest.members[0] = {"models/dnn.model", "0123456789abcdef"};
  manifest.members[1] = {"models/bilstm.model", "0123456789abcdef"};
  manifest.members[2] = {"models/attlstm.model", "0123456789abcdef"};
  manifest.tfidf = {"models/tfidf.vocab", "00"};
  manifest.labels = {"models/labels.txt", "00"};
  manifest.scaler = {"models/feature_scaler.tsv", "00"};

  const auto path = dir.path() / "manifest.json";
  manifest.save(path);
  const auto loaded = EnsembleManifest::load(path);
  CHECK(loaded.task == manifest.task);
  CHECK(loaded.classes == manifest.classes);
  for (std::size_t i = 0; i < kMemberCount; ++i) {
    CHECK(loaded.members[i].file == manifest.members[i].file);
    CHECK(loaded.members[i].digest == manifest.members[i].digest);
    CHECK(loaded.weights.w[i] == manifest.weights.w[i]);
  }

  // members are absent on disk, so loading the ensemble reports the artifact
  CHECK_THROWS_AS(load_ensemble(dir.path(), loaded), desc::MissingArtifact);
}

TEST_CASE("fnv digest is stable and content-sensitive") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
}

}  // TEST_SUITE
