#include "helpers.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "desc/tensor.hpp"

namespace testutil {

namespace fs = std::filesystem;

fs::path fixtures_dir() { return fs::path(DESC_FIXTURES_DIR); }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  path_ = fs::temp_directory_path() /
          ("desc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

const std::vector<std::string>& positive_words() {
  static const std::vector<std::string> words = {
      "good", "great", "love", "happy", "nice",
      "awesome", "wonderful", "sweet", "lovely", "best"};
  return words;
}

const std::vector<std::string>& negative_words() {
  static const std::vector<std::string> words = {
      "bad", "awful", "hate", "terrible", "sad",
      "worst", "angry", "horrible", "annoying", "ugly"};
  return words;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "the", "a", "is", "was", "day", "time", "work", "monday", "weather",
      "coffee", "cat", "dog", "really", "just", "so", "very", "today",
      "again", "like", "this"};
  return words;
}

template <class T>
const T& pick(const std::vector<T>& v, desc::Rng& rng) {
  return v[rng.below(v.size())];
}

}  // namespace

void write_fl_corpus(const fs::path& path, std::size_t rows, std::uint64_t seed,
                     std::size_t first_index) {
  desc::Rng rng(seed);
  std::ofstream out(path);
  out << "# id\tlabel\ttext\n";

  for (std::size_t r = 0; r < rows; ++r) {
    const bool ironic = r % 2 == 1;  // row 0 literal, so literal gets id 0
    std::vector<std::string> words;
    const std::size_t fillers = 4 + rng.below(5);
    for (std::size_t i = 0; i < fillers; ++i) {
      words.push_back(pick(filler_words(), rng));
    }
    if (ironic) {
      words.push_back("obviously");
      words.push_back(pick(positive_words(), rng));
      words.push_back(pick(negative_words(), rng));
      if (rng.below(2) == 0) words.push_back(pick(positive_words(), rng));
    } else {
      // single-polarity sentiment, if any
      if (rng.below(4) != 0) {
        const auto& pool = rng.below(2) == 0 ? positive_words() : negative_words();
        const std::size_t n = 1 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) words.push_back(pick(pool, rng));
      }
    }
    rng.shuffle(words);

    std::ostringstream text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      text << (i == 0 ? "" : " ") << words[i];
    }
    text << (rng.below(3) == 0 ? " !" : " .");

    out << "t" << (first_index + r) << '\t' << (ironic ? "ironic" : "literal")
        << '\t' << text.str() << '\n';
  }
}

void write_fixture_config(
    const fs::path& path,
    const std::vector<std::pair<std::string, std::string>>& extra_keys) {
  const fs::path fixtures = fixtures_dir();
  std::ofstream out(path);
  out << "task = binary\n";
  out << "lexicon_sentiwordnet = " << (fixtures / "sentiwordnet.tsv").string() << "\n";
  out << "lexicon_vader = " << (fixtures / "vader.tsv").string() << "\n";
  out << "lexicon_afinn = " << (fixtures / "afinn.tsv").string() << "\n";
  out << "lexicon_depechemood = " << (fixtures / "depechemood.tsv").string() << "\n";
  out << "easy_word_list = " << (fixtures / "easy_words.txt").string() << "\n";
  out << "pos_lexicon = " << (fixtures / "pos_lexicon.tsv").string() << "\n";
  out << "embeddings = " << (fixtures / "embeddings.txt").string() << "\n";
  for (const auto& [key, value] : extra_keys) {
    out << key << " = " << value << "\n";
  }
}

double max_grad_relative_error(
    const std::function<double()>& loss_value,
    const std::function<desc::autodiff::Tensor()>& loss_graph,
    std::vector<desc::models::NamedTensor>& params, double eps) {
  for (auto& p : params) p.tensor.zero_grad();
  desc::autodiff::backward(loss_graph());

  std::vector<std::vector<double>> grads;
  grads.reserve(params.size());
  for (const auto& p : params) {
    grads.emplace_back(p.tensor.grad().begin(), p.tensor.grad().end());
  }

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto values = params[pi].tensor.values_mut();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double saved = values[j];
      values[j] = saved + eps;
      const double up = loss_value();
      values[j] = saved - eps;
      const double down = loss_value();
      values[j] = saved;

      const double fd = (up - down) / (2.0 * eps);
      const double g = grads[pi][j];
      // Central differences on a double-precision loss resolve about
      // |loss|*eps_machine/eps ~ 1e-11 in absolute terms; below that the
      // relative comparison is ill-conditioned, so absolute agreement at the
      // noise floor counts as a match.
      if (std::abs(fd - g) < 1e-10) continue;
      const double denom = std::max(std::abs(fd), std::abs(g));
      worst = std::max(worst, std::abs(fd - g) / denom);
    }
  }
  return worst;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace testutil
