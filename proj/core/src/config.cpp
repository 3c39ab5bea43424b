#include "desc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

#include "desc/errors.hpp"

namespace desc::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double to_real(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  }
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': '" + value +
                      "' is not an unsigned integer");
  }
  return v;
}

std::vector<std::size_t> to_width_list(const std::string& key,
                                       const std::string& value) {
  std::vector<std::size_t> widths;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string part =
        trim(comma == std::string::npos ? value.substr(start)
                                        : value.substr(start, comma - start));
    if (part.empty()) {
      throw ConfigError("config key '" + key + "': empty width in '" + value + "'");
    }
    widths.push_back(static_cast<std::size_t>(to_u64(key, part)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (widths.empty()) {
    throw ConfigError("config key '" + key + "': no widths given");
  }
  return widths;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open config " + path.string());

  RunConfig config;
  std::unordered_set<std::string> seen;
  bool task_set = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": empty key");
    }
    if (!seen.insert(key).second) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }

    if (key == "task") {
      const auto task = task_from_name(value);
      if (!task) {
        throw ConfigError("config: unknown task '" + value +
                          "' (binary | sentiment11)");
      }
      config.task = *task;
      task_set = true;
    } else if (key == "train_file") {
      config.train_file = value;
    } else if (key == "lexicon_sentiwordnet") {
      config.lexicon_sentiwordnet = value;
    } else if (key == "lexicon_vader") {
      config.lexicon_vader = value;
    } else if (key == "lexicon_afinn") {
      config.lexicon_afinn = value;
    } else if (key == "lexicon_depechemood") {
      config.lexicon_depechemood = value;
    } else if (key == "easy_word_list") {
      config.easy_word_list = value;
    } else if (key == "pos_lexicon") {
      config.pos_lexicon = value;
    } else if (key == "embeddings") {
      config.embeddings = value;
    } else if (key == "epochs") {
      config.train.epochs = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "batch_size") {
      config.train.batch_size = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "learning_rate") {
      config.train.learning_rate = to_real(key, value);
    } else if (key == "seed") {
      config.train.seed = to_u64(key, value);
      config.seed_set = true;
    } else if (key == "clip_norm") {
      config.train.clip_norm = to_real(key, value);
    } else if (key == "adam_beta1") {
      config.train.beta1 = to_real(key, value);
    } else if (key == "adam_beta2") {
      config.train.beta2 = to_real(key, value);
    } else if (key == "adam_epsilon") {
      config.train.adam_epsilon = to_real(key, value);
    } else if (key == "patience") {
      config.train.patience = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "validation_fraction") {
      config.train.validation_fraction = to_real(key, value);
    } else if (key == "dropout") {
      config.train.dropout = to_real(key, value);
    } else if (key == "hidden_dim") {
      config.model.hidden_dim = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "mid_dense_dim") {
      config.model.mid_dense_dim = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "dnn_widths") {
      config.model.dnn_widths = to_width_list(key, value);
    } else if (key == "leaky_slope") {
      config.model.leaky_slope = to_real(key, value);
    } else if (key == "max_seq_len") {
      config.model.max_seq_len = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "tfidf_min_df") {
      config.tfidf_min_df = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "cv_folds") {
      config.cv_folds = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "f1_flavor") {
      if (value == "macro") {
        config.f1_flavor = ensemble::F1Flavor::Macro;
      } else if (value == "positive") {
        config.f1_flavor = ensemble::F1Flavor::Positive;
      } else {
        throw ConfigError("config: unknown f1_flavor '" + value +
                          "' (macro | positive)");
      }
    } else if (key == "decode") {
      if (value == "argmax") {
        config.decode = DecodeMode::Argmax;
      } else if (value == "expectation") {
        config.decode = DecodeMode::Expectation;
      } else {
        throw ConfigError("config: unknown decode '" + value +
                          "' (argmax | expectation)");
      }
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }

  if (!task_set) throw ConfigError("config: missing required key 'task'");
  if (seed_override) {
    config.train.seed = *seed_override;
    config.seed_set = true;
  }
  if (!config.seed_set) {
    throw ConfigError("config: a seed is required (key 'seed' or --seed)");
  }
  if (config.model.max_seq_len == 0) {
    throw ConfigError("config: max_seq_len must be positive");
  }
  if (config.train.epochs == 0 || config.train.batch_size == 0) {
    throw ConfigError("config: epochs and batch_size must be positive");
  }
  return config;
}

}  // namespace desc::cli
