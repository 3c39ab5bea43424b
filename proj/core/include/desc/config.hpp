#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "desc/dataset.hpp"
#include "desc/ensemble.hpp"
#include "desc/models.hpp"

namespace desc::cli {

enum class DecodeMode { Argmax, Expectation };

struct RunConfig {
  TaskType task = TaskType::Binary;
  std::filesystem::path train_file;

  // resources
  std::filesystem::path lexicon_sentiwordnet;
  std::filesystem::path lexicon_vader;
  std::filesystem::path lexicon_afinn;
  std::filesystem::path lexicon_depechemood;  // mood lexicon, 8 scores per word
  std::filesystem::path easy_word_list;
  std::filesystem::path pos_lexicon;
  std::filesystem::path embeddings;

  models::TrainConfig train;
  models::ModelConfig model;  // classes/input_dim filled by the pipeline
  std::size_t tfidf_min_df = 2;

  std::size_t cv_folds = 5;
  ensemble::F1Flavor f1_flavor = ensemble::F1Flavor::Macro;
  DecodeMode decode = DecodeMode::Argmax;

  std::filesystem::path output_dir;
  bool seed_set = false;
};

// Flat `key = value` file, UTF-8, '#' comments. Unknown or duplicate keys are
// errors; the seed must come from the file or the command line, never a
// silent default.
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace desc::cli
