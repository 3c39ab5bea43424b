#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "desc/text.hpp"

namespace desc::cli {

enum class TaskType { Binary, Sentiment11 };

const char* task_name(TaskType task);
std::optional<TaskType> task_from_name(std::string_view name);

// Class-name <-> id mapping. Binary tasks assign ids by first appearance in
// the training file; the sentiment task uses the fixed "-5".."5" scale.
class LabelMap {
 public:
  static LabelMap sentiment_scale();

  std::size_t add_or_get(const std::string& name);
  std::optional<std::size_t> id_of(const std::string& name) const;
  const std::string& name_of(std::size_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  void save_file(const std::filesystem::path& path) const;
  static LabelMap load_file(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
};

struct IngestResult {
  std::vector<text::Document> documents;  // tokenized and sentence-split
  std::vector<std::string> ids;           // aligned with documents
  LabelMap labels;
};

// Reads a UTF-8 TSV of `id<TAB>label<TAB>text` rows. Lines starting with '#'
// are headers/comments. An empty or "?" label leaves the document unlabeled.
// Binary labels are class names capped at two distinct values; sentiment
// labels are integers in [-5, 5] mapped to ids 0..10. Malformed rows abort
// with their row number.
IngestResult ingest(const std::filesystem::path& path, TaskType task);

// Same file walk with a preassigned mapping (evaluate/predict paths).
IngestResult ingest_with_labels(const std::filesystem::path& path, TaskType task,
                                const LabelMap& labels);

}  // namespace desc::cli
