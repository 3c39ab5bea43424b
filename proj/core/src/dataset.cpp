#include "desc/dataset.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

#include "desc/errors.hpp"

namespace desc::cli {

namespace {

std::optional<int> parse_score(const std::string& text) {
  std::string t = text;
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  if (t.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

bool is_unlabeled(const std::string& label) {
  return label.empty() || label == "?";
}

IngestResult ingest_impl(const std::filesystem::path& path, TaskType task,
                         const LabelMap* fixed_labels) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path.string());

  IngestResult result;
  if (task == TaskType::Sentiment11) {
    result.labels = LabelMap::sentiment_scale();
  } else if (fixed_labels != nullptr) {
    result.labels = *fixed_labels;
  }

  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = tab1 == std::string::npos
                                 ? std::string::npos
                                 : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": expected id<TAB>label<TAB>text");
    }
    const std::string id = line.substr(0, tab1);
    const std::string label = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string body = line.substr(tab2 + 1);

    if (id.empty()) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) +
                         ": empty id");
    }
    if (!seen_ids.insert(id).second) {
      throw DuplicateId(path.string() + ":" + std::to_string(line_no) +
                        ": duplicate id '" + id + "'");
    }

    text::Document doc = text::analyze(body);
    if (!is_unlabeled(label)) {
      if (task == TaskType::Sentiment11) {
        const auto score = parse_score(label);
        if (!score || *score < -5 || *score > 5) {
          throw UnparseableLabel(path.string() + ":" + std::to_string(line_no) +
                                 ": sentiment score '" + label +
                                 "' is not an integer in [-5, 5]");
        }
        doc.score = *score;
        doc.label = static_cast<std::size_t>(*score + 5);
      } else {
        std::size_t label_id;
        if (fixed_labels != nullptr) {
          const auto known = result.labels.id_of(label);
          if (!known) {
            throw UnparseableLabel(path.string() + ":" + std::to_string(line_no) +
                                   ": unknown class '" + label + "'");
          }
          label_id = *known;
        } else {
          label_id = result.labels.add_or_get(label);
          if (result.labels.size() > 2) {
            throw UnparseableLabel(path.string() + ":" + std::to_string(line_no) +
                                   ": third class '" + label +
                                   "' in a binary task");
          }
        }
        doc.label = label_id;
      }
    }
    result.ids.push_back(id);
    result.documents.push_back(std::move(doc));
  }
  return result;
}

}  // namespace

const char* task_name(TaskType task) {
  return task == TaskType::Binary ? "binary" : "sentiment11";
}

std::optional<TaskType> task_from_name(std::string_view name) {
  if (name == "binary") return TaskType::Binary;
  if (name == "sentiment11") return TaskType::Sentiment11;
  return std::nullopt;
}

LabelMap LabelMap::sentiment_scale() {
  LabelMap map;
  for (int s = -5; s <= 5; ++s) map.names_.push_back(std::to_string(s));
  return map;
}

std::size_t LabelMap::add_or_get(const std::string& name) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  names_.push_back(name);
  return names_.size() - 1;
}

std::optional<std::size_t> LabelMap::id_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

void LabelMap::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot create " + path.string());
  out << "desc-labels 1\n";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out << i << '\t' << names_[i] << '\n';
  }
}

LabelMap LabelMap::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "desc-labels 1") {
    throw VersionMismatch("unsupported label file header: '" + header + "'");
  }
  LabelMap map;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw VersionMismatch("malformed label file row: '" + line + "'");
    }
    map.names_.push_back(line.substr(tab + 1));
  }
  return map;
}

IngestResult ingest(const std::filesystem::path& path, TaskType task) {
  return ingest_impl(path, task, nullptr);
}

IngestResult ingest_with_labels(const std::filesystem::path& path, TaskType task,
                                const LabelMap& labels) {
  return ingest_impl(path, task, &labels);
}

}  // namespace desc::cli
