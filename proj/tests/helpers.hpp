#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "desc/models.hpp"
#include "desc/rng.hpp"

namespace testutil {

std::filesystem::path fixtures_dir();

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Synthetic figurative-language corpus over the fixture vocabulary. Ironic
// rows always contain the marker token plus clashing sentiment words; literal
// rows never contain the marker. Classes alternate starting with literal, so
// label id 0 = literal and 1 = ironic.
void write_fl_corpus(const std::filesystem::path& path, std::size_t rows,
                     std::uint64_t seed, std::size_t first_index = 0);

// Writes a run-config file pointing at the bundled fixture resources.
void write_fixture_config(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>&
                              extra_keys);

// Central finite differences over every parameter scalar. loss_value must
// rebuild the forward pass from current parameter values. Returns the largest
// relative error against the recorded gradients.
double max_grad_relative_error(const std::function<double()>& loss_value,
                               const std::function<desc::autodiff::Tensor()>&
                                   loss_graph,
                               std::vector<desc::models::NamedTensor>& params,
                               double eps = 1e-5);

std::string read_file(const std::filesystem::path& path);

}  // namespace testutil
