#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "desc/commands.hpp"
#include "desc/errors.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::string model_dir;
  std::string input_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_model_dir,
                bool needs_input) {
  cmd->add_option("--config", opts.config_path, "run configuration file")
      ->required();
  auto* model = cmd->add_option("--model-dir", opts.model_dir,
                                "directory holding trained artifacts");
  if (needs_model_dir) model->required();
  auto* input = cmd->add_option("--input", opts.input_file, "input TSV file");
  if (needs_input) input->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "seed override (u64)");
}

desc::cli::RunConfig load(const CommonOptions& opts) {
  auto config = desc::cli::load_config(opts.config_path, opts.seed);
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  return config;
}

// Streams to --out/<name> when an output directory was given, else stdout.
int run_streaming(const CommonOptions& opts, const char* file_name,
                  const std::function<void(std::ostream&)>& fn) {
  if (opts.out_dir.empty()) {
    fn(std::cout);
    return 0;
  }
  fs::create_directories(fs::path(opts.out_dir) / "reports");
  const fs::path path = fs::path(opts.out_dir) / "reports" / file_name;
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot create " << path << "\n";
    return 1;
  }
  fn(out);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"figurative-language classification toolkit"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts, predict_opts, extract_opts, profile_opts;

  auto* train = app.add_subcommand("train", "fit the three members and the ensemble");
  add_common(train, train_opts, false, false);

  auto* evaluate = app.add_subcommand("evaluate", "score trained models on a test file");
  add_common(evaluate, eval_opts, true, true);

  auto* predict = app.add_subcommand("predict", "label new rows with the ensemble");
  add_common(predict, predict_opts, true, true);

  auto* extract = app.add_subcommand("extract-features",
                                     "emit the engineered feature CSV");
  add_common(extract, extract_opts, false, true);

  auto* profile = app.add_subcommand("profile", "per-class feature means");
  add_common(profile, profile_opts, false, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const auto config = load(train_opts);
      const auto outcome = desc::cli::cmd_train(config);
      std::cout << "trained ensemble -> " << outcome.output_dir.string() << "\n";
      for (std::size_t i = 0; i < desc::ensemble::kMemberCount; ++i) {
        std::cout << "  " << desc::ensemble::kMemberNames[i]
                  << " cv_f1=" << outcome.member_cv_f1[i]
                  << " weight=" << outcome.weights.w[i] << "\n";
      }
      return 0;
    }
    if (evaluate->parsed()) {
      const auto config = load(eval_opts);
      const auto outcome = desc::cli::cmd_evaluate(
          config, eval_opts.model_dir, eval_opts.input_file,
          eval_opts.out_dir.empty() ? fs::path{} : fs::path(eval_opts.out_dir));
      std::cout << "wrote " << outcome.report_json.string() << "\n";
      for (const auto& row : outcome.binary) {
        std::cout << "  " << row.name << " acc=" << row.accuracy
                  << " macro_f1=" << row.macro_f1 << " auc=" << row.auc << "\n";
      }
      for (const auto& row : outcome.sentiment) {
        std::cout << "  " << row.name << " cosine=" << row.cosine
                  << " mse=" << row.mse << "\n";
      }
      return 0;
    }
    if (predict->parsed()) {
      const auto config = load(predict_opts);
      return run_streaming(predict_opts, "predictions.tsv", [&](std::ostream& out) {
        desc::cli::cmd_predict(config, predict_opts.model_dir,
                               predict_opts.input_file, out);
      });
    }
    if (extract->parsed()) {
      const auto config = load(extract_opts);
      return run_streaming(extract_opts, "features.csv", [&](std::ostream& out) {
        desc::cli::cmd_extract_features(config, extract_opts.input_file, out);
      });
    }
    if (profile->parsed()) {
      const auto config = load(profile_opts);
      return run_streaming(profile_opts, "profile.csv", [&](std::ostream& out) {
        desc::cli::cmd_profile(config, profile_opts.input_file, out);
      });
    }
  } catch (const desc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
