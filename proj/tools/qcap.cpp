// qcap: experiment runner for the variational channel-coding lab.
//   qcap run <config> [--output-dir PATH] [--workers N]
//   qcap validate <config>
//   qcap curve <csv>
// Exit codes: 0 success, 2 config error, 3 runtime numerical failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qcap/qcap.hpp"

namespace {

std::string stem_of(const std::string& path) {
  const std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  return stem.empty() ? "experiment" : stem;
}

int load_config(const std::string& path, qcap::ExperimentConfig& cfg) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << path << ": cannot open config file\n";
    return 2;
  }
  std::vector<qcap::Diagnostic> diags;
  cfg = qcap::parse_config(is, diags);
  cfg.name = stem_of(path);
  const std::vector<qcap::Diagnostic> more = qcap::validate(cfg);
  diags.insert(diags.end(), more.begin(), more.end());
  if (!diags.empty()) {
    for (const qcap::Diagnostic& d : diags) std::cerr << path << ":" << d.line << ": " << d.message << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational channel-coding lab"};
  app.require_subcommand(1);

  std::string config_path, csv_path, output_dir;
  std::size_t workers = 1;

  CLI::App* run = app.add_subcommand("run", "train and evaluate an experiment config");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--output-dir", output_dir, "override the config's output directory");
  run->add_option("--workers", workers, "parallel (sweep value x restart) jobs")
      ->envname("QCAP_WORKERS");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config_path, "experiment config file")->required();

  CLI::App* curve = app.add_subcommand("curve", "emit plot data from a results CSV");
  curve->add_option("csv", csv_path, "results CSV produced by `qcap run`")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      qcap::ExperimentConfig cfg;
      if (const int rc = load_config(config_path, cfg); rc != 0) return rc;
      qcap::RunOptions opts;
      if (!output_dir.empty()) opts.output_dir = output_dir;
      opts.workers = std::max<std::size_t>(1, workers);
      qcap::run_experiment(cfg, opts, std::cout);
    } else if (validate->parsed()) {
      qcap::ExperimentConfig cfg;
      if (const int rc = load_config(config_path, cfg); rc != 0) return rc;
      std::cout << config_path << ": ok\n";
    } else if (curve->parsed()) {
      qcap::emit_curve(csv_path, std::cout);
    }
  } catch (const qcap::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
