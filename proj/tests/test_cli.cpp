#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcap/runner.hpp"

using namespace qcap;

namespace {

namespace fs = std::filesystem;

ExperimentConfig parse_ok(const std::string& text) {
  std::vector<Diagnostic> diags;
  const ExperimentConfig cfg = parse_config_text(text, diags);
  REQUIRE(diags.empty());
  return cfg;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("qcap_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// CSV text with the wall_time column blanked, for determinism comparisons.
std::string strip_wall_time(const std::string& csv) {
  std::string out;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line)) {
    const auto comma = line.rfind(',');
    out += line.substr(0, comma);
    out += '\n';
  }
  return out;
}

const char* kClassicalSweep =
    "task.setting = classical\n"
    "task.channel.kind = bit_flip\n"
    "task.message_bits = 1\n"
    "task.use_encoder = true\n"
    "train.steps = 40\n"
    "train.seed = 1\n"
    "sweep.parameter = p\n"
    "sweep.values = 0.0, 0.1, 0.2, 0.3\n"
    "restarts = 2\n";

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing fills defaults and derived fields") {
  const ExperimentConfig cfg = parse_ok(
      "task.setting = quantum\n"
      "task.channel.kind = phase_flip\n"
      "task.channel.p = 0.1\n"
      "task.ghz_size = 3\n");
  CHECK(cfg.task.setting == Setting::quantum);
  CHECK(cfg.task.n_channel_uses == 2);  // derived ghz_size - 1
  CHECK(cfg.train.loss == LossKind::trace_distance);
  CHECK(cfg.restarts == 3);
  CHECK(validate(cfg).empty());

  const ExperimentConfig ea = parse_ok(
      "task.setting = ea_classical\n"
      "task.channel.kind = phase_flip\n"
      "task.message_bits = 2\n");
  CHECK(ea.task.n_channel_uses == 1);
  CHECK(ea.train.loss == LossKind::cross_entropy);
}

TEST_CASE("parser reports line-numbered problems") {
  std::vector<Diagnostic> diags;
  (void)parse_config_text(
      "task.setting = classical\n"
      "task.channel.kind = warp_drive\n"
      "task.channel.p = fast\n"
      "nonsense.key = 1\n"
      "task.channel.p = 0.2\n",
      diags);
  REQUIRE(diags.size() == 4);  // bad kind, bad number, unknown key, duplicate
  CHECK(diags[0].line == 2);
  CHECK(diags[1].line == 3);
  CHECK(diags[2].line == 4);
  CHECK(diags[3].line == 5);
}

TEST_CASE("validation reports every violation at once") {
  const ExperimentConfig cfg = parse_ok(
      "task.setting = classical\n"
      "task.channel.kind = bit_flip\n"
      "task.channel.p = 1.2\n"
      "task.message_bits = 1\n"
      "task.channel_uses = 1\n"
      "task.pooling = true\n");
  const std::vector<Diagnostic> diags = validate(cfg);
  REQUIRE(diags.size() == 2);
  bool saw_range = false, saw_pooling = false;
  for (const Diagnostic& d : diags) {
    if (d.message.find("[0,1]") != std::string::npos) {
      saw_range = true;
      CHECK(d.line == 3);
    }
    if (d.message.find("pooling") != std::string::npos) {
      saw_pooling = true;
      CHECK(d.line == 6);
    }
  }
  CHECK(saw_range);
  CHECK(saw_pooling);

  CHECK(validate(parse_ok(kClassicalSweep)).empty());
}

TEST_CASE("validation flags incompatible loss and sweep parameters") {
  const ExperimentConfig bad_loss = parse_ok(
      "task.setting = classical\n"
      "task.channel.kind = bit_flip\n"
      "train.loss = trace_distance\n");
  CHECK(validate(bad_loss).size() == 1);

  const ExperimentConfig bad_sweep = parse_ok(
      "task.setting = classical\n"
      "task.channel.kind = bit_flip\n"
      "sweep.parameter = gamma\n"
      "sweep.values = 0.1, 1.5\n");
  CHECK(validate(bad_sweep).size() == 2);  // gamma without damping + out-of-range value
}

TEST_CASE("run_experiment writes CSV, flags best restarts, checkpoints round-trip") {
  ExperimentConfig cfg = parse_ok(kClassicalSweep);
  cfg.name = "sweep_test";
  const fs::path dir = fresh_dir("runner");
  RunOptions opts;
  opts.output_dir = dir.string();
  opts.workers = 2;
  std::ostringstream log;
  const fs::path csv = run_experiment(cfg, opts, log);

  const std::string text = slurp(csv);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == csv_header());
  std::size_t rows = 0, best = 0;
  double max_rate = 0.0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 12);
    CHECK(cells[0] == "classical");
    CHECK(cells[1] == "bit_flip");
    CHECK(cells[9] == "closed_form");
    const double learned = std::stod(cells[7]);
    const double reference = std::stod(cells[8]);
    CHECK(learned <= reference + 0.02);  // true capacity is never exceeded
    max_rate = std::max(max_rate, learned);
    if (cells[10] == "1") ++best;
  }
  CHECK(rows == 8);  // 4 sweep values x 2 restarts
  CHECK(best == 4);
  CHECK(max_rate > 0.9);  // p=0 point trains to ~1 bit even in 40 steps

  // checkpoints: one per sweep value, reloadable
  const fs::path ckpt = dir / "sweep_test_p=0.1_best.ckpt";
  REQUIRE(fs::exists(ckpt));
  const auto [task, params] = read_checkpoint(ckpt);
  CHECK(task.channel.p == doctest::Approx(0.1));
  const Model model = build_model(task);
  CHECK(flatten(params).size() == model.layout.total());
  CHECK_NOTHROW((void)evaluate_metric(model, flatten(params)));
}

TEST_CASE("identical configs reproduce identical CSV bytes except wall time") {
  ExperimentConfig cfg = parse_ok(
      "task.setting = classical\n"
      "task.channel.kind = depolarizing\n"
      "task.channel.p = 0.15\n"
      "train.steps = 25\n"
      "restarts = 2\n");
  cfg.name = "det";
  const fs::path dir = fresh_dir("determinism");
  RunOptions opts;
  opts.output_dir = dir.string();
  std::ostringstream log;
  const std::string first = slurp(run_experiment(cfg, opts, log));
  const std::string second = slurp(run_experiment(cfg, opts, log));
  CHECK(strip_wall_time(first) == strip_wall_time(second));
  CHECK(first.size() == second.size());
}

TEST_CASE("emit_curve produces aligned plot rows") {
  ExperimentConfig cfg = parse_ok(kClassicalSweep);
  cfg.name = "curve_test";
  const fs::path dir = fresh_dir("curve");
  RunOptions opts;
  opts.output_dir = dir.string();
  std::ostringstream log;
  const fs::path csv = run_experiment(cfg, opts, log);
  const fs::path curve = emit_curve(csv, log);

  const std::string text = slurp(curve);
  std::istringstream lines(text);
  std::string line;
  std::size_t data_rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++data_rows;
    // x \t learned \t reference, all populated for the closed-form channel
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    REQUIRE(cells.size() == 3);
    CHECK_FALSE(cells[2].empty());
  }
  CHECK(data_rows == 4);
}

TEST_CASE("curve leaves missing references empty") {
  // quantum bit_flip has no reference entry: the column stays blank
  ExperimentConfig cfg = parse_ok(
      "task.setting = quantum\n"
      "task.channel.kind = bit_flip\n"
      "task.channel.p = 0.05\n"
      "task.ghz_size = 2\n"
      "train.steps = 5\n"
      "restarts = 1\n");
  cfg.name = "noref";
  const fs::path dir = fresh_dir("noref");
  RunOptions opts;
  opts.output_dir = dir.string();
  std::ostringstream log;
  const fs::path csv = run_experiment(cfg, opts, log);
  const fs::path curve = emit_curve(csv, log);
  std::istringstream lines(slurp(curve));
  std::string line;
  bool saw_data = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    saw_data = true;
    CHECK(line.back() == '\t');  // empty reference cell
  }
  CHECK(saw_data);
}

TEST_CASE("ea quick run stays below the Pauli EA capacity") {
  ExperimentConfig cfg = parse_ok(
      "task.setting = ea_classical\n"
      "task.channel.kind = phase_flip\n"
      "task.channel.p = 0.1\n"
      "task.message_bits = 2\n"
      "train.steps = 60\n"
      "restarts = 2\n");
  cfg.name = "ea_quick";
  const fs::path dir = fresh_dir("ea");
  RunOptions opts;
  opts.output_dir = dir.string();
  std::ostringstream log;
  const fs::path csv = run_experiment(cfg, opts, log);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    CHECK(std::stod(cells[7]) <= std::stod(cells[8]) + 0.02);
  }
}

TEST_SUITE_END();
