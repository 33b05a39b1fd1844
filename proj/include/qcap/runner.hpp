#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "qcap/config.hpp"

namespace qcap {

struct RunOptions {
  std::optional<std::string> output_dir;  // overrides the config's output_dir
  std::size_t workers = 1;
};

/// One CSV row: a single (sweep value, restart) training run.
struct RunRow {
  std::string setting;
  std::string channel_kind;
  std::string sweep_parameter;
  double sweep_value = 0.0;
  std::uint64_t restart_seed = 0;
  std::size_t steps = 0;
  double final_loss = 0.0;
  double learned_rate = 0.0;
  std::optional<double> reference_rate;
  std::string reference_kind;
  bool best = false;
  double wall_time_s = 0.0;
  ModelParameters params;
  TaskSpec task;
};

namespace detail {

inline std::string fmt_double(double v, const char* format = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

inline TaskSpec task_with_sweep_value(TaskSpec task, const std::string& parameter, double value) {
  if (parameter == "p") task.channel.p = value;
  else if (parameter == "gamma") task.channel.gamma = value;
  else if (parameter == "p_i") task.idler_noise_p = value;
  else if (parameter != "none") throw std::invalid_argument("unknown sweep parameter " + parameter);
  return task;
}

inline void write_param_line(std::ostream& os, const char* name, const std::vector<double>& v) {
  os << name << " =";
  for (double x : v) os << ' ' << fmt_double(x, "%.17g");
  os << '\n';
}

}  // namespace detail

inline void write_checkpoint(const std::filesystem::path& path, const TaskSpec& task,
                             const ModelParameters& params) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  os << "# trained parameters and the task they belong to\n";
  os << "task.setting = " << setting_name(task.setting) << '\n';
  os << "task.channel.kind = " << channel_kind_name(task.channel.kind) << '\n';
  os << "task.channel.p = " << detail::fmt_double(task.channel.p, "%.17g") << '\n';
  os << "task.channel.gamma = " << detail::fmt_double(task.channel.gamma, "%.17g") << '\n';
  os << "task.message_bits = " << task.n_message_bits << '\n';
  os << "task.channel_uses = " << task.n_channel_uses << '\n';
  os << "task.encoder_layers = " << task.encoder_layers << '\n';
  os << "task.decoder_layers = " << task.decoder_layers << '\n';
  os << "task.entangler_layers = " << task.entangler_layers << '\n';
  os << "task.pooling = " << (task.pooling ? "true" : "false") << '\n';
  os << "task.ghz_size = " << task.ghz_size << '\n';
  os << "task.idler_noise_p = " << detail::fmt_double(task.idler_noise_p, "%.17g") << '\n';
  os << "task.use_encoder = " << (task.use_encoder ? "true" : "false") << '\n';
  detail::write_param_line(os, "theta", params.theta);
  detail::write_param_line(os, "phi", params.phi);
  detail::write_param_line(os, "lambda", params.lambda);
  detail::write_param_line(os, "pi", params.pi);
}

/// Reads back what write_checkpoint produced, for re-evaluation without
/// retraining.
inline std::pair<TaskSpec, ModelParameters> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::string task_text;
  ModelParameters params;
  std::string line;
  while (std::getline(is, line)) {
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = detail::trim(trimmed.substr(0, eq));
    const std::string value = detail::trim(trimmed.substr(eq + 1));
    auto parse_vec = [&](std::vector<double>& out) {
      std::istringstream vs(value);
      double x = 0.0;
      while (vs >> x) out.push_back(x);
    };
    if (key == "theta") parse_vec(params.theta);
    else if (key == "phi") parse_vec(params.phi);
    else if (key == "lambda") parse_vec(params.lambda);
    else if (key == "pi") parse_vec(params.pi);
    else task_text += trimmed + "\n";
  }
  std::vector<Diagnostic> diags;
  const ExperimentConfig cfg = parse_config_text(task_text, diags);
  if (!diags.empty()) throw std::runtime_error("malformed checkpoint " + path.string());
  return {cfg.task, params};
}

inline std::string csv_header() {
  return "setting,channel_kind,sweep_parameter,sweep_value,restart_seed,steps,final_loss,"
         "learned_rate_bits,reference_rate_bits,reference_kind,best_flag,wall_time_s";
}

inline std::string csv_line(const RunRow& r) {
  std::string out;
  out += r.setting;
  out += ',';
  out += r.channel_kind;
  out += ',';
  out += r.sweep_parameter;
  out += ',';
  out += detail::fmt_double(r.sweep_value);
  out += ',';
  out += std::to_string(r.restart_seed);
  out += ',';
  out += std::to_string(r.steps);
  out += ',';
  out += detail::fmt_double(r.final_loss);
  out += ',';
  out += detail::fmt_double(r.learned_rate);
  out += ',';
  if (r.reference_rate) out += detail::fmt_double(*r.reference_rate);
  out += ',';
  out += r.reference_kind;
  out += ',';
  out += r.best ? '1' : '0';
  out += ',';
  out += detail::fmt_double(r.wall_time_s, "%.3f");
  return out;
}

/// Executes the experiment: every sweep value x restart is trained (in a
/// bounded worker pool), rows land in deterministic (sweep value, seed)
/// order, the best restart per sweep value is flagged and checkpointed.
/// Returns the path of the results CSV.
inline std::filesystem::path run_experiment(const ExperimentConfig& cfg, const RunOptions& opts,
                                            std::ostream& log) {
  const std::vector<Diagnostic> diags = validate(cfg);
  if (!diags.empty()) throw std::invalid_argument("run_experiment: config failed validation");

  const std::string sweep_parameter = cfg.sweep && !cfg.sweep->values.empty() ? cfg.sweep->parameter : "none";
  std::vector<double> sweep_values;
  if (cfg.sweep && !cfg.sweep->values.empty()) sweep_values = cfg.sweep->values;
  else sweep_values = {cfg.task.channel.p};  // degenerate sweep: one run at the fixed parameters

  const std::size_t n_jobs = sweep_values.size() * cfg.restarts;
  std::vector<RunRow> rows(n_jobs);
  std::vector<std::string> errors(n_jobs);

  auto run_job = [&](std::size_t job) {
    const std::size_t value_idx = job / cfg.restarts;
    const std::size_t restart = job % cfg.restarts;
    try {
      TaskSpec task = cfg.task;
      if (sweep_parameter != "none")
        task = detail::task_with_sweep_value(task, sweep_parameter, sweep_values[value_idx]);
      TrainConfig tc = cfg.train;
      tc.seed = cfg.train.seed + restart;
      const Model model = build_model(task);
      const TrainReport rep = train(model, tc);
      const RateRecord rec = rate_record(model, rep);

      RunRow& r = rows[job];
      r.setting = setting_name(rec.setting);
      r.channel_kind = channel_kind_name(rec.channel.kind);
      r.sweep_parameter = sweep_parameter;
      r.sweep_value = sweep_values[value_idx];
      r.restart_seed = tc.seed;
      r.steps = tc.steps;
      r.final_loss = rep.loss_history.empty() ? 0.0 : rep.loss_history.back();
      r.learned_rate = rec.learned_rate;
      r.reference_rate = rec.reference_rate;
      r.reference_kind = reference_kind_name(rec.reference_kind);
      r.wall_time_s = rep.wall_time_s;
      r.params = rep.final_params;
      r.task = task;
    } catch (const std::exception& e) {
      errors[job] = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, n_jobs));
  if (workers == 1) {
    for (std::size_t job = 0; job < n_jobs; ++job) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t job = next.fetch_add(1); job < n_jobs; job = next.fetch_add(1)) run_job(job);
      });
    for (std::thread& th : pool) th.join();
  }
  for (std::size_t job = 0; job < n_jobs; ++job)
    if (!errors[job].empty()) throw numerical_error("run " + std::to_string(job) + ": " + errors[job]);

  for (std::size_t v = 0; v < sweep_values.size(); ++v) {
    std::size_t best = v * cfg.restarts;
    for (std::size_t r = 1; r < cfg.restarts; ++r)
      if (rows[v * cfg.restarts + r].learned_rate > rows[best].learned_rate) best = v * cfg.restarts + r;
    rows[best].best = true;
  }

  const std::filesystem::path out_dir = opts.output_dir.value_or(cfg.output_dir);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path = out_dir / (cfg.name + "_results.csv");
  {
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot write " + csv_path.string());
    os << csv_header() << '\n';
    for (const RunRow& r : rows) os << csv_line(r) << '\n';
  }

  for (const RunRow& r : rows) {
    if (!r.best) continue;
    const std::filesystem::path ckpt =
        out_dir / (cfg.name + "_" + sweep_parameter + "=" + detail::fmt_double(r.sweep_value, "%.6g") +
                   "_best.ckpt");
    write_checkpoint(ckpt, r.task, r.params);
    log << "sweep " << sweep_parameter << "=" << detail::fmt_double(r.sweep_value, "%.6g")
        << "  best seed " << r.restart_seed << "  rate " << detail::fmt_double(r.learned_rate, "%.4f");
    if (r.reference_rate)
      log << "  reference " << detail::fmt_double(*r.reference_rate, "%.4f") << " (" << r.reference_kind << ")";
    log << '\n';
  }
  log << "wrote " << csv_path.string() << '\n';
  return csv_path;
}

/// Converts a results CSV into a tidy per-sweep-point plot file
/// (x, learned, reference), best restarts only, one block per
/// (setting, channel) group. Returns the path written.
inline std::filesystem::path emit_curve(const std::filesystem::path& csv_path, std::ostream& log) {
  std::ifstream is(csv_path);
  if (!is) throw std::runtime_error("cannot read " + csv_path.string());
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty csv " + csv_path.string());

  struct CurveRow {
    std::string group;
    double x;
    std::string learned, reference;
  };
  std::vector<CurveRow> rows;
  while (std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 12) cells.emplace_back();
    if (cells[10] != "1") continue;  // best_flag
    rows.push_back({cells[0] + " " + cells[1], std::stod(cells[3]), cells[7], cells[8]});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    return a.group != b.group ? a.group < b.group : a.x < b.x;
  });

  std::filesystem::path out_path = csv_path;
  out_path.replace_filename(csv_path.stem().string() + "_curve.tsv");
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("cannot write " + out_path.string());
  std::string group;
  for (const CurveRow& r : rows) {
    if (r.group != group) {
      if (!group.empty()) os << '\n';
      group = r.group;
      os << "# " << group << "\n# x\tlearned\treference\n";
    }
    os << detail::fmt_double(r.x) << '\t' << r.learned << '\t' << r.reference << '\n';
  }
  log << "wrote " << out_path.string() << '\n';
  return out_path;
}

}  // namespace qcap
