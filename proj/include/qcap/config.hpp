#pragma once

#include <istream>
#include <map>
#include <sstream>

#include "qcap/optim.hpp"

namespace qcap {

struct Diagnostic {
  int line = 0;  // 0 when no single line is responsible
  std::string message;
};

struct SweepSpec {
  std::string parameter;  // "p", "gamma" or "p_i"
  std::vector<double> values;
};

/// One experiment file: task + training hyperparameters + optional sweep.
struct ExperimentConfig {
  TaskSpec task;
  TrainConfig train;
  std::optional<SweepSpec> sweep;
  std::size_t restarts = 3;
  std::string output_dir = "qcap_out";
  std::string name = "experiment";  // stem used for output files

  bool channel_uses_given = false;
  bool loss_given = false;
  std::map<std::string, int> key_lines;  // key -> config line, for diagnostics

  int line_of(const std::string& key) const {
    auto it = key_lines.find(key);
    return it == key_lines.end() ? 0 : it->second;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& s, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (...) {
    return false;
  }
  return used == s.size();
}

inline bool parse_count(const std::string& s, std::size_t& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
  out = std::stoull(s);
  return true;
}

inline bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1") { out = true; return true; }
  if (s == "false" || s == "0") { out = false; return true; }
  return false;
}

}  // namespace detail

/// Flat `key = value` format with dotted section keys; `#` starts a comment.
/// Parse problems are collected as diagnostics, never thrown.
inline ExperimentConfig parse_config(std::istream& in, std::vector<Diagnostic>& diags) {
  ExperimentConfig cfg;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      diags.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (cfg.key_lines.count(key)) {
      diags.push_back({line_no, "duplicate key '" + key + "'"});
      continue;
    }
    cfg.key_lines[key] = line_no;

    auto bad = [&](const std::string& what) { diags.push_back({line_no, "key '" + key + "': " + what}); };
    auto as_double = [&](double& out) { if (!detail::parse_double(value, out)) bad("expected a number"); };
    auto as_count = [&](std::size_t& out) { if (!detail::parse_count(value, out)) bad("expected a nonnegative integer"); };
    auto as_bool = [&](bool& out) { if (!detail::parse_bool(value, out)) bad("expected true/false"); };

    if (key == "task.setting") {
      if (value == "classical") cfg.task.setting = Setting::classical;
      else if (value == "ea_classical") cfg.task.setting = Setting::ea_classical;
      else if (value == "quantum") cfg.task.setting = Setting::quantum;
      else bad("unknown setting '" + value + "'");
    } else if (key == "task.channel.kind") {
      if (value == "bit_flip") cfg.task.channel.kind = ChannelKind::bit_flip;
      else if (value == "phase_flip") cfg.task.channel.kind = ChannelKind::phase_flip;
      else if (value == "depolarizing") cfg.task.channel.kind = ChannelKind::depolarizing;
      else if (value == "amplitude_damping") cfg.task.channel.kind = ChannelKind::amplitude_damping;
      else bad("unknown channel kind '" + value + "'");
    } else if (key == "task.channel.p") {
      as_double(cfg.task.channel.p);
    } else if (key == "task.channel.gamma") {
      as_double(cfg.task.channel.gamma);
    } else if (key == "task.message_bits") {
      as_count(cfg.task.n_message_bits);
    } else if (key == "task.channel_uses") {
      as_count(cfg.task.n_channel_uses);
      cfg.channel_uses_given = true;
    } else if (key == "task.encoder_layers") {
      as_count(cfg.task.encoder_layers);
    } else if (key == "task.decoder_layers") {
      as_count(cfg.task.decoder_layers);
    } else if (key == "task.entangler_layers") {
      as_count(cfg.task.entangler_layers);
    } else if (key == "task.pooling") {
      as_bool(cfg.task.pooling);
    } else if (key == "task.ghz_size") {
      as_count(cfg.task.ghz_size);
    } else if (key == "task.idler_noise_p") {
      as_double(cfg.task.idler_noise_p);
    } else if (key == "task.use_encoder") {
      as_bool(cfg.task.use_encoder);
    } else if (key == "train.steps") {
      as_count(cfg.train.steps);
    } else if (key == "train.learning_rate") {
      as_double(cfg.train.learning_rate);
    } else if (key == "train.beta1") {
      as_double(cfg.train.beta1);
    } else if (key == "train.beta2") {
      as_double(cfg.train.beta2);
    } else if (key == "train.epsilon") {
      as_double(cfg.train.epsilon);
    } else if (key == "train.gradient_method") {
      if (value == "parameter_shift") cfg.train.gradient_method = GradientMethod::parameter_shift;
      else if (value == "central_difference") cfg.train.gradient_method = GradientMethod::central_difference;
      else bad("unknown gradient method '" + value + "'");
    } else if (key == "train.fd_step") {
      as_double(cfg.train.fd_step);
    } else if (key == "train.loss") {
      cfg.loss_given = true;
      if (value == "cross_entropy") cfg.train.loss = LossKind::cross_entropy;
      else if (value == "trace_distance") cfg.train.loss = LossKind::trace_distance;
      else if (value == "infidelity") cfg.train.loss = LossKind::infidelity;
      else if (value == "neg_coherent_info") cfg.train.loss = LossKind::neg_coherent_info;
      else bad("unknown loss '" + value + "'");
    } else if (key == "train.seed") {
      std::size_t s = 0;
      as_count(s);
      cfg.train.seed = s;
    } else if (key == "train.init_scale") {
      as_double(cfg.train.init_scale);
    } else if (key == "train.warmup") {
      as_bool(cfg.train.warmup);
    } else if (key == "sweep.parameter") {
      if (!cfg.sweep) cfg.sweep.emplace();
      cfg.sweep->parameter = value;
    } else if (key == "sweep.values") {
      if (!cfg.sweep) cfg.sweep.emplace();
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ',')) {
        tok = detail::trim(tok);
        if (tok.empty()) continue;
        double v = 0.0;
        if (!detail::parse_double(tok, v)) {
          bad("sweep value '" + tok + "' is not a number");
          break;
        }
        cfg.sweep->values.push_back(v);
      }
    } else if (key == "restarts") {
      as_count(cfg.restarts);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      bad("unknown key");
    }
  }

  // Derive fields the file left out.
  if (!cfg.channel_uses_given) {
    switch (cfg.task.setting) {
      case Setting::classical: cfg.task.n_channel_uses = std::max<std::size_t>(1, cfg.task.n_message_bits); break;
      case Setting::ea_classical: cfg.task.n_channel_uses = cfg.task.n_message_bits / 2; break;
      case Setting::quantum: cfg.task.n_channel_uses = cfg.task.ghz_size - 1; break;
    }
  }
  if (!cfg.loss_given)
    cfg.train.loss = (cfg.task.setting == Setting::quantum) ? LossKind::trace_distance
                                                            : LossKind::cross_entropy;
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text, std::vector<Diagnostic>& diags) {
  std::istringstream in(text);
  return parse_config(in, diags);
}

/// Every invariant violation is reported at once; an empty result means the
/// config can run.
inline std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
  std::vector<Diagnostic> out;
  const TaskSpec& t = cfg.task;
  auto report = [&](const std::string& key, const std::string& msg) {
    out.push_back({cfg.line_of(key), msg});
  };

  auto check01 = [&](double v, const std::string& key, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) report(key, what + " must lie in [0,1]");
  };
  check01(t.channel.p, "task.channel.p", "channel p");
  check01(t.channel.gamma, "task.channel.gamma", "channel gamma");
  check01(t.idler_noise_p, "task.idler_noise_p", "idler noise probability");

  switch (t.setting) {
    case Setting::classical:
      if (t.n_message_bits < 1) report("task.message_bits", "need at least one message bit");
      if (t.pooling) {
        if (t.n_channel_uses < 2) report("task.pooling", "pooling requires more than one channel use");
        if (t.n_message_bits != 1)
          report("task.pooling", "pooling reads a single wire and carries exactly one message bit");
      } else if (t.n_channel_uses < t.n_message_bits) {
        report("task.channel_uses", "channel uses must be >= message bits when pooling is off");
      }
      if (t.idler_noise_p > 0.0)
        report("task.idler_noise_p", "idler noise applies to ea_classical/quantum settings only");
      break;
    case Setting::ea_classical:
      if (t.n_message_bits < 2 || t.n_message_bits % 2 != 0)
        report("task.message_bits", "ea_classical uses 2 message bits per entangled pair");
      else if (t.n_channel_uses != t.n_message_bits / 2)
        report("task.channel_uses", "ea_classical channel uses must equal the pair count");
      if (t.entangler_layers < 1) report("task.entangler_layers", "need at least one entangler layer");
      if (t.pooling) report("task.pooling", "pooling applies to the classical setting only");
      break;
    case Setting::quantum:
      if (t.ghz_size < 2) report("task.ghz_size", "ghz_size must be at least 2");
      if (t.ghz_size > kMaxQubits)
        report("task.ghz_size", "ghz_size exceeds the 10-qubit simulator cap");
      if (t.n_channel_uses != t.ghz_size - 1)
        report("task.channel_uses", "quantum channel uses must equal ghz_size - 1");
      if (t.pooling) report("task.pooling", "pooling applies to the classical setting only");
      break;
  }

  const TrainConfig& tr = cfg.train;
  if (tr.steps < 1) report("train.steps", "need at least one training step");
  if (!(tr.learning_rate > 0.0)) report("train.learning_rate", "learning rate must be positive");
  if (!(tr.beta1 > 0.0 && tr.beta1 < 1.0)) report("train.beta1", "beta1 must lie in (0,1)");
  if (!(tr.beta2 > 0.0 && tr.beta2 < 1.0)) report("train.beta2", "beta2 must lie in (0,1)");
  if (!(tr.epsilon > 0.0)) report("train.epsilon", "epsilon must be positive");
  if (!(tr.fd_step > 0.0)) report("train.fd_step", "finite-difference step must be positive");
  if (tr.init_scale < 0.0) report("train.init_scale", "init scale must be nonnegative");
  if (!loss_compatible(t.setting, tr.loss))
    report("train.loss", std::string("loss ") + loss_kind_name(tr.loss) + " is incompatible with the " +
                             setting_name(t.setting) + " setting");

  if (cfg.sweep) {
    const std::string& par = cfg.sweep->parameter;
    if (par != "p" && par != "gamma" && par != "p_i")
      report("sweep.parameter", "sweep parameter must be one of p, gamma, p_i");
    if (par == "gamma" && t.channel.kind != ChannelKind::amplitude_damping)
      report("sweep.parameter", std::string("gamma sweep needs the amplitude_damping channel, not ") +
                                    channel_kind_name(t.channel.kind));
    if (par == "p_i" && t.setting == Setting::classical)
      report("sweep.parameter", "p_i sweep applies to ea_classical/quantum settings only");
    for (double v : cfg.sweep->values)
      if (!(v >= 0.0 && v <= 1.0)) {
        report("sweep.values", "sweep values must lie in [0,1]");
        break;
      }
  }
  if (cfg.restarts < 1) report("restarts", "need at least one restart");
  return out;
}

}  // namespace qcap
