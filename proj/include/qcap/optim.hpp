#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <numbers>

#include "qcap/metrics.hpp"

namespace qcap {

enum class GradientMethod { parameter_shift, central_difference };
enum class LossKind { cross_entropy, trace_distance, infidelity, neg_coherent_info };

inline const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::cross_entropy: return "cross_entropy";
    case LossKind::trace_distance: return "trace_distance";
    case LossKind::infidelity: return "infidelity";
    case LossKind::neg_coherent_info: return "neg_coherent_info";
  }
  return "?";
}

struct TrainConfig {
  std::size_t steps = 500;
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  GradientMethod gradient_method = GradientMethod::central_difference;
  double fd_step = 1e-4;
  LossKind loss = LossKind::cross_entropy;
  std::uint64_t seed = 1;
  double init_scale = 0.1;
  bool warmup = false;  // linear LR ramp over the first 5% of steps
};

struct TrainReport {
  std::vector<double> loss_history;
  ModelParameters final_params;
  double evaluated_metric = 0.0;      // bits; MI or regularized coherent info
  std::optional<double> reference_value;
  ReferenceKind reference_kind = ReferenceKind::none;
  double wall_time_s = 0.0;
};

/// -(1/k) sum_i log2 p(target_i | row_i), probabilities floored at 1e-12.
inline double cross_entropy_loss(const std::vector<std::vector<double>>& rows,
                                 std::span<const std::size_t> targets) {
  if (rows.empty() || rows.size() != targets.size())
    throw std::invalid_argument("cross_entropy_loss: empty batch or size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double pr = std::max(rows[i].at(targets[i]), 1e-12);
    acc -= std::log2(pr);
  }
  return acc / static_cast<double>(rows.size());
}

inline double trace_distance_loss(const DensityMatrix& rho_out, const DensityMatrix& rho_ref) {
  return trace_distance(rho_out, rho_ref);
}

/// Two-term parameter shift (exact for losses linear in the state of
/// Rot3-generated circuits) or plain central differences.
inline std::vector<double> gradient(const std::function<double(std::span<const double>)>& loss_at,
                                    std::span<const double> params, GradientMethod method,
                                    double fd_step = 1e-4) {
  std::vector<double> work(params.begin(), params.end());
  std::vector<double> grad(params.size());
  const double shift = (method == GradientMethod::parameter_shift) ? std::numbers::pi / 2.0 : fd_step;
  const double denom = (method == GradientMethod::parameter_shift) ? 2.0 : 2.0 * fd_step;
  for (std::size_t j = 0; j < work.size(); ++j) {
    const double saved = work[j];
    work[j] = saved + shift;
    const double up = loss_at(work);
    work[j] = saved - shift;
    const double down = loss_at(work);
    work[j] = saved;
    grad[j] = (up - down) / denom;
  }
  return grad;
}

struct AdamState {
  std::vector<double> m, v;
  std::size_t t = 0;
};

/// Standard Adam update with bias correction.
inline void adam_step(AdamState& state, std::vector<double>& params, std::span<const double> grad,
                      double lr, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8) {
  if (grad.size() != params.size()) throw std::invalid_argument("adam_step: shape mismatch");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + epsilon);
  }
}

namespace detail {

/// splitmix64; used for parameter init so results do not depend on any
/// standard-library distribution implementation.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)
  double symmetric(double scale) { return (2.0 * uniform() - 1.0) * scale; }
};

inline std::vector<cplx> ghz_vector(std::size_t n) {
  std::vector<cplx> psi(std::size_t{1} << n);
  psi.front() = 1.0 / std::sqrt(2.0);
  psi.back() = 1.0 / std::sqrt(2.0);
  return psi;
}

}  // namespace detail

/// Loss of one parameter vector for the model/config pair; the quantity the
/// training loop differentiates.
inline double evaluate_loss(const Model& model, LossKind loss, std::span<const double> params) {
  switch (loss) {
    case LossKind::cross_entropy: {
      const std::size_t n_messages = std::size_t{1} << model.task.n_message_bits;
      std::vector<std::size_t> targets(n_messages);
      for (std::size_t s = 0; s < n_messages; ++s) targets[s] = target_outcome(model, s);
      return cross_entropy_loss(conditional_distribution(model, params), targets);
    }
    case LossKind::trace_distance:
      return trace_distance_loss(model_output(model, params), initial_state(model, 0));
    case LossKind::infidelity: {
      const std::vector<cplx> ideal = detail::ghz_vector(model.n_wires);
      return 1.0 - fidelity_with_pure(model_output(model, params), ideal);
    }
    case LossKind::neg_coherent_info:
      return -coherent_information(model_output(model, params), model.transmitted_wires);
  }
  throw std::invalid_argument("evaluate_loss: unknown loss");
}

inline bool loss_compatible(Setting setting, LossKind loss) {
  if (setting == Setting::quantum) return loss != LossKind::cross_entropy;
  return loss == LossKind::cross_entropy;
}

/// Exact rate of the final parameters: mutual information under the uniform
/// message prior, or coherent information divided by the channel uses.
inline double evaluate_metric(const Model& model, std::span<const double> params) {
  if (model.task.setting == Setting::quantum) {
    const double ci = coherent_information(model_output(model, params), model.transmitted_wires);
    return regularized_rate(ci, model.task.n_channel_uses);
  }
  const std::size_t n_messages = std::size_t{1} << model.task.n_message_bits;
  const std::vector<double> prior(n_messages, 1.0 / static_cast<double>(n_messages));
  return mutual_information(conditional_distribution(model, params), prior);
}

inline RateRecord rate_record(const Model& model, const TrainReport& rep) {
  RateRecord rec;
  rec.setting = model.task.setting;
  rec.channel = model.task.channel;
  rec.learned_rate = rep.evaluated_metric;
  rec.reference_rate = rep.reference_value;
  rec.reference_kind = rep.reference_kind;
  return rec;
}

/// Full training loop: seeded uniform init in [-init_scale, init_scale],
/// one gradient step per iteration over the complete message batch,
/// deterministic for a fixed seed and config.
inline TrainReport train(const Model& model, const TrainConfig& cfg) {
  if (!loss_compatible(model.task.setting, cfg.loss))
    throw std::invalid_argument(std::string("train: loss ") + loss_kind_name(cfg.loss) +
                                " incompatible with setting " + setting_name(model.task.setting));
  const auto t0 = std::chrono::steady_clock::now();

  detail::SplitMix64 rng(cfg.seed);
  std::vector<double> params(model.layout.total());
  for (double& x : params) x = rng.symmetric(cfg.init_scale);

  auto loss_at = [&](std::span<const double> ps) { return evaluate_loss(model, cfg.loss, ps); };

  TrainReport report;
  report.loss_history.reserve(cfg.steps);
  AdamState adam;
  const std::size_t warm_steps = cfg.warmup ? std::max<std::size_t>(1, cfg.steps / 20) : 0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    report.loss_history.push_back(loss_at(params));
    const std::vector<double> grad = gradient(loss_at, params, cfg.gradient_method, cfg.fd_step);
    double lr = cfg.learning_rate;
    if (step < warm_steps) lr *= static_cast<double>(step + 1) / static_cast<double>(warm_steps);
    adam_step(adam, params, grad, lr, cfg.beta1, cfg.beta2, cfg.epsilon);
  }

  report.final_params = split_parameters(model.layout, params);
  report.evaluated_metric = evaluate_metric(model, params);
  const Reference ref = reference_capacity(model.task.setting, model.task.channel);
  report.reference_kind = ref.kind;
  if (ref.kind != ReferenceKind::none) report.reference_value = ref.bits;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace qcap
