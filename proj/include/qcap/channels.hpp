#pragma once

#include "qcap/circuit.hpp"

namespace qcap {

enum class ChannelKind { bit_flip, phase_flip, depolarizing, amplitude_damping };

/// Declarative channel description; the unit parsed from experiment configs.
struct ChannelSpec {
  ChannelKind kind = ChannelKind::bit_flip;
  double p = 0.0;
  double gamma = 0.0;  // amplitude damping only
};

inline const char* channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::bit_flip: return "bit_flip";
    case ChannelKind::phase_flip: return "phase_flip";
    case ChannelKind::depolarizing: return "depolarizing";
    case ChannelKind::amplitude_damping: return "amplitude_damping";
  }
  return "?";
}

namespace detail {
inline void check_prob(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}
}  // namespace detail

/// K0 = sqrt(1-p) I, K1 = sqrt(p) X.
inline KrausChannel bit_flip(double p) {
  detail::check_prob(p, "bit_flip: p");
  KrausChannel ch{{std::sqrt(1.0 - p) * ComplexMatrix::identity(2), std::sqrt(p) * detail::pauli_x()},
                  "bit_flip", p, 0.0};
  return ch;
}

/// K0 = sqrt(1-p) I, K1 = sqrt(p) Z.
inline KrausChannel phase_flip(double p) {
  detail::check_prob(p, "phase_flip: p");
  KrausChannel ch{{std::sqrt(1.0 - p) * ComplexMatrix::identity(2), std::sqrt(p) * detail::pauli_z()},
                  "phase_flip", p, 0.0};
  return ch;
}

/// K0 = sqrt(1-p) I and weight sqrt(p/3) on each of Z, X, Y.
inline KrausChannel depolarizing(double p) {
  detail::check_prob(p, "depolarizing: p");
  const double w = std::sqrt(p / 3.0);
  KrausChannel ch{{std::sqrt(1.0 - p) * ComplexMatrix::identity(2), w * detail::pauli_z(),
                   w * detail::pauli_x(), w * detail::pauli_y()},
                  "depolarizing", p, 0.0};
  return ch;
}

/// Four Kraus operators:
///   K0 = sqrt(1-p) [[1, 0], [0, sqrt(1-gamma)]],   K1 = [[0, sqrt(gamma(1-p))], [0, 0]],
///   K2 = sqrt(p)   [[sqrt(1-gamma), 0], [0, 1]],   K3 = [[0, 0], [sqrt(gamma p), 0]].
/// K0,K1 damp toward |0>, K2,K3 toward |1>; p interpolates the two baths.
inline KrausChannel amplitude_damping(double p, double gamma) {
  detail::check_prob(p, "amplitude_damping: p");
  detail::check_prob(gamma, "amplitude_damping: gamma");
  const double sg = std::sqrt(1.0 - gamma);
  ComplexMatrix k0(2, 2), k1(2, 2), k2(2, 2), k3(2, 2);
  k0(0, 0) = std::sqrt(1.0 - p);
  k0(1, 1) = std::sqrt(1.0 - p) * sg;
  k1(0, 1) = std::sqrt(gamma * (1.0 - p));
  k2(0, 0) = std::sqrt(p) * sg;
  k2(1, 1) = std::sqrt(p);
  k3(1, 0) = std::sqrt(gamma * p);
  KrausChannel ch{{k0, k1, k2, k3}, "amplitude_damping", p, gamma};
  return ch;
}

struct CptpCheck {
  bool pass;
  double residual;  // max-norm of sum K^dagger K - I
};

inline CptpCheck validate_cptp(const KrausChannel& ch, double tol) {
  const double r = completeness_residual(ch);
  return {r <= tol, r};
}

inline KrausChannel make_channel(const ChannelSpec& spec) {
  switch (spec.kind) {
    case ChannelKind::bit_flip: return bit_flip(spec.p);
    case ChannelKind::phase_flip: return phase_flip(spec.p);
    case ChannelKind::depolarizing: return depolarizing(spec.p);
    case ChannelKind::amplitude_damping: return amplitude_damping(spec.p, spec.gamma);
  }
  throw std::invalid_argument("make_channel: unknown channel kind");
}

}  // namespace qcap
