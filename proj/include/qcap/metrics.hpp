#pragma once

#include <functional>
#include <optional>

#include "qcap/tasks.hpp"

namespace qcap {

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p must lie in [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

inline double shannon_entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double q : dist) {
    if (q < -1e-12) throw std::invalid_argument("shannon_entropy: negative probability");
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

/// I(S; S_hat) = H(S_hat) - sum_s prior(s) H(S_hat | S = s), base 2.
inline double mutual_information(const std::vector<std::vector<double>>& cond,
                                 std::span<const double> prior) {
  if (cond.empty() || prior.size() != cond.size())
    throw std::invalid_argument("mutual_information: shape mismatch");
  const std::size_t n_out = cond.front().size();
  double prior_sum = 0.0;
  for (double q : prior) prior_sum += q;
  if (std::abs(prior_sum - 1.0) > 1e-9) throw std::invalid_argument("mutual_information: prior not normalized");

  std::vector<double> marginal(n_out, 0.0);
  double cond_entropy = 0.0;
  for (std::size_t s = 0; s < cond.size(); ++s) {
    const auto& row = cond[s];
    if (row.size() != n_out) throw std::invalid_argument("mutual_information: ragged rows");
    double row_sum = 0.0;
    for (double q : row) row_sum += q;
    if (std::abs(row_sum - 1.0) > 1e-6)
      throw std::invalid_argument("mutual_information: row not stochastic");
    for (std::size_t o = 0; o < n_out; ++o) marginal[o] += prior[s] * row[o];
    cond_entropy += prior[s] * shannon_entropy(row);
  }
  return shannon_entropy(marginal) - cond_entropy;
}

/// I(A>B) = S(B) - S(AB); may be negative.
inline double coherent_information(const DensityMatrix& rho_ab, std::span<const std::size_t> b_wires) {
  if (b_wires.empty() || b_wires.size() >= rho_ab.n_qubits)
    throw std::invalid_argument("coherent_information: B must be a proper nonempty subsystem");
  return von_neumann_entropy(partial_trace(rho_ab, b_wires)) - von_neumann_entropy(rho_ab);
}

inline double regularized_rate(double total_bits, std::size_t channel_uses) {
  if (channel_uses < 1) throw std::invalid_argument("regularized_rate: need >= 1 channel use");
  return total_bits / static_cast<double>(channel_uses);
}

enum class ReferenceKind { closed_form, numerical_oracle, none };

inline const char* reference_kind_name(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::closed_form: return "closed_form";
    case ReferenceKind::numerical_oracle: return "numerical_oracle";
    case ReferenceKind::none: return "none";
  }
  return "?";
}

struct Reference {
  double bits = 0.0;
  ReferenceKind kind = ReferenceKind::none;
};

/// One evaluated experiment, ready for CSV serialization.
struct RateRecord {
  Setting setting;
  ChannelSpec channel;
  double learned_rate = 0.0;
  std::optional<double> reference_rate;
  ReferenceKind reference_kind = ReferenceKind::none;
};

namespace detail {

inline double golden_max_1d(const std::function<double(double)>& f, double lo, double hi, int iters = 60) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    }
  }
  return std::max(f((a + b) / 2.0), std::max(f1, f2));
}

/// Coarse scan then golden-section refinement around the best grid point.
inline double scan_max_1d(const std::function<double(double)>& f, double lo, double hi, int grid) {
  double best_x = lo, best = f(lo);
  for (int i = 1; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double v = f(x);
    if (v > best) { best = v; best_x = x; }
  }
  const double step = (hi - lo) / grid;
  return std::max(best, golden_max_1d(f, std::max(lo, best_x - step), std::min(hi, best_x + step)));
}

/// Excited-state population after the amplitude-damping channel, for a
/// Bloch-z diagonal input with excited population a (diagonal in, diagonal out).
inline double ad_output_population(double p, double gamma, double a) {
  return (1.0 - p) * (1.0 - gamma) * a + p * a + p * gamma * (1.0 - a);
}

/// Holevo quantity of a two-state diagonal-input ensemble through amplitude
/// damping: 41-point grid over both input populations and the prior, then
/// coordinatewise refinement. A capacity lower bound.
inline double holevo_ad_two_state(double p, double gamma) {
  auto chi = [&](double a, double b, double q) {
    const double oa = ad_output_population(p, gamma, a);
    const double ob = ad_output_population(p, gamma, b);
    return binary_entropy(q * oa + (1.0 - q) * ob) -
           (q * binary_entropy(oa) + (1.0 - q) * binary_entropy(ob));
  };
  constexpr int grid = 41;
  double ba = 0.0, bb = 1.0, bq = 0.5, best = chi(ba, bb, bq);
  for (int ia = 0; ia < grid; ++ia)
    for (int ib = 0; ib < grid; ++ib)
      for (int iq = 0; iq < grid; ++iq) {
        const double a = ia / double(grid - 1), b = ib / double(grid - 1), q = iq / double(grid - 1);
        const double v = chi(a, b, q);
        if (v > best) { best = v; ba = a; bb = b; bq = q; }
      }
  double coord[3] = {ba, bb, bq};
  for (int round = 0; round < 4; ++round)
    for (int c = 0; c < 3; ++c) {
      double bx = coord[c], bv = chi(coord[0], coord[1], coord[2]);
      for (int i = 0; i <= 800; ++i) {
        const double x = i / 800.0;
        double trial[3] = {coord[0], coord[1], coord[2]};
        trial[c] = x;
        const double v = chi(trial[0], trial[1], trial[2]);
        if (v > bv) { bv = v; bx = x; }
      }
      coord[c] = bx;
    }
  return std::max(best, chi(coord[0], coord[1], coord[2]));
}

/// rho_AB for the Schmidt input sqrt(1-tau)|00> + sqrt(tau)|11> with the
/// channel on qubit B.
inline DensityMatrix schmidt_pair_through(const KrausChannel& ch, double tau) {
  const double c = std::sqrt(1.0 - tau), s = std::sqrt(tau);
  DensityMatrix psi{2, ComplexMatrix(4, 4)};
  psi.mat(0, 0) = c * c;
  psi.mat(0, 3) = c * s;
  psi.mat(3, 0) = s * c;
  psi.mat(3, 3) = s * s;
  return apply_channel(psi, ch, 1);
}

}  // namespace detail

/// Reference rate (bits per channel use) to compare a learned code against.
/// Closed forms where known; 1-D/grid numerical oracles otherwise; kind
/// `none` when no usable reference exists for the combination.
inline Reference reference_capacity(Setting setting, const ChannelSpec& ch) {
  const double p = ch.p;
  switch (setting) {
    case Setting::classical:
      switch (ch.kind) {
        case ChannelKind::bit_flip: return {1.0, ReferenceKind::closed_form};
        case ChannelKind::phase_flip: return {1.0, ReferenceKind::closed_form};
        case ChannelKind::depolarizing:
          return {1.0 - binary_entropy(2.0 * p / 3.0), ReferenceKind::closed_form};
        case ChannelKind::amplitude_damping:
          return {detail::holevo_ad_two_state(p, ch.gamma), ReferenceKind::numerical_oracle};
      }
      break;
    case Setting::ea_classical:
      switch (ch.kind) {
        case ChannelKind::bit_flip: return {2.0 - binary_entropy(p), ReferenceKind::closed_form};
        case ChannelKind::phase_flip: return {2.0 - binary_entropy(p), ReferenceKind::closed_form};
        case ChannelKind::depolarizing: {
          const double dist[4] = {1.0 - p, p / 3.0, p / 3.0, p / 3.0};
          return {2.0 - shannon_entropy(dist), ReferenceKind::closed_form};
        }
        case ChannelKind::amplitude_damping: {
          const KrausChannel kraus = amplitude_damping(p, ch.gamma);
          auto qmi = [&](double tau) {
            const DensityMatrix rho = detail::schmidt_pair_through(kraus, tau);
            const std::size_t a[1] = {0}, b[1] = {1};
            return von_neumann_entropy(partial_trace(rho, a)) +
                   von_neumann_entropy(partial_trace(rho, b)) - von_neumann_entropy(rho);
          };
          return {detail::scan_max_1d(qmi, 0.0, 1.0, 100), ReferenceKind::numerical_oracle};
        }
      }
      break;
    case Setting::quantum:
      switch (ch.kind) {
        case ChannelKind::phase_flip:
          return {1.0 - binary_entropy(p), ReferenceKind::closed_form};
        case ChannelKind::depolarizing: {
          const double dist[4] = {1.0 - p, p / 3.0, p / 3.0, p / 3.0};
          return {std::max(0.0, 1.0 - shannon_entropy(dist)), ReferenceKind::closed_form};
        }
        case ChannelKind::amplitude_damping: {
          const KrausChannel kraus = amplitude_damping(p, ch.gamma);
          auto ci = [&](double tau) {
            const DensityMatrix rho = detail::schmidt_pair_through(kraus, tau);
            const std::size_t b[1] = {1};
            return coherent_information(rho, b);
          };
          return {detail::scan_max_1d(ci, 0.0, 1.0, 100), ReferenceKind::numerical_oracle};
        }
        default:
          break;  // bit_flip: use the phase_flip conjugate instead
      }
      break;
  }
  return {0.0, ReferenceKind::none};
}

}  // namespace qcap
