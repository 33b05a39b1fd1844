#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "qcap/matrix.hpp"

namespace qcap {

// Tolerances shared by the state invariants below.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

// Dense storage cap: 1024 x 1024 matrices. Every bundled experiment needs
// at most 6 qubits.
inline constexpr std::size_t kMaxQubits = 10;

/// Mixed state of n qubits: Hermitian, PSD, unit-trace 2^n x 2^n matrix.
/// Qubit 0 is the leftmost (most significant) tensor factor, so basis index
/// i carries the bit of qubit q at position (n_qubits - 1 - q).
struct DensityMatrix {
  std::size_t n_qubits = 0;
  ComplexMatrix mat;
};

inline std::size_t dim_of(const DensityMatrix& rho) { return std::size_t{1} << rho.n_qubits; }

inline std::size_t qubit_bit(std::size_t n_qubits, std::size_t q) {
  return std::size_t{1} << (n_qubits - 1 - q);
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

/// Cheap structural checks plus the PSD bound; throws numerical_error on breach.
inline void validate_density(const DensityMatrix& rho, const std::string& context) {
  const std::size_t d = dim_of(rho);
  if (rho.mat.rows != d || rho.mat.cols != d)
    throw numerical_error(context + ": dimension does not match qubit count");
  if (!all_finite(rho.mat)) throw numerical_error(context + ": non-finite entries");
  if (hermiticity_error(rho.mat) > kHermTol) throw numerical_error(context + ": state not Hermitian");
  if (std::abs(trace(rho.mat) - cplx{1.0}) > kTraceTol) throw numerical_error(context + ": trace != 1");
  const std::vector<double> eig = hermitian_eigenvalues(rho.mat);
  if (eig.front() < -kPsdTol) throw numerical_error(context + ": state not positive semidefinite");
}

/// Reduced state on the listed qubits, in the order given.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const std::size_t n = rho.n_qubits;
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set empty");
  std::vector<bool> kept(n, false);
  for (std::size_t q : keep) {
    if (q >= n) throw std::out_of_range("partial_trace: qubit index out of range");
    if (kept[q]) throw std::invalid_argument("partial_trace: duplicate qubit index");
    kept[q] = true;
  }
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q)
    if (!kept[q]) traced.push_back(q);

  const std::size_t k = keep.size();
  const std::size_t dk = std::size_t{1} << k;
  const std::size_t dt = std::size_t{1} << traced.size();

  // Bit masks of the full register addressed by output / traced sub-indices.
  std::vector<std::size_t> keep_bit(k), traced_bit(traced.size());
  for (std::size_t i = 0; i < k; ++i) keep_bit[i] = qubit_bit(n, keep[i]);
  for (std::size_t i = 0; i < traced.size(); ++i) traced_bit[i] = qubit_bit(n, traced[i]);

  auto spread = [](std::size_t sub, const std::vector<std::size_t>& bits) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (sub & (std::size_t{1} << (bits.size() - 1 - i))) idx |= bits[i];
    return idx;
  };

  DensityMatrix out{k, ComplexMatrix(dk, dk)};
  for (std::size_t a = 0; a < dk; ++a) {
    const std::size_t ra = spread(a, keep_bit);
    for (std::size_t b = 0; b < dk; ++b) {
      const std::size_t rb = spread(b, keep_bit);
      cplx sum{};
      for (std::size_t t = 0; t < dt; ++t) {
        const std::size_t rt = spread(t, traced_bit);
        sum += rho.mat(ra | rt, rb | rt);
      }
      out.mat(a, b) = sum;
    }
  }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
  std::vector<std::size_t> k(keep);
  return partial_trace(rho, std::span<const std::size_t>(k));
}

/// Eigenvalues of a Hermitian matrix, ascending. Cyclic Jacobi rotations
/// until the off-diagonal Frobenius norm drops below 1e-12 (at most 100
/// sweeps); plenty for the <= 1024 x 1024 matrices seen here.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  if (h.rows != h.cols) throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
  if (hermiticity_error(h) > kHermTol)
    throw std::invalid_argument("hermitian_eigenvalues: matrix not Hermitian");
  const std::size_t n = h.rows;
  ComplexMatrix a = h;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  constexpr double kOffTol = 1e-12;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() >= kOffTol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double r = std::abs(apq);
        if (r < 1e-300) continue;
        // Phase out a(p,q), then a real rotation annihilates it.
        const cplx phase = apq / r;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J is the identity outside rows/cols p,q with
        //   J(p,p)=c, J(p,q)=s, J(q,p)=-s*conj(phase), J(q,q)=c*conj(phase).
        const cplx jqp = -s * std::conj(phase);
        const cplx jqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // columns: A <- A J
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + jqp * akq;
          a(k, q) = s * akp + jqq * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // rows: A <- J^dagger A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = s * apk + std::conj(jqq) * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

inline std::vector<double> hermitian_eigenvalues(const DensityMatrix& rho) {
  return hermitian_eigenvalues(rho.mat);
}

/// Von Neumann entropy in bits; eigenvalues are clamped to [0,1] first so
/// harmless float negativity never reaches the log.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lam : hermitian_eigenvalues(rho.mat)) {
    lam = std::clamp(lam, 0.0, 1.0);
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  return s;
}

/// T(rho, sigma) = (1/2) sum |eig(rho - sigma)|.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.n_qubits != sigma.n_qubits) throw std::invalid_argument("trace_distance: dimension mismatch");
  double t = 0.0;
  for (double mu : hermitian_eigenvalues(rho.mat - sigma.mat)) t += std::abs(mu);
  return 0.5 * t;
}

/// <psi| rho |psi> for a unit vector psi; the imaginary part must vanish.
inline double fidelity_with_pure(const DensityMatrix& rho, std::span<const cplx> psi) {
  const std::size_t d = dim_of(rho);
  if (psi.size() != d) throw std::invalid_argument("fidelity_with_pure: dimension mismatch");
  double norm2 = 0.0;
  for (const cplx& c : psi) norm2 += std::norm(c);
  if (std::abs(norm2 - 1.0) > 1e-10) throw std::invalid_argument("fidelity_with_pure: psi not normalized");
  cplx val{};
  for (std::size_t i = 0; i < d; ++i) {
    cplx row{};
    for (std::size_t j = 0; j < d; ++j) row += rho.mat(i, j) * psi[j];
    val += std::conj(psi[i]) * row;
  }
  if (std::abs(val.imag()) > 1e-10) throw numerical_error("fidelity_with_pure: non-real expectation");
  return val.real();
}

}  // namespace qcap
