#pragma once

#include <span>
#include <string>

#include "qcap/qmath.hpp"

namespace qcap {

enum class GateKind { rot3, pauli_x, pauli_y, pauli_z, hadamard, cnot, controlled_rot3 };

/// One circuit element. Rot3 / ControlledRot3 carry three parameter slots
/// (indices into the circuit's parameter vector); the rest carry none.
/// For two-qubit kinds wires = {control, target}.
struct Gate {
  GateKind kind;
  std::vector<std::size_t> wires;
  std::vector<std::size_t> param_slots;
};

struct ParameterizedCircuit {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;
  std::size_t n_params = 0;
};

/// CPTP map on one qubit given as an ordered list of 2x2 Kraus operators.
struct KrausChannel {
  std::vector<ComplexMatrix> kraus_ops;
  std::string label;
  double p = 0.0;
  double gamma = 0.0;
};

/// Channel scheduled inside a circuit: applied when execution reaches
/// `position` (i.e. before the gate at that index; position == gates.size()
/// means after the last gate).
struct NoiseInsertion {
  std::size_t position;
  KrausChannel channel;
  std::size_t wire;
};

inline std::size_t gate_arity(GateKind k) {
  return (k == GateKind::rot3 || k == GateKind::controlled_rot3) ? 3 : 0;
}

/// RZ(gamma) * RY(beta) * RZ(alpha) with
///   RZ(t) = diag(e^{-it/2}, e^{it/2}),
///   RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
/// Covers every single-qubit unitary up to an (irrelevant) global phase.
inline ComplexMatrix rot3_matrix(double alpha, double beta, double gamma) {
  const double cb = std::cos(beta / 2.0), sb = std::sin(beta / 2.0);
  const cplx ea = std::polar(1.0, -alpha / 2.0);   // e^{-i alpha/2}
  const cplx eg = std::polar(1.0, -gamma / 2.0);   // e^{-i gamma/2}
  ComplexMatrix u(2, 2);
  u(0, 0) = eg * cb * ea;
  u(0, 1) = -eg * sb * std::conj(ea);
  u(1, 0) = std::conj(eg) * sb * ea;
  u(1, 1) = std::conj(eg) * cb * std::conj(ea);
  return u;
}

namespace detail {

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}
inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m(0, 1) = cplx(0.0, -1.0);
  m(1, 0) = cplx(0.0, 1.0);
  return m;
}
inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}
inline ComplexMatrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix m(2, 2);
  m(0, 0) = s;
  m(0, 1) = s;
  m(1, 0) = s;
  m(1, 1) = -s;
  return m;
}

/// rho <- U_embedded rho U_embedded^dagger, with U acting on `wires`
/// (wires[0] is the most significant bit of U's index space) and the
/// identity everywhere else.
inline void conjugate_by_embedded(ComplexMatrix& rho, const ComplexMatrix& u,
                                  std::span<const std::size_t> wires, std::size_t n_qubits) {
  const std::size_t d = u.rows;
  const std::size_t dim = rho.rows;
  std::size_t mask = 0;
  std::vector<std::size_t> bit(wires.size());
  for (std::size_t i = 0; i < wires.size(); ++i) {
    bit[i] = qubit_bit(n_qubits, wires[i]);
    mask |= bit[i];
  }
  std::vector<std::size_t> offset(d, 0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < wires.size(); ++i)
      if (j & (std::size_t{1} << (wires.size() - 1 - i))) offset[j] |= bit[i];

  std::vector<cplx> scratch(d);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t c = 0; c < dim; ++c) {  // rows: rho <- U rho
      for (std::size_t j = 0; j < d; ++j) scratch[j] = rho(base + offset[j], c);
      for (std::size_t i = 0; i < d; ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < d; ++j) acc += u(i, j) * scratch[j];
        rho(base + offset[i], c) = acc;
      }
    }
  }
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < dim; ++r) {  // columns: rho <- rho U^dagger
      for (std::size_t j = 0; j < d; ++j) scratch[j] = rho(r, base + offset[j]);
      for (std::size_t i = 0; i < d; ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < d; ++j) acc += scratch[j] * std::conj(u(i, j));
        rho(r, base + offset[i]) = acc;
      }
    }
  }
}

}  // namespace detail

/// Unitary of one gate on its own index space (2x2 or 4x4). Parameters are
/// read from `params` through the gate's slots.
inline ComplexMatrix gate_matrix(const Gate& gate, std::span<const double> params) {
  auto slot = [&](std::size_t i) {
    const std::size_t s = gate.param_slots.at(i);
    if (s >= params.size()) throw std::invalid_argument("gate_matrix: parameter slot out of range");
    return params[s];
  };
  switch (gate.kind) {
    case GateKind::rot3:
      return rot3_matrix(slot(0), slot(1), slot(2));
    case GateKind::pauli_x:
      return detail::pauli_x();
    case GateKind::pauli_y:
      return detail::pauli_y();
    case GateKind::pauli_z:
      return detail::pauli_z();
    case GateKind::hadamard:
      return detail::hadamard();
    case GateKind::cnot: {
      ComplexMatrix m = ComplexMatrix::identity(4);
      m(2, 2) = 0.0;
      m(3, 3) = 0.0;
      m(2, 3) = 1.0;
      m(3, 2) = 1.0;
      return m;
    }
    case GateKind::controlled_rot3: {
      const ComplexMatrix r = rot3_matrix(slot(0), slot(1), slot(2));
      ComplexMatrix m = ComplexMatrix::identity(4);
      m(2, 2) = r(0, 0);
      m(2, 3) = r(0, 1);
      m(3, 2) = r(1, 0);
      m(3, 3) = r(1, 1);
      return m;
    }
  }
  throw std::invalid_argument("gate_matrix: unknown gate kind");
}

inline void check_wires(const Gate& gate, std::size_t n_qubits) {
  const std::size_t want = (gate.kind == GateKind::cnot || gate.kind == GateKind::controlled_rot3) ? 2 : 1;
  if (gate.wires.size() != want) throw std::invalid_argument("gate has wrong wire count");
  for (std::size_t w : gate.wires)
    if (w >= n_qubits) throw std::out_of_range("gate wire out of range");
  if (want == 2 && gate.wires[0] == gate.wires[1])
    throw std::invalid_argument("gate wires must be distinct");
}

/// U rho U^dagger with the gate unitary embedded at its wires.
inline DensityMatrix apply_unitary_gate(const DensityMatrix& rho, const Gate& gate,
                                        std::span<const double> params) {
  check_wires(gate, rho.n_qubits);
  DensityMatrix out = rho;
  detail::conjugate_by_embedded(out.mat, gate_matrix(gate, params), gate.wires, rho.n_qubits);
  return out;
}

inline double completeness_residual(const KrausChannel& ch) {
  ComplexMatrix acc(2, 2);
  for (const ComplexMatrix& k : ch.kraus_ops) acc = acc + adjoint(k) * k;
  return max_abs(acc - ComplexMatrix::identity(2));
}

/// sum_i K_i rho K_i^dagger with each Kraus operator embedded at `wire`.
inline DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, std::size_t wire) {
  if (wire >= rho.n_qubits) throw std::out_of_range("apply_channel: wire out of range");
  if (completeness_residual(ch) > 1e-12)
    throw numerical_error("apply_channel: channel '" + ch.label + "' fails completeness");
  const std::size_t wires[1] = {wire};
  DensityMatrix out{rho.n_qubits, ComplexMatrix(rho.mat.rows, rho.mat.cols)};
  for (const ComplexMatrix& k : ch.kraus_ops) {
    ComplexMatrix term = rho.mat;
    detail::conjugate_by_embedded(term, k, wires, rho.n_qubits);
    out.mat = out.mat + term;
  }
  return out;
}

/// Exact density-matrix evolution: gates in order, with each noise insertion
/// applied once execution reaches its position index. No sampling anywhere.
inline DensityMatrix run_circuit(const DensityMatrix& rho0, const ParameterizedCircuit& circ,
                                 std::span<const double> params,
                                 std::span<const NoiseInsertion> noise = {}) {
  if (params.size() != circ.n_params)
    throw std::invalid_argument("run_circuit: parameter vector length mismatch");
  DensityMatrix rho = rho0;
  for (std::size_t pos = 0; pos <= circ.gates.size(); ++pos) {
    for (const NoiseInsertion& ins : noise)
      if (ins.position == pos) rho = apply_channel(rho, ins.channel, ins.wire);
    if (pos < circ.gates.size()) rho = apply_unitary_gate(rho, circ.gates[pos], params);
  }
  return rho;
}

/// Exact computational-basis outcome distribution over the listed wires
/// (wires[0] is the most significant outcome bit). Tiny float negativity is
/// clamped to zero; no renormalization.
inline std::vector<double> measurement_probabilities(const DensityMatrix& rho,
                                                     std::span<const std::size_t> wires) {
  const std::size_t n = rho.n_qubits;
  std::vector<bool> seen(n, false);
  for (std::size_t w : wires) {
    if (w >= n) throw std::out_of_range("measurement_probabilities: wire out of range");
    if (seen[w]) throw std::invalid_argument("measurement_probabilities: duplicate wire");
    seen[w] = true;
  }
  std::vector<double> probs(std::size_t{1} << wires.size(), 0.0);
  const std::size_t dim = dim_of(rho);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t outcome = 0;
    for (std::size_t k = 0; k < wires.size(); ++k)
      if (i & qubit_bit(n, wires[k])) outcome |= std::size_t{1} << (wires.size() - 1 - k);
    probs[outcome] += rho.mat(i, i).real();
  }
  for (double& pr : probs) {
    if (pr < -1e-10) throw numerical_error("measurement_probabilities: negative probability");
    pr = std::max(pr, 0.0);
  }
  return probs;
}

/// Pure state |b...b 0...0><...| : the given bits on the leading wires,
/// |0> padding on the rest.
inline DensityMatrix basis_embed(const std::string& bits, std::size_t width) {
  if (bits.size() > width) throw std::invalid_argument("basis_embed: more bits than wires");
  if (width > kMaxQubits) throw std::invalid_argument("basis_embed: register exceeds the 10-qubit cap");
  std::size_t index = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("basis_embed: bits must be 0/1");
    if (bits[i] == '1') index |= qubit_bit(width, i);
  }
  DensityMatrix rho{width, ComplexMatrix(std::size_t{1} << width, std::size_t{1} << width)};
  rho.mat(index, index) = 1.0;
  return rho;
}

/// Hardware-efficient ansatz: per layer a Rot3 on every qubit followed by a
/// CNOT ring i -> i+1 mod n (omitted for a single qubit). Parameter count is
/// 3 * n_qubits * n_layers.
inline ParameterizedCircuit layered_ansatz(std::size_t n_qubits, std::size_t n_layers) {
  if (n_qubits < 1 || n_layers < 1) throw std::invalid_argument("layered_ansatz: need >= 1 qubit and layer");
  ParameterizedCircuit circ;
  circ.n_qubits = n_qubits;
  std::size_t slot = 0;
  for (std::size_t layer = 0; layer < n_layers; ++layer) {
    for (std::size_t q = 0; q < n_qubits; ++q) {
      circ.gates.push_back({GateKind::rot3, {q}, {slot, slot + 1, slot + 2}});
      slot += 3;
    }
    if (n_qubits >= 2)
      for (std::size_t q = 0; q < n_qubits; ++q)
        circ.gates.push_back({GateKind::cnot, {q, (q + 1) % n_qubits}, {}});
  }
  circ.n_params = slot;
  return circ;
}

}  // namespace qcap
