#pragma once

#include "qcap/channels.hpp"

namespace qcap {

enum class Setting { classical, ea_classical, quantum };

inline const char* setting_name(Setting s) {
  switch (s) {
    case Setting::classical: return "classical";
    case Setting::ea_classical: return "ea_classical";
    case Setting::quantum: return "quantum";
  }
  return "?";
}

/// Declarative description of one communication experiment.
struct TaskSpec {
  Setting setting = Setting::classical;
  ChannelSpec channel;
  std::size_t n_message_bits = 1;
  std::size_t n_channel_uses = 1;
  std::size_t encoder_layers = 1;
  std::size_t decoder_layers = 1;
  std::size_t entangler_layers = 1;  // EA only
  bool pooling = false;              // classical only
  std::size_t ghz_size = 2;          // quantum only
  double idler_noise_p = 0.0;        // EA / quantum
  bool use_encoder = true;
};

struct ModelParameters {
  std::vector<double> theta;   // encoder
  std::vector<double> phi;     // decoder
  std::vector<double> lambda;  // entangler (EA)
  std::vector<double> pi;      // pooling
};

/// Where each named parameter block lives inside the flat training vector.
struct ParamLayout {
  std::size_t theta_offset = 0, theta_count = 0;
  std::size_t phi_offset = 0, phi_count = 0;
  std::size_t lambda_offset = 0, lambda_count = 0;
  std::size_t pi_offset = 0, pi_count = 0;
  std::size_t total() const { return theta_count + phi_count + lambda_count + pi_count; }
};

/// A fully wired experiment: circuit segments concatenated into one gate
/// list, channel/idler insertions pinned to positions between segments, and
/// the readout (or output partition) fixed.
struct Model {
  TaskSpec task;
  std::size_t n_wires = 0;
  ParameterizedCircuit circuit;
  std::vector<int> gate_message_bit;           // -1 = unconditional, else active iff that bit is 1
  std::vector<NoiseInsertion> noise;
  std::vector<std::size_t> readout_wires;      // classical / EA
  std::vector<std::size_t> transmitted_wires;  // quantum: the B side of I(A>B)
  ParamLayout layout;
};

inline std::vector<double> flatten(const ModelParameters& p) {
  std::vector<double> out;
  out.reserve(p.theta.size() + p.phi.size() + p.lambda.size() + p.pi.size());
  out.insert(out.end(), p.theta.begin(), p.theta.end());
  out.insert(out.end(), p.phi.begin(), p.phi.end());
  out.insert(out.end(), p.lambda.begin(), p.lambda.end());
  out.insert(out.end(), p.pi.begin(), p.pi.end());
  return out;
}

inline ModelParameters split_parameters(const ParamLayout& l, std::span<const double> flat) {
  if (flat.size() != l.total()) throw std::invalid_argument("split_parameters: length mismatch");
  auto seg = [&](std::size_t off, std::size_t cnt) {
    return std::vector<double>(flat.begin() + off, flat.begin() + off + cnt);
  };
  return {seg(l.theta_offset, l.theta_count), seg(l.phi_offset, l.phi_count),
          seg(l.lambda_offset, l.lambda_count), seg(l.pi_offset, l.pi_count)};
}

/// Projector onto (|0...0> + |1...1>)/sqrt(2).
inline DensityMatrix ghz_state(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ghz_state: need at least 2 qubits");
  if (n > kMaxQubits) throw std::invalid_argument("ghz_state: register exceeds the 10-qubit cap");
  const std::size_t d = std::size_t{1} << n;
  DensityMatrix rho{n, ComplexMatrix(d, d)};
  rho.mat(0, 0) = 0.5;
  rho.mat(0, d - 1) = 0.5;
  rho.mat(d - 1, 0) = 0.5;
  rho.mat(d - 1, d - 1) = 0.5;
  return rho;
}

namespace detail {

inline std::size_t append_ansatz(ParameterizedCircuit& circ, std::vector<int>& cond,
                                 const std::vector<std::size_t>& wires, std::size_t layers,
                                 std::size_t slot) {
  for (std::size_t layer = 0; layer < layers; ++layer) {
    for (std::size_t w : wires) {
      circ.gates.push_back({GateKind::rot3, {w}, {slot, slot + 1, slot + 2}});
      cond.push_back(-1);
      slot += 3;
    }
    if (wires.size() >= 2)
      for (std::size_t i = 0; i < wires.size(); ++i) {
        circ.gates.push_back({GateKind::cnot, {wires[i], wires[(i + 1) % wires.size()]}, {}});
        cond.push_back(-1);
      }
  }
  return slot;
}

inline std::size_t append_pooling(ParameterizedCircuit& circ, std::vector<int>& cond,
                                  std::size_t n_in, std::size_t kept, std::size_t slot) {
  for (std::size_t d = 0; d < n_in; ++d) {
    if (d == kept) continue;
    circ.gates.push_back({GateKind::rot3, {d}, {slot, slot + 1, slot + 2}});
    cond.push_back(-1);
    slot += 3;
    circ.gates.push_back({GateKind::controlled_rot3, {d, kept}, {slot, slot + 1, slot + 2}});
    cond.push_back(-1);
    slot += 3;
  }
  return slot;
}

}  // namespace detail

/// Pooling layer concentrating n_in wires onto kept_wire: for every other
/// wire a Rot3 followed by a ControlledRot3 targeting the kept wire.
/// Discarded wires are simply excluded from readout afterwards.
inline ParameterizedCircuit build_pooling_layer(std::size_t n_in, std::size_t kept_wire) {
  if (n_in < 2) throw std::invalid_argument("build_pooling_layer: need at least 2 wires");
  if (kept_wire >= n_in) throw std::out_of_range("build_pooling_layer: kept wire out of range");
  ParameterizedCircuit circ;
  circ.n_qubits = n_in;
  std::vector<int> cond;
  circ.n_params = detail::append_pooling(circ, cond, n_in, kept_wire, 0);
  return circ;
}

/// basis_embed(s) -> [E_theta] -> channel on every wire -> D_phi ->
/// [pooling] -> measurement of the readout wires.
inline Model build_classical_model(const TaskSpec& spec) {
  if (spec.setting != Setting::classical)
    throw std::invalid_argument("build_classical_model: wrong setting");
  if (spec.n_message_bits < 1) throw std::invalid_argument("classical model: need >= 1 message bit");
  const std::size_t n = spec.n_channel_uses;
  if (n < 1) throw std::invalid_argument("classical model: need >= 1 channel use");
  if (!spec.pooling && n < spec.n_message_bits)
    throw std::invalid_argument("classical model: channel uses < message bits");
  if (spec.pooling && n < 2) throw std::invalid_argument("classical model: pooling needs > 1 use");
  if (spec.pooling && spec.n_message_bits != 1)
    throw std::invalid_argument("classical model: pooled readout carries exactly 1 bit");

  Model m;
  m.task = spec;
  m.n_wires = n;
  m.circuit.n_qubits = n;

  const bool enc = spec.use_encoder && spec.encoder_layers > 0;
  m.layout.theta_count = enc ? 3 * n * spec.encoder_layers : 0;
  m.layout.phi_count = 3 * n * spec.decoder_layers;
  m.layout.pi_count = spec.pooling ? 6 * (n - 1) : 0;
  m.layout.phi_offset = m.layout.theta_count;
  m.layout.lambda_offset = m.layout.phi_offset + m.layout.phi_count;
  m.layout.pi_offset = m.layout.lambda_offset;

  std::vector<std::size_t> all(n);
  for (std::size_t w = 0; w < n; ++w) all[w] = w;

  if (enc) detail::append_ansatz(m.circuit, m.gate_message_bit, all, spec.encoder_layers, 0);
  const std::size_t after_encoder = m.circuit.gates.size();
  for (std::size_t w = 0; w < n; ++w)
    m.noise.push_back({after_encoder, make_channel(spec.channel), w});
  if (spec.decoder_layers > 0)
    detail::append_ansatz(m.circuit, m.gate_message_bit, all, spec.decoder_layers, m.layout.phi_offset);
  if (spec.pooling) {
    const std::size_t kept = n - 1;
    detail::append_pooling(m.circuit, m.gate_message_bit, n, kept, m.layout.pi_offset);
    m.readout_wires = {kept};
  } else {
    m.readout_wires = all;
  }
  m.circuit.n_params = m.layout.total();
  return m;
}

/// K_lambda entangles each (sender, receiver) pair from |00>; each message
/// bit drives one always-applied Rot3 plus one applied-iff-1 Rot3 on its
/// sender wire; the channel hits sender wires only; optional idler
/// depolarizing hits the stored receiver wires during transmission; D_phi
/// acts on everything and all wires are measured jointly.
inline Model build_ea_model(const TaskSpec& spec) {
  if (spec.setting != Setting::ea_classical)
    throw std::invalid_argument("build_ea_model: wrong setting");
  if (spec.n_message_bits < 2 || spec.n_message_bits % 2 != 0)
    throw std::invalid_argument("ea model: message bits must be 2 per entangled pair");
  const std::size_t pairs = spec.n_message_bits / 2;
  if (spec.n_channel_uses != pairs)
    throw std::invalid_argument("ea model: channel uses must equal pair count");
  if (spec.entangler_layers < 1) throw std::invalid_argument("ea model: need an entangler layer");

  Model m;
  m.task = spec;
  m.n_wires = 2 * pairs;  // senders 0..pairs-1, receivers pairs..2*pairs-1
  m.circuit.n_qubits = m.n_wires;

  m.layout.theta_count = 6 * spec.n_message_bits;
  m.layout.phi_count = 3 * m.n_wires * spec.decoder_layers;
  m.layout.lambda_count = 6 * spec.entangler_layers * pairs;
  m.layout.phi_offset = m.layout.theta_count;
  m.layout.lambda_offset = m.layout.phi_offset + m.layout.phi_count;
  m.layout.pi_offset = m.layout.lambda_offset + m.layout.lambda_count;

  std::size_t lambda_slot = m.layout.lambda_offset;
  for (std::size_t pr = 0; pr < pairs; ++pr)
    lambda_slot = detail::append_ansatz(m.circuit, m.gate_message_bit, {pr, pairs + pr},
                                        spec.entangler_layers, lambda_slot);

  std::size_t theta_slot = 0;
  for (std::size_t bit = 0; bit < spec.n_message_bits; ++bit) {
    const std::size_t sender = bit / 2;
    m.circuit.gates.push_back({GateKind::rot3, {sender}, {theta_slot, theta_slot + 1, theta_slot + 2}});
    m.gate_message_bit.push_back(-1);
    theta_slot += 3;
    m.circuit.gates.push_back({GateKind::rot3, {sender}, {theta_slot, theta_slot + 1, theta_slot + 2}});
    m.gate_message_bit.push_back(static_cast<int>(bit));
    theta_slot += 3;
  }

  const std::size_t after_encoder = m.circuit.gates.size();
  for (std::size_t s = 0; s < pairs; ++s)
    m.noise.push_back({after_encoder, make_channel(spec.channel), s});
  if (spec.idler_noise_p > 0.0) {
    KrausChannel idler = depolarizing(spec.idler_noise_p);
    idler.label = "idler_depolarizing";
    for (std::size_t r = 0; r < pairs; ++r) m.noise.push_back({after_encoder, idler, pairs + r});
  }

  std::vector<std::size_t> all(m.n_wires);
  for (std::size_t w = 0; w < m.n_wires; ++w) all[w] = w;
  if (spec.decoder_layers > 0)
    detail::append_ansatz(m.circuit, m.gate_message_bit, all, spec.decoder_layers, m.layout.phi_offset);
  m.readout_wires = all;
  m.circuit.n_params = m.layout.total();
  return m;
}

/// GHZ (Bell for size 2) input with wire 0 kept as the reference; E_theta,
/// the channel and D_phi touch only the transmitted wires; the joint output
/// density matrix is the result (no measurement).
inline Model build_quantum_model(const TaskSpec& spec) {
  if (spec.setting != Setting::quantum)
    throw std::invalid_argument("build_quantum_model: wrong setting");
  if (spec.ghz_size < 2) throw std::invalid_argument("quantum model: ghz_size must be >= 2");
  if (spec.n_channel_uses != spec.ghz_size - 1)
    throw std::invalid_argument("quantum model: channel uses must equal ghz_size - 1");

  Model m;
  m.task = spec;
  m.n_wires = spec.ghz_size;
  m.circuit.n_qubits = m.n_wires;
  for (std::size_t w = 1; w < m.n_wires; ++w) m.transmitted_wires.push_back(w);

  const bool enc = spec.use_encoder && spec.encoder_layers > 0;
  const std::size_t nt = m.transmitted_wires.size();
  m.layout.theta_count = enc ? 3 * nt * spec.encoder_layers : 0;
  m.layout.phi_count = 3 * nt * spec.decoder_layers;
  m.layout.phi_offset = m.layout.theta_count;
  m.layout.lambda_offset = m.layout.phi_offset + m.layout.phi_count;
  m.layout.pi_offset = m.layout.lambda_offset;

  if (enc)
    detail::append_ansatz(m.circuit, m.gate_message_bit, m.transmitted_wires, spec.encoder_layers, 0);
  const std::size_t after_encoder = m.circuit.gates.size();
  for (std::size_t w : m.transmitted_wires)
    m.noise.push_back({after_encoder, make_channel(spec.channel), w});
  if (spec.idler_noise_p > 0.0) {
    KrausChannel idler = depolarizing(spec.idler_noise_p);
    idler.label = "idler_depolarizing";
    m.noise.push_back({after_encoder, idler, 0});
  }
  if (spec.decoder_layers > 0)
    detail::append_ansatz(m.circuit, m.gate_message_bit, m.transmitted_wires, spec.decoder_layers,
                          m.layout.phi_offset);
  m.circuit.n_params = m.layout.total();
  return m;
}

inline Model build_model(const TaskSpec& spec) {
  switch (spec.setting) {
    case Setting::classical: return build_classical_model(spec);
    case Setting::ea_classical: return build_ea_model(spec);
    case Setting::quantum: return build_quantum_model(spec);
  }
  throw std::invalid_argument("build_model: unknown setting");
}

inline std::size_t message_bit(const Model& m, std::size_t message, std::size_t bit) {
  return (message >> (m.task.n_message_bits - 1 - bit)) & 1u;
}

/// Codeword embedded on the wires for one classical message: the message
/// bit string repeated cyclically across all channel uses.
inline std::string classical_codeword(const Model& m, std::size_t message) {
  std::string bits(m.n_wires, '0');
  for (std::size_t w = 0; w < m.n_wires; ++w)
    bits[w] = message_bit(m, message, w % m.task.n_message_bits) ? '1' : '0';
  return bits;
}

inline DensityMatrix initial_state(const Model& m, std::size_t message) {
  switch (m.task.setting) {
    case Setting::classical: return basis_embed(classical_codeword(m, message), m.n_wires);
    case Setting::ea_classical: return basis_embed("", m.n_wires);
    case Setting::quantum: return ghz_state(m.task.ghz_size);
  }
  throw std::invalid_argument("initial_state: unknown setting");
}

/// Readout index the decoder should steer message `message` onto.
inline std::size_t target_outcome(const Model& m, std::size_t message) {
  if (m.task.setting == Setting::quantum)
    throw std::invalid_argument("target_outcome: quantum setting has no readout");
  if (m.task.setting == Setting::classical) {
    if (m.task.pooling) return message;  // one message bit onto the kept wire
    const std::string bits = classical_codeword(m, message);
    std::size_t idx = 0;
    for (std::size_t w = 0; w < m.n_wires; ++w)
      if (bits[w] == '1') idx |= std::size_t{1} << (m.n_wires - 1 - w);
    return idx;
  }
  return message;  // EA: message bits in wire order
}

/// One forward evaluation. For the EA setting message-conditioned encoder
/// gates are skipped unless their message bit is set; elsewhere the message
/// only selects the embedded input.
inline DensityMatrix model_output(const Model& m, std::span<const double> params, std::size_t message = 0) {
  if (params.size() != m.layout.total())
    throw std::invalid_argument("model_output: parameter vector length mismatch");
  DensityMatrix rho = initial_state(m, message);
  for (std::size_t pos = 0; pos <= m.circuit.gates.size(); ++pos) {
    for (const NoiseInsertion& ins : m.noise)
      if (ins.position == pos) rho = apply_channel(rho, ins.channel, ins.wire);
    if (pos < m.circuit.gates.size()) {
      const int bit = m.gate_message_bit[pos];
      if (bit >= 0 && message_bit(m, message, static_cast<std::size_t>(bit)) == 0) continue;
      rho = apply_unitary_gate(rho, m.circuit.gates[pos], params);
    }
  }
  return rho;
}

/// Row s = exact outcome distribution p(readout | message s); rows sum to 1.
inline std::vector<std::vector<double>> conditional_distribution(const Model& m,
                                                                 std::span<const double> params) {
  if (m.task.setting == Setting::quantum)
    throw std::invalid_argument("conditional_distribution: not defined for the quantum setting");
  const std::size_t n_messages = std::size_t{1} << m.task.n_message_bits;
  std::vector<std::vector<double>> rows;
  rows.reserve(n_messages);
  for (std::size_t s = 0; s < n_messages; ++s) {
    const DensityMatrix out = model_output(m, params, s);
    rows.push_back(measurement_probabilities(out, m.readout_wires));
  }
  return rows;
}

}  // namespace qcap
