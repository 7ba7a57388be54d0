#include "scarforge/automaton.hpp"

#include <algorithm>
#include <cmath>

#include "scarforge/logmap.hpp"

namespace scarforge {

namespace {

// Applies the gate at 0-based `start` on a chain of `length` qubits.
inline std::uint64_t act(const PermutationGate& g, std::uint64_t index, int start, int length,
                         cplx& phase) {
  const auto q = bits::window(index, start, g.width(), length);
  phase *= g.phase(q);
  return bits::set_window(index, start, g.width(), length, g.image(q));
}

bool gates_commute(const PermutationGate& g, int length, int s1, int s2) {
  for (std::uint64_t x = 0; x <= bits::mask(length); ++x) {
    cplx p1{1.0, 0.0}, p2{1.0, 0.0};
    const auto a = act(g, act(g, x, s1, length, p1), s2, length, p1);
    const auto b = act(g, act(g, x, s2, length, p2), s1, length, p2);
    if (a != b || std::abs(p1 - p2) > 1e-10) return false;
  }
  return true;
}

}  // namespace

Geometry parse_geometry(const std::string& name) {
  if (name == "stride4") return Geometry::Stride4;
  if (name == "stride2") return Geometry::Stride2;
  throw ConfigError("unknown geometry '" + name + "' (expected stride4 or stride2)");
}

std::string to_string(Geometry g) { return g == Geometry::Stride4 ? "stride4" : "stride2"; }

FloquetCircuit::FloquetCircuit(PermutationGate gate, int length, Geometry geometry)
    : gate_(std::move(gate)), length_(length), geometry_(geometry) {
  const int w = gate_.width();
  if (length <= 0 || length % 2 != 0) throw ConfigError("chain length must be positive and even");
  if (w > length) throw ConfigError("gate is wider than the chain");
  if (geometry == Geometry::Stride4) {
    if (w > 4) throw ConfigError("stride-4 geometry needs gate width <= 4 for disjoint supports");
    // L = 2 mod 4 still defines H as the sum over odd sites, but the last A
    // gate overlaps the first, so there is no brickwork U_F.
    brickwork_ = length % 4 == 0;
    for (int s = 1; s <= length; s += 4) a_sites_.push_back(s);
    for (int s = 3; s <= length; s += 4) b_sites_.push_back(s);
  } else {
    for (int s = 1; s <= length; s += 2) {
      a_sites_.push_back(s);
      b_sites_.push_back(s + 1);
    }
    // Neighbouring gates within a layer overlap; they must commute.
    if (!gates_commute(gate_, w + 2, 0, 2)) {
      throw ConfigError("stride-2 geometry: gates two sites apart do not commute");
    }
    if (length < 2 * w) {
      for (const auto* layer : {&a_sites_, &b_sites_}) {
        for (std::size_t i = 0; i < layer->size(); ++i) {
          for (std::size_t k = i + 1; k < layer->size(); ++k) {
            if (!gates_commute(gate_, length, (*layer)[i] - 1, (*layer)[k] - 1)) {
              throw ConfigError("stride-2 geometry: gates in one layer do not commute at this L");
            }
          }
        }
      }
    }
  }
}

std::uint64_t FloquetCircuit::apply_layer(Layer layer, std::uint64_t index, cplx& phase) const {
  for (int s : sites(layer)) index = act(gate_, index, s - 1, length_, phase);
  return index;
}

void FloquetCircuit::require_brickwork() const {
  if (!brickwork_) {
    throw ConfigError("stride-4 Floquet unitary needs L divisible by 4 (L = " +
                      std::to_string(length_) + " only defines H)");
  }
}

PhasedState apply_floquet(const FloquetCircuit& c, const BasisState& s) {
  if (s.length() != c.length()) throw ConfigError("state length does not match the circuit");
  c.require_brickwork();
  cplx phase{1.0, 0.0};
  const auto out = c.apply(s.index(), phase);
  return {BasisState(out, c.length()), phase};
}

bool OrbitCycle::contains(const BasisState& s) const {
  return std::find(states.begin(), states.end(), s) != states.end();
}

cplx OrbitCycle::weight(int k) const {
  cplx w{1.0, 0.0};
  for (int j = 0; j < k; ++j) w *= step_phases[static_cast<std::size_t>(j % length())];
  return w;
}

OrbitCycle orbit_of(const FloquetCircuit& c, const BasisState& seed, std::uint64_t l_max) {
  if (seed.length() != c.length()) throw ConfigError("seed length does not match the circuit");
  c.require_brickwork();
  if (l_max == 0) l_max = std::uint64_t{1} << std::min(c.length(), 40);
  OrbitCycle o;
  cplx total{1.0, 0.0};
  auto cur = seed.index();
  do {
    if (o.states.size() >= l_max) {
      throw NumericalGuardError("orbit longer than l_max = " + std::to_string(l_max));
    }
    o.states.emplace_back(cur, c.length());
    cplx ph{1.0, 0.0};
    cur = c.apply(cur, ph);
    o.step_phases.push_back(ph);
    total *= ph;
  } while (cur != seed.index());
  o.phi = principal_angle(std::arg(total));
  return o;
}

std::vector<FloquetEigenstate> floquet_eigenstates(const OrbitCycle& o) {
  const int l = o.length();
  std::vector<std::uint64_t> idx;
  for (const auto& s : o.states) idx.push_back(s.index());
  auto subset = std::make_shared<const BasisSubset>(o.states.front().length(), idx);

  std::vector<FloquetEigenstate> out;
  for (int m = 0; m < l; ++m) {
    FloquetEigenstate e;
    e.m = m;
    e.beta = (o.phi + 2.0 * kPi * m) / l;
    e.vector.subset = subset;
    e.vector.amplitudes.assign(static_cast<std::size_t>(l), cplx{});
    for (int k = 0; k < l; ++k) {
      const auto pos = subset->position(o.states[static_cast<std::size_t>(k)].index());
      e.vector.amplitudes[pos] = std::polar(1.0 / std::sqrt(double(l)), -k * e.beta) * o.weight(k);
    }
    out.push_back(std::move(e));
  }
  return out;
}

DenseMatrix layer_matrix(const FloquetCircuit& c, Layer layer) {
  if (c.length() > 14) throw ConfigError("dense layer matrices are limited to L <= 14");
  c.require_brickwork();
  const Eigen::Index dim = Eigen::Index{1} << c.length();
  DenseMatrix m = DenseMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    cplx ph{1.0, 0.0};
    const auto j = c.apply_layer(layer, static_cast<std::uint64_t>(i), ph);
    m(static_cast<Eigen::Index>(j), i) = ph;
  }
  return m;
}

DenseMatrix floquet_matrix(const FloquetCircuit& c) {
  return layer_matrix(c, Layer::A) * layer_matrix(c, Layer::B);
}

}  // namespace scarforge
