#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scarforge/basis.hpp"
#include "scarforge/gate.hpp"
#include "scarforge/linalg.hpp"

namespace scarforge {

// Stride4: A layer at sites 1, 5, 9, ... and B layer at 3, 7, 11, ...
// Stride2 (PXP layout): A layer on odd sites, B layer on even sites.
enum class Geometry { Stride4, Stride2 };

Geometry parse_geometry(const std::string& name);
std::string to_string(Geometry g);

enum class Layer { A, B };

/// U_F = e^{-iA} e^{-iB}: the B layer acts first.
class FloquetCircuit {
 public:
  FloquetCircuit(PermutationGate gate, int length, Geometry geometry);

  const PermutationGate& gate() const noexcept { return gate_; }
  int length() const noexcept { return length_; }
  Geometry geometry() const noexcept { return geometry_; }
  int stride() const noexcept { return geometry_ == Geometry::Stride4 ? 4 : 2; }

  /// 1-based first sites of the gates in a layer.
  const std::vector<int>& sites(Layer layer) const {
    return layer == Layer::A ? a_sites_ : b_sites_;
  }

  /// False for stride-4 chains with L = 2 mod 4, where only H is defined.
  bool has_brickwork() const noexcept { return brickwork_; }
  void require_brickwork() const;

  /// Raw-index kernels; phase is multiplied into `phase`.
  std::uint64_t apply_layer(Layer layer, std::uint64_t index, cplx& phase) const;
  std::uint64_t apply(std::uint64_t index, cplx& phase) const {
    index = apply_layer(Layer::B, index, phase);
    return apply_layer(Layer::A, index, phase);
  }

 private:
  PermutationGate gate_;
  int length_;
  Geometry geometry_;
  std::vector<int> a_sites_, b_sites_;
  bool brickwork_ = true;
};

PhasedState apply_floquet(const FloquetCircuit& c, const BasisState& s);

/// Cycle [q, sigma(q), ...] under U_F with U_F|s_k> = step_phase[k] |s_{k+1}>.
struct OrbitCycle {
  std::vector<BasisState> states;
  std::vector<cplx> step_phases;
  double phi = 0.0;  // arg of the accumulated phase, on (-pi, pi]

  int length() const noexcept { return static_cast<int>(states.size()); }
  bool contains(const BasisState& s) const;
  /// Coefficient w_k of U_F^k |q1> = w_k |s_k>.
  cplx weight(int k) const;
};

OrbitCycle orbit_of(const FloquetCircuit& c, const BasisState& seed, std::uint64_t l_max = 0);

struct FloquetEigenstate {
  int m = 0;
  double beta = 0.0;  // eigenphase (Phi + 2 pi m) / l
  StateVector vector;
};

std::vector<FloquetEigenstate> floquet_eigenstates(const OrbitCycle& o);

/// Dense layer / Floquet unitaries over the full 2^L space (small L only).
DenseMatrix layer_matrix(const FloquetCircuit& c, Layer layer);
DenseMatrix floquet_matrix(const FloquetCircuit& c);

}  // namespace scarforge
