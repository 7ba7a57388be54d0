#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "scarforge/basis.hpp"
#include "scarforge/linalg.hpp"

namespace scarforge {

/// Local w-qubit permutation-with-phase unitary: U|q> = ph_q |sigma(q)>.
///
/// Patterns are 0-based internally (pattern = label - 1); cycle notation in
/// and out uses 1-based labels.
class PermutationGate {
 public:
  PermutationGate(int width, std::vector<std::uint32_t> sigma, std::vector<cplx> phases);

  static PermutationGate identity(int width);

  int width() const noexcept { return width_; }
  std::size_t dimension() const noexcept { return sigma_.size(); }
  std::uint32_t image(std::uint32_t pattern) const { return sigma_[pattern]; }
  const cplx& phase(std::uint32_t pattern) const { return phases_[pattern]; }
  const std::vector<std::uint32_t>& permutation() const noexcept { return sigma_; }
  const std::vector<cplx>& phases() const noexcept { return phases_; }

  /// Non-trivial cycles of sigma in 1-based labels, each starting at its
  /// smallest label, ordered by that label.
  std::vector<std::vector<int>> cycles() const;
  /// All cycles including fixed points.
  std::vector<std::vector<std::uint32_t>> all_cycles() const;

  std::string cycle_notation() const;

  /// Table of U^power: pattern -> (image, accumulated phase).
  struct PowerTable {
    std::vector<std::uint32_t> image;
    std::vector<cplx> phase;
  };
  PowerTable power(int exponent) const;

  bool has_trivial_phases(double tol = 1e-12) const;

 private:
  int width_;
  std::vector<std::uint32_t> sigma_;
  std::vector<cplx> phases_;
};

struct GateOrder {
  int n = 0;
  bool found = false;
};

/// Parses "((1,3,8),(2,4))" (whitespace tolerant; "()" or "" is identity).
std::vector<std::vector<int>> parse_cycle_notation(std::string_view text);

PermutationGate parse_gate(const std::vector<std::vector<int>>& cycles, std::vector<cplx> phases);
PermutationGate parse_gate(std::string_view cycles, std::vector<cplx> phases);

GateOrder gate_order(const PermutationGate& g, int n_max = 64);

/// Applies the gate on the window starting at 1-based site `site`.
PhasedState apply_gate(const PermutationGate& g, const BasisState& s, int site);

DenseMatrix gate_matrix(const PermutationGate& g);

/// Gate definition file: {width, cycles: [[...]], phases: [[re, im], ...]}.
nlohmann::json gate_to_json(const PermutationGate& g);
PermutationGate gate_from_json(const nlohmann::json& j);

}  // namespace scarforge
