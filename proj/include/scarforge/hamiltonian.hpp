#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "scarforge/automaton.hpp"
#include "scarforge/logmap.hpp"

namespace scarforge {

inline constexpr double kAssemblyCutoff = 1e-13;
inline constexpr std::size_t kDenseLimit = 6000;

/// A = sum of h0 over the A layer, B likewise, H = A + B, all over one subset.
struct ChainHamiltonian {
  std::shared_ptr<const BasisSubset> subset;
  SparseOperator A, B, H;
  DenseMatrix h0;  // local term
  int length = 0;
  Geometry geometry = Geometry::Stride4;
};

ChainHamiltonian build_hamiltonian(const FloquetCircuit& c,
                                   std::shared_ptr<const BasisSubset> subset);
/// Same, with an explicit local term in place of i log U0.
ChainHamiltonian build_hamiltonian(const FloquetCircuit& c,
                                   std::shared_ptr<const BasisSubset> subset,
                                   const LocalHamiltonian& h0);

/// Connected component of `seed` under the nonzero matrix elements of H.
BasisSubset krylov_subspace(const FloquetCircuit& c, const BasisState& seed);

/// Sum of `local` placed on each listed 1-based site, over `subset`.
SparseOperator local_sum(const DenseMatrix& local, const std::vector<int>& sites,
                         const BasisSubset& subset);

/// Character of the symmetry group generated by a translation and
/// optionally U_SM = (prod X) S M. Both act as permutations of basis states.
struct SymmetrySector {
  int shift = 0;                  // translation generator T^shift; 0 = none
  cplx translation_eigenvalue{1.0, 0.0};
  bool spin_mirror = false;       // include U_SM
  int spin_mirror_eigenvalue = 1;

  /// "s2+1,usm+1" style: s2+1, s2-1, s2k3 (momentum index), usm+1, usm-1.
  static SymmetrySector parse(const std::string& text, int length);
  static SymmetrySector momentum(int shift, int k, int length);
  std::string describe() const;
};

std::uint64_t spin_mirror(std::uint64_t index, int length);

/// Symmetry-adapted basis |r~> = P_chi |r> / norm over a subset closed
/// under the group. Each subset state belongs to at most one vector.
struct SectorBasis {
  std::shared_ptr<const BasisSubset> subset;
  SymmetrySector sector;
  std::vector<std::uint64_t> representatives;  // smallest index of each orbit
  std::vector<std::size_t> owner;              // subset pos -> sector pos (npos if none)
  std::vector<cplx> coefficient;               // subset pos -> <s|r~>
  std::vector<double> sum_u4;                  // per vector, sum_s |<s|r~>|^4

  std::size_t size() const noexcept { return representatives.size(); }
  /// Sector coordinates of a subset vector (orthogonal projection).
  DenseVector project(const DenseVector& v) const;
  /// Back to subset coordinates.
  DenseVector lift(const DenseVector& a) const;
};

SectorBasis build_sector(std::shared_ptr<const BasisSubset> subset, const SymmetrySector& sector);

/// max |([H, g])_{ts}| over generators g of the sector group.
double symmetry_defect(const SparseOperator& H, const BasisSubset& subset,
                       const SymmetrySector& sector);

/// H restricted to the sector; throws if the symmetry fails beyond 1e-9.
SparseOperator project_sector(const SparseOperator& H, const SectorBasis& basis);
SparseOperator project_sector(const ChainHamiltonian& H, const SectorBasis& basis);

/// P0 as a subset diagonal indicator over the given orbit states.
std::vector<std::size_t> orbit_positions(const BasisSubset& subset, const OrbitCycle& orbit);

DenseMatrix to_dense(const SparseOperator& op);

/// Operator dump: {"header": {...}, "entries": [[row, col, re, im], ...]}.
nlohmann::json operator_to_json(const SparseOperator& op, const BasisSubset& subset,
                                const std::string& model);

}  // namespace scarforge
