#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scarforge/automaton.hpp"
#include "scarforge/hamiltonian.hpp"

namespace scarforge {

inline constexpr int kMaxBchOrder = 12;

/// One Lyndon bracket of log(e^X e^Y) with its exact coefficient. The word
/// is spelled in X/Y with its standard (right-nested) bracketing, e.g.
/// "XXY" = [X,[X,Y]].
struct BchCoefficient {
  std::string word;
  std::string bracket;
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;
  double value() const { return double(numerator) / double(denominator); }
};

/// Nonzero Lyndon-basis coefficients of the degree-`degree` part.
std::vector<BchCoefficient> bch_coefficients(int degree);

/// C_0..C_N, stored block-diagonally over symmetry sectors of the working
/// subset (a single trivial sector when unblocked).
struct BchSeries {
  std::shared_ptr<const BasisSubset> subset;
  std::vector<SectorBasis> sectors;
  std::vector<std::vector<DenseMatrix>> blocks;  // blocks[sector][n]
  int max_order = 0;

  std::size_t sector_count() const noexcept { return sectors.size(); }
  /// C_n over the subset.
  SparseOperator term(int n) const;
  /// Sector b of C_n.
  const DenseMatrix& term_block(int n, std::size_t b) const { return blocks[b][static_cast<std::size_t>(n)]; }
};

struct BchOptions {
  /// Block by momentum of the layer translation (T^stride). Requires the
  /// subset to be translation closed.
  bool blocked = true;
  /// Momentum indices to keep (empty = all). Only meaningful when blocked.
  std::vector<int> momenta;
};

/// Unblocked series from dense-able layer operators on one subset.
BchSeries bch_terms(const SparseOperator& A, const SparseOperator& B, int N,
                    std::shared_ptr<const BasisSubset> subset);
BchSeries bch_terms(const ChainHamiltonian& h, int N, const BchOptions& options = {});

/// Sum of C_0..C_order over the subset, or over one sector.
SparseOperator augmented_hamiltonian(const BchSeries& series, int order);
DenseMatrix augmented_block(const BchSeries& series, int order, std::size_t b);

/// Sector holding `index` as a single basis vector (|coefficient| = 1);
/// throws when the state is spread over several vectors.
std::size_t sector_of(const BchSeries& series, std::uint64_t index);

struct NormRow {
  int n = 0;
  double orbit_norm = 0.0;
  double leakage_norm = 0.0;
  double generic_norm = 0.0;
  // Unnormalised squared Frobenius norms.
  double orbit_sq = 0.0;
  double leakage_sq = 0.0;
  double generic_sq = 0.0;
};

struct NormProfile {
  int orbit_length = 0;
  std::size_t n_eff = 0;
  std::vector<NormRow> rows;
};

/// ||P0 C P0||/l, ||(1-P0) C P0||/sqrt(l N_eff), ||(1-P0) C (1-P0)||/N_eff.
NormProfile norm_profile(const BchSeries& series, const OrbitCycle& orbit);

struct DecayEstimate {
  double rate = 0.0;
  double leakage_sq = 0.0;  // ||(1-P0) C_2 P0||_F^2
  std::size_t n_eff = 0;
  int length = 0;
  int orbit_length = 0;
  double bandwidth = 0.0;
};

/// 2 pi (2 N_eff / (L dE)) ||(1-P0) C_2 P0||^2 / (N_eff l).
DecayEstimate fgr_rate(const NormProfile& profile, int length, double bandwidth);
DecayEstimate fgr_rate(const BchSeries& series, const OrbitCycle& orbit, int length, double bandwidth);

/// Numerical symmetry classification of an operator over a subset.
struct SymmetryFlags {
  bool inversion = false;        // commutes with site reversal
  bool time_reversal = false;    // real in the computational basis
  bool parity_anticommutes = false;  // {C, prod Z} = 0
};

SymmetryFlags classify(const SparseOperator& op, const BasisSubset& subset, double tol = 1e-9);

}  // namespace scarforge
