#pragma once

#include <vector>

#include "scarforge/gate.hpp"
#include "scarforge/linalg.hpp"

namespace scarforge {

/// h0 = i log U0 on the principal branch, eigenphases in (-pi, pi].
struct LocalHamiltonian {
  DenseMatrix matrix;
  PermutationGate source;
  int order = 0;  // n with U0^n = 1
};

/// h0 = sum_k c_k U0^k, k = 0..n-1.
struct PowerDecomposition {
  int order = 0;
  std::vector<cplx> coefficients;
  std::vector<bool> structural_zero;  // |c_k| < 1e-12
  double reconstruction_error = 0.0;  // Frobenius, only when built from a gate
};

/// h^m = sum_{k<m} alpha_k h^k with m minimal.
struct ClosingRelation {
  int power = 0;
  std::vector<cplx> alpha;
};

/// Maps an angle onto (-pi, pi]; values within 1e-12 of -pi land on +pi.
double principal_angle(double beta);

LocalHamiltonian principal_log(const PermutationGate& g);

/// Coefficients depend only on n; this overload needs no gate.
PowerDecomposition power_decomposition(int order);
PowerDecomposition power_decomposition(const PermutationGate& g);

/// The (n * n_cycles) x n matrix Gamma_{s,k} = exp(i k gamma_s) over the
/// augmented eigenphases gamma_s = 2 pi s / n, k = 0..n-1.
DenseMatrix augmented_gamma(int order, int n_cycles);

ClosingRelation closing_relation(const DenseMatrix& h, int max_power);
inline ClosingRelation closing_relation(const LocalHamiltonian& h) {
  return closing_relation(h.matrix, h.order);
}

/// Dense exp(-i h) for Hermitian h.
DenseMatrix unitary_from_hamiltonian(const DenseMatrix& h);

}  // namespace scarforge
