#pragma once

#include <cmath>
#include <vector>

#include "scarforge/basis.hpp"
#include "scarforge/gate.hpp"
#include "scarforge/linalg.hpp"

namespace fixtures {

using scarforge::cplx;

inline std::vector<cplx> ones(int dim = 16) { return std::vector<cplx>(dim, cplx{1.0, 0.0}); }

inline std::vector<cplx> pxp_phases() {
  auto p = ones();
  for (int label : {11, 12, 15, 16}) p[label - 1] = cplx{0.0, 1.0};
  return p;
}

inline scarforge::PermutationGate pxp() { return scarforge::parse_gate("((11,15),(12,16))", pxp_phases()); }
inline scarforge::PermutationGate qmbs_a() {
  return scarforge::parse_gate("((3,13,11,7,9,5),(4,14,12,8,10,6))", ones());
}
inline scarforge::PermutationGate qmbs_b() {
  return scarforge::parse_gate("((1,15),(2,16),(3,9,5),(4,10,6),(7,13,11),(8,14,12))", ones());
}
inline scarforge::PermutationGate qmbs_c() {
  return scarforge::parse_gate("((3,5),(4,6),(7,15,9),(8,16,10),(11,13),(12,14))", ones());
}

inline scarforge::DenseMatrix kron(const scarforge::DenseMatrix& a, const scarforge::DenseMatrix& b) {
  scarforge::DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Permutation matrix of translate(., shift) on the full chain.
inline scarforge::DenseMatrix translation_matrix(int L, int shift) {
  const Eigen::Index dim = Eigen::Index{1} << L;
  scarforge::DenseMatrix t = scarforge::DenseMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto j = scarforge::bits::rotate_right(static_cast<std::uint64_t>(i), shift, L);
    t(static_cast<Eigen::Index>(j), i) = 1.0;
  }
  return t;
}

// Local w-qubit matrix on 1-based sites j..j+w-1 of an L chain (Kronecker
// products, wrapping windows conjugated by a translation).
inline scarforge::DenseMatrix embed(const scarforge::DenseMatrix& local, int L, int j) {
  using scarforge::DenseMatrix;
  const int w = static_cast<int>(std::log2(static_cast<double>(local.rows())) + 0.5);
  const int start = j - 1;
  if (start + w <= L) {
    const DenseMatrix left = DenseMatrix::Identity(Eigen::Index{1} << start, Eigen::Index{1} << start);
    const int rest = L - start - w;
    const DenseMatrix right = DenseMatrix::Identity(Eigen::Index{1} << rest, Eigen::Index{1} << rest);
    return kron(kron(left, local), right);
  }
  const DenseMatrix t = translation_matrix(L, L - start);
  return t.adjoint() * embed(local, L, 1) * t;
}

}  // namespace fixtures
