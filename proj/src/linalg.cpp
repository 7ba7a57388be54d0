#include "scarforge/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace scarforge {

namespace {

Eigensystem run_zheevd(DenseMatrix h, char jobz) {
  if (h.rows() != h.cols()) throw ConfigError("eigh: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(h.rows());
  Eigensystem out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(h.data()), n,
                                         out.values.data());
  if (info != 0) {
    throw NumericalGuardError("zheevd failed with info=" + std::to_string(info));
  }
  if (jobz == 'V') out.vectors = std::move(h);
  return out;
}

Eigensystem run_dsyevd(const DenseMatrix& h, char jobz) {
  Eigen::MatrixXd a = h.real();
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigensystem out;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericalGuardError("dsyevd failed with info=" + std::to_string(info));
  if (jobz == 'V') out.vectors = a.cast<cplx>();
  return out;
}

// Real symmetric input takes the (several times cheaper) real solver.
bool is_real(const DenseMatrix& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return h.imag().cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

}  // namespace

Eigensystem eigh(DenseMatrix h) { return is_real(h) ? run_dsyevd(h, 'V') : run_zheevd(std::move(h), 'V'); }

RealVector eigvalsh(DenseMatrix h) { return is_real(h) ? run_dsyevd(h, 'N').values : run_zheevd(std::move(h), 'N').values; }

Eigen::VectorXd eigvalsh_real(Eigen::MatrixXd h) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, h.data(), n, w.data());
  if (info != 0) throw NumericalGuardError("dsyevd failed with info=" + std::to_string(info));
  return w;
}

void prune(SparseOperator& op, double cutoff) {
  op.prune([cutoff](const auto&, const auto&, const cplx& v) { return std::abs(v) > cutoff; });
}

double frobenius(const SparseOperator& op) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < op.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(op, k); it; ++it) acc += std::norm(it.value());
  }
  return std::sqrt(acc);
}

double max_abs(const SparseOperator& op) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < op.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(op, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double hermiticity_defect(const DenseMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const SparseOperator& a) {
  const SparseOperator diff = a - SparseOperator(a.adjoint());
  return max_abs(diff);
}

}  // namespace scarforge
