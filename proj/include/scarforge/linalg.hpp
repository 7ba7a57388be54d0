#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "scarforge/basis.hpp"

namespace scarforge {

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;

/// Full eigensystem of a Hermitian matrix, eigenvalues ascending.
struct Eigensystem {
  RealVector values;
  DenseMatrix vectors;  // columns
};

/// Hermitian eigensolver backed by LAPACK zheevd (dsyevd when `h` is real). Only the lower triangle of
/// `h` is read.
Eigensystem eigh(DenseMatrix h);
RealVector eigvalsh(DenseMatrix h);

/// Real symmetric eigenvalues (dsyevd), used for ensemble sampling.
Eigen::VectorXd eigvalsh_real(Eigen::MatrixXd h);

/// Drops stored entries with modulus <= `cutoff`.
void prune(SparseOperator& op, double cutoff);

double frobenius(const SparseOperator& op);
double max_abs(const SparseOperator& op);

/// max |a_ij - conj(a_ji)|
double hermiticity_defect(const DenseMatrix& a);
double hermiticity_defect(const SparseOperator& a);

}  // namespace scarforge
