#include "scarforge/logmap.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace scarforge {

namespace {

constexpr double kStructuralZero = 1e-12;
constexpr double kRankTol = 1e-9;

}  // namespace

double principal_angle(double beta) {
  double r = beta - 2.0 * kPi * std::floor((beta + kPi) / (2.0 * kPi));
  if (r <= -kPi + 1e-12) r += 2.0 * kPi;
  return r;
}

LocalHamiltonian principal_log(const PermutationGate& g) {
  const auto order = gate_order(g);
  if (!order.found) {
    throw ConfigError("gate has no finite order: accumulated cycle phases are not integer "
                      "fractions of 2 pi");
  }
  const auto dim = static_cast<Eigen::Index>(g.dimension());
  DenseMatrix h = DenseMatrix::Zero(dim, dim);

  for (const auto& cycle : g.all_cycles()) {
    const auto l = static_cast<int>(cycle.size());
    // U^k |q1> = w_k |sigma^k(q1)>
    std::vector<cplx> weight(cycle.size());
    cplx acc{1.0, 0.0};
    for (int k = 0; k < l; ++k) {
      weight[static_cast<std::size_t>(k)] = acc;
      acc *= g.phase(cycle[static_cast<std::size_t>(k)]);
    }
    const double phi = principal_angle(std::arg(acc));
    for (int m = 0; m < l; ++m) {
      const double beta = (phi + 2.0 * kPi * m) / l;
      const double beta_p = principal_angle(beta);
      DenseVector v = DenseVector::Zero(dim);
      for (int k = 0; k < l; ++k) {
        v(cycle[static_cast<std::size_t>(k)]) =
            std::polar(1.0 / std::sqrt(double(l)), -k * beta) * weight[static_cast<std::size_t>(k)];
      }
      h.noalias() -= beta_p * (v * v.adjoint());
    }
  }
  return {std::move(h), g, order.n};
}

DenseMatrix augmented_gamma(int order, int n_cycles) {
  const Eigen::Index rows = static_cast<Eigen::Index>(order) * n_cycles;
  DenseMatrix gamma(rows, order);
  for (Eigen::Index s = 0; s < rows; ++s) {
    const double g = 2.0 * kPi * static_cast<double>((s % order) + 1) / order;
    for (int k = 0; k < order; ++k) gamma(s, k) = std::polar(1.0, k * g);
  }
  return gamma;
}

PowerDecomposition power_decomposition(int order) {
  if (order < 1) throw ConfigError("power decomposition needs a positive order");
  // One cycle suffices: every cycle carries the same n augmented phases.
  const DenseMatrix gamma = augmented_gamma(order, 1);
  DenseVector target(order);
  for (int s = 0; s < order; ++s) {
    target(s) = -principal_angle(2.0 * kPi * (s + 1) / order);
  }
  const DenseVector c = gamma.adjoint() * target / double(order);

  PowerDecomposition out;
  out.order = order;
  for (int k = 0; k < order; ++k) {
    cplx v = c(k);
    const bool zero = std::abs(v) < kStructuralZero;
    if (zero) v = 0.0;
    // Snap round-off so Hermitian partners stay exact conjugates.
    if (std::abs(v.imag()) < kStructuralZero) v.imag(0.0);
    if (std::abs(v.real()) < kStructuralZero) v.real(0.0);
    out.coefficients.push_back(v);
    out.structural_zero.push_back(zero);
  }
  return out;
}

PowerDecomposition power_decomposition(const PermutationGate& g) {
  const auto h = principal_log(g);
  auto out = power_decomposition(h.order);
  const DenseMatrix u = gate_matrix(g);
  DenseMatrix acc = DenseMatrix::Zero(u.rows(), u.cols());
  DenseMatrix p = DenseMatrix::Identity(u.rows(), u.cols());
  for (int k = 0; k < out.order; ++k) {
    acc += out.coefficients[static_cast<std::size_t>(k)] * p;
    p = u * p;
  }
  out.reconstruction_error = (acc - h.matrix).norm();
  return out;
}

ClosingRelation closing_relation(const DenseMatrix& h, int max_power) {
  const Eigen::Index dim = h.rows();
  const Eigen::Index entries = dim * dim;
  const int limit = std::max(max_power, 1);
  std::vector<DenseMatrix> powers{DenseMatrix::Identity(dim, dim)};
  for (int m = 1; m <= limit; ++m) {
    powers.push_back(powers.back() * h);
    DenseMatrix basis(entries, m);
    for (int k = 0; k < m; ++k) basis.col(k) = powers[static_cast<std::size_t>(k)].reshaped();
    DenseMatrix stacked(entries, m + 1);
    stacked << basis, powers.back().reshaped();
    Eigen::JacobiSVD<DenseMatrix> svd(stacked);
    const auto& sv = svd.singularValues();
    const double cut = kRankTol * sv(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cut ? 1 : 0;
    if (rank <= m) {
      Eigen::CompleteOrthogonalDecomposition<DenseMatrix> solver(basis);
      solver.setThreshold(kRankTol);
      const DenseVector alpha = solver.solve(DenseVector(powers.back().reshaped()));
      ClosingRelation out;
      out.power = m;
      for (int k = 0; k < m; ++k) {
        cplx a = alpha(k);
        if (std::abs(a) < kStructuralZero) a = 0.0;
        out.alpha.push_back(a);
      }
      return out;
    }
  }
  throw NumericalGuardError("no closing relation found up to the given power");
}

DenseMatrix unitary_from_hamiltonian(const DenseMatrix& h) {
  const auto es = eigh(h);
  DenseVector phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -es.values(i));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

}  // namespace scarforge
