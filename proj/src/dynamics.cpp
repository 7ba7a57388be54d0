#include "scarforge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scarforge {

namespace {

constexpr double kNormDrift = 1e-6;
constexpr Eigen::Index kBatch = 64;

void check_norm(const DenseVector& psi, double t) {
  const double drift = std::abs(psi.norm() - 1.0);
  if (drift > kNormDrift) {
    std::ostringstream msg;
    msg << "norm drift " << drift << " at t = " << t << " exceeds " << kNormDrift;
    throw NumericalGuardError(msg.str());
  }
}

void check_times(const std::vector<double>& times) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("time grid must be strictly increasing");
  }
}

DenseVector unit(Eigen::Index dim, std::size_t pos) {
  DenseVector v = DenseVector::Zero(dim);
  v(static_cast<Eigen::Index>(pos)) = 1.0;
  return v;
}

DenseVector taylor_step(const SparseOperator& H, const DenseVector& psi, double tau) {
  DenseVector out = psi, term = psi;
  const cplx f{0.0, -tau};
  for (int k = 1; k < 60; ++k) {
    term = (f / double(k)) * (H * term);
    out += term;
    if (term.norm() < 1e-16 * out.norm()) return out;
  }
  throw NumericalGuardError("Taylor series did not converge; reduce the step");
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  if (dt <= 0.0 || t_max < t_min) throw ConfigError("time grid needs dt > 0 and t_max >= t_min");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((t_max - t_min) / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(t_min + double(i) * dt);
  return out;
}

EvolutionJob sector_job(const SparseOperator& H, const SectorBasis& basis, std::uint64_t state,
                        const TimeGrid& grid) {
  EvolutionJob job;
  job.hamiltonian = project_sector(H, basis);
  const auto pos = basis.subset->position(state);
  const auto r = basis.owner[pos];
  if (r == BasisSubset::npos || std::abs(std::abs(basis.coefficient[pos]) - 1.0) > 1e-12) {
    throw ConfigError("initial state does not lie in the requested sector");
  }
  job.initial = unit(static_cast<Eigen::Index>(basis.size()), r) * std::conj(basis.coefficient[pos]);
  job.grid = grid;
  job.pr_weights = basis.sum_u4;
  return job;
}

EvolutionJob subset_job(const SparseOperator& H, const BasisSubset& subset, std::uint64_t state,
                        const TimeGrid& grid) {
  EvolutionJob job;
  job.hamiltonian = H;
  job.initial = unit(static_cast<Eigen::Index>(subset.size()), subset.position(state));
  job.grid = grid;
  return job;
}

DensePropagator::DensePropagator(const SparseOperator& H) {
  if (static_cast<std::size_t>(H.rows()) > kDenseLimit) {
    throw ConfigError("dense propagation is limited to dimension " + std::to_string(kDenseLimit));
  }
  es_ = eigh(DenseMatrix(H));
}

void DensePropagator::evolve(const DenseVector& psi0, const std::vector<double>& times,
                             const StateCallback& f) const {
  check_times(times);
  const DenseVector c = es_.vectors.adjoint() * psi0;
  const Eigen::Index n = c.size();
  for (std::size_t start = 0; start < times.size(); start += kBatch) {
    const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(kBatch, times.size() - start));
    DenseMatrix coeff(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double t = times[start + static_cast<std::size_t>(j)];
      for (Eigen::Index k = 0; k < n; ++k) coeff(k, j) = c(k) * std::polar(1.0, -es_.values(k) * t);
    }
    const DenseMatrix psi = es_.vectors * coeff;
    for (Eigen::Index j = 0; j < m; ++j) {
      const DenseVector col = psi.col(j);
      check_norm(col, times[start + static_cast<std::size_t>(j)]);
      f(start + static_cast<std::size_t>(j), col);
    }
  }
}

void taylor_evolve(const SparseOperator& H, const DenseVector& psi0, const std::vector<double>& times,
                   const StateCallback& f, double tol) {
  check_times(times);
  double scale = 0.0;
  for (Eigen::Index c = 0; c < H.outerSize(); ++c) {
    double col = 0.0;
    for (SparseOperator::InnerIterator it(H, c); it; ++it) col += std::abs(it.value());
    scale = std::max(scale, col);
  }
  double tau = scale > 0.0 ? 1.0 / scale : 1.0;
  DenseVector psi = psi0;
  double t = times.empty() ? 0.0 : std::min(0.0, times.front());
  for (std::size_t i = 0; i < times.size(); ++i) {
    while (t < times[i]) {
      const double h = std::min(tau, times[i] - t);
      const DenseVector full = taylor_step(H, psi, h);
      const DenseVector half = taylor_step(H, taylor_step(H, psi, h / 2), h / 2);
      const double err = (full - half).norm();
      if (err > tol && h > 1e-12) {
        tau = h / 2;
        continue;
      }
      psi = half;
      t += h;
      if (err < tol / 64) tau = std::min(2 * tau, 4.0 / std::max(scale, 1e-300));
    }
    check_norm(psi, times[i]);
    f(i, psi);
  }
}

void evolve(const EvolutionJob& job, const StateCallback& f) {
  const auto times = job.grid.times();
  if (job.method == Propagator::Dense) {
    DensePropagator(job.hamiltonian).evolve(job.initial, times, f);
  } else {
    taylor_evolve(job.hamiltonian, job.initial, times, f);
  }
}

std::vector<DenseVector> evolve(const EvolutionJob& job) {
  std::vector<DenseVector> out;
  evolve(job, [&](std::size_t, const DenseVector& psi) { out.push_back(psi); });
  return out;
}

double participation_ratio(const DenseVector& v, const std::vector<double>& weights) {
  double pr = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = std::norm(v(i));
    pr += p * p * (weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)]);
  }
  return pr;
}

double participation_ratio(const StateVector& v) {
  double pr = 0.0;
  for (const auto& a : v.amplitudes) pr += std::norm(a) * std::norm(a);
  return pr;
}

double fidelity(const DenseVector& v, const DenseVector& ref) {
  if (v.size() != ref.size()) throw ConfigError("fidelity needs vectors on the same basis");
  return std::norm(ref.dot(v));
}

double fidelity(const StateVector& v, const StateVector& ref) {
  if (v.subset != ref.subset && (!v.subset || !ref.subset || v.subset->states() != ref.subset->states())) {
    throw ConfigError("fidelity needs states on the same subset");
  }
  cplx s{};
  for (std::size_t i = 0; i < v.amplitudes.size(); ++i) s += std::conj(ref.amplitudes[i]) * v.amplitudes[i];
  return std::norm(s);
}

RevivalTrace revival_trace(const EvolutionJob& job) {
  RevivalTrace tr;
  tr.times = job.grid.times();
  tr.pr_values.resize(tr.times.size());
  tr.fidelity_values.resize(tr.times.size());
  evolve(job, [&](std::size_t i, const DenseVector& psi) {
    tr.pr_values[i] = participation_ratio(psi, job.pr_weights);
    tr.fidelity_values[i] = fidelity(psi, job.initial);
  });
  return tr;
}

RevivalPeak first_revival(const DensePropagator& prop, const DenseVector& psi0, int orbit_length, double dt) {
  if (orbit_length <= 0 || dt <= 0.0) throw ConfigError("first revival needs l > 0 and dt > 0");
  TimeGrid g;
  g.t_min = 0.5 * orbit_length;
  g.t_max = 1.5 * orbit_length;
  g.dt = dt;
  RevivalPeak best;
  best.fidelity = -1.0;
  const auto times = g.times();
  prop.evolve(psi0, times, [&](std::size_t i, const DenseVector& psi) {
    const double f = fidelity(psi, psi0);
    if (f > best.fidelity) best = {times[i], f};
  });
  return best;
}

std::uint64_t generic_state(const BasisSubset& subset, const OrbitCycle& orbit) {
  for (auto s : subset.states()) {
    if (!orbit.contains(BasisState(s, subset.length()))) return s;
  }
  throw ConfigError("subset holds no state outside the orbit");
}

LocalZTrace local_z_trace(const DensePropagator& prop, const BasisSubset& subset, const DenseVector& psi0,
                          int site, double window, const std::vector<double>& times) {
  const int L = subset.length();
  if (site < 1 || site > L) throw ConfigError("site out of range");
  if (!(window > 0.0)) throw ConfigError("microcanonical window must be positive");
  const auto& es = prop.eigensystem();
  if (es.vectors.rows() != static_cast<Eigen::Index>(subset.size())) {
    throw ConfigError("local Z traces need the Hamiltonian in subset coordinates");
  }
  RealVector z(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t p = 0; p < subset.size(); ++p) {
    z(static_cast<Eigen::Index>(p)) = bits::window(subset.state(p), site - 1, 1, L) ? -1.0 : 1.0;
  }
  LocalZTrace out;
  out.site = site;
  out.times = times;
  const DenseVector c = es.vectors.adjoint() * psi0;
  out.energy = (c.cwiseAbs2().transpose() * es.values)(0);
  double acc = 0.0;
  for (Eigen::Index n = 0; n < es.values.size(); ++n) {
    if (std::abs(es.values(n) - out.energy) > window / 2) continue;
    acc += (es.vectors.col(n).cwiseAbs2().transpose() * z)(0);
    ++out.window_states;
  }
  if (out.window_states == 0) throw ConfigError("microcanonical window holds no eigenstates");
  out.microcanonical = acc / double(out.window_states);
  out.values.resize(times.size());
  prop.evolve(psi0, times, [&](std::size_t i, const DenseVector& psi) {
    out.values[i] = (psi.cwiseAbs2().transpose() * z)(0);
  });
  return out;
}

}  // namespace scarforge
