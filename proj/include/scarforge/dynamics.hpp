#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "scarforge/automaton.hpp"
#include "scarforge/hamiltonian.hpp"
#include "scarforge/linalg.hpp"

namespace scarforge {

/// Uniform grid 0, dt, 2 dt, ..., up to t_max inclusive.
struct TimeGrid {
  double dt = 0.05;
  double t_max = 300.0;
  double t_min = 0.0;
  std::vector<double> times() const;
};

enum class Propagator { Dense, Taylor };

/// Coordinates are those of `hamiltonian`: a subset or a symmetry sector.
/// `pr_weights[r]` = sum_s |<s|r>|^4 turns sector amplitudes into the
/// participation ratio over computational states (empty = all ones).
struct EvolutionJob {
  SparseOperator hamiltonian;
  DenseVector initial;
  TimeGrid grid;
  Propagator method = Propagator::Dense;
  std::vector<double> pr_weights;
};

/// Job for `state` restricted to the sector of `basis` (state must lie in it).
EvolutionJob sector_job(const SparseOperator& H, const SectorBasis& basis, std::uint64_t state,
                        const TimeGrid& grid);
/// Job over the plain subset.
EvolutionJob subset_job(const SparseOperator& H, const BasisSubset& subset, std::uint64_t state,
                        const TimeGrid& grid);

using StateCallback = std::function<void(std::size_t, const DenseVector&)>;

/// e^{-iHt} from a full eigendecomposition; states are produced in batches.
class DensePropagator {
 public:
  explicit DensePropagator(const SparseOperator& H);
  explicit DensePropagator(Eigensystem es) : es_(std::move(es)) {}
  const Eigensystem& eigensystem() const noexcept { return es_; }
  void evolve(const DenseVector& psi0, const std::vector<double>& times, const StateCallback& f) const;

 private:
  Eigensystem es_;
};

/// Taylor steps with step-doubling error control, for matrices too large
/// to diagonalise.
void taylor_evolve(const SparseOperator& H, const DenseVector& psi0, const std::vector<double>& times,
                   const StateCallback& f, double tol = 1e-12);

/// |psi(t)> on every grid point (memory ~ grid x dimension).
std::vector<DenseVector> evolve(const EvolutionJob& job);
/// Streaming form of evolve.
void evolve(const EvolutionJob& job, const StateCallback& f);

double participation_ratio(const StateVector& v);
double participation_ratio(const DenseVector& v, const std::vector<double>& weights = {});
double fidelity(const StateVector& v, const StateVector& ref);
double fidelity(const DenseVector& v, const DenseVector& ref);

struct RevivalTrace {
  std::vector<double> times;
  std::vector<double> pr_values;
  std::vector<double> fidelity_values;
};

RevivalTrace revival_trace(const EvolutionJob& job);

struct RevivalPeak {
  double time = 0.0;
  double fidelity = 0.0;
};

/// Largest fidelity on [l/2, 3l/2] for a cycle of length l, on a dt grid.
RevivalPeak first_revival(const DensePropagator& prop, const DenseVector& psi0, int orbit_length,
                          double dt = 0.01);

/// Smallest subset state outside the orbit (lexicographic bit order).
std::uint64_t generic_state(const BasisSubset& subset, const OrbitCycle& orbit);

struct LocalZTrace {
  int site = 0;
  std::vector<double> times;
  std::vector<double> values;  // <Z_i(t)>
  double energy = 0.0;
  double microcanonical = 0.0;  // mean <n|Z_i|n> over |E_n - E| <= window/2
  std::size_t window_states = 0;
};

/// Z = diag(1, -1) on site i (1-based) over subset coordinates.
LocalZTrace local_z_trace(const DensePropagator& prop, const BasisSubset& subset, const DenseVector& psi0,
                          int site, double window, const std::vector<double>& times);

}  // namespace scarforge
