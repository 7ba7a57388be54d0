#pragma once

#include <cstdint>
#include <vector>

#include "scarforge/dynamics.hpp"
#include "scarforge/linalg.hpp"

namespace scarforge {

inline constexpr double kDegeneracyMerge = 1e-12;
inline constexpr int kHistogramBins = 50;

struct SpectrumOptions {
  double threshold = 0.02;  // flag when |<ref|psi>|^2 exceeds this
  std::vector<std::uint64_t> references;  // basis states for the overlaps (e.g. both Neel states)
};

struct SpectrumAnalysis {
  RealVector eigenvalues;  // ascending
  DenseMatrix eigenvectors;
  std::vector<double> ipr;  // 1 / PR
  std::vector<std::vector<double>> overlap;  // overlap[ref][state] = |<ref|psi>|^2
  std::vector<bool> flagged;

  std::size_t size() const noexcept { return ipr.size(); }
  /// Distinct energies of flagged states (degeneracies merged at `tol`).
  std::vector<double> flagged_energies(double tol = 1e-9) const;
};

SpectrumAnalysis analyze_spectrum(const SparseOperator& H, const BasisSubset& subset,
                                  const SpectrumOptions& options);

struct RStatReport {
  std::vector<double> r_values;
  std::vector<double> histogram;  // density over kHistogramBins bins on [0, 1]
  double mean = 0.0;
  std::size_t levels = 0;         // after merging degeneracies
};

/// r_n = min(dE_{n+1}/dE_n, dE_n/dE_{n+1}) over sorted, degeneracy-merged levels.
RStatReport r_statistic(std::vector<double> eigenvalues);
RStatReport r_statistic(const RealVector& eigenvalues);

/// Calibration ensembles (seeded, reproducible).
double sample_poisson_mean_r(std::size_t levels, std::uint64_t seed);
double sample_goe_mean_r(int dim, int samples, std::uint64_t seed);

struct ScalingRow {
  int length = 0;
  std::size_t n_eff = 0;
  double pr_max = 0.0;
  double pr_min = 0.0;
};

/// Extrema of the PR trace of `job` over t in (t_lo, t_hi).
ScalingRow pr_extrema(const EvolutionJob& job, int length, std::size_t n_eff, double t_lo = 10.0,
                      double t_hi = 300.0);

}  // namespace scarforge
