#include "scarforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace scarforge {

std::vector<double> SpectrumAnalysis::flagged_energies(double tol) const {
  std::vector<double> out;
  for (std::size_t n = 0; n < size(); ++n) {
    if (!flagged[n]) continue;
    const double e = eigenvalues(static_cast<Eigen::Index>(n));
    if (out.empty() || e - out.back() > tol) out.push_back(e);
  }
  return out;
}

SpectrumAnalysis analyze_spectrum(const SparseOperator& H, const BasisSubset& subset,
                                  const SpectrumOptions& options) {
  if (static_cast<std::size_t>(H.rows()) != subset.size()) {
    throw ConfigError("Hamiltonian and subset dimensions differ");
  }
  if (subset.size() > kDenseLimit) {
    throw ConfigError("spectrum analysis is limited to dimension " + std::to_string(kDenseLimit));
  }
  SpectrumAnalysis a;
  auto es = eigh(DenseMatrix(H));
  a.eigenvalues = std::move(es.values);
  a.eigenvectors = std::move(es.vectors);
  const auto n = static_cast<std::size_t>(a.eigenvalues.size());
  a.ipr.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    a.ipr[k] = 1.0 / participation_ratio(DenseVector(a.eigenvectors.col(static_cast<Eigen::Index>(k))));
  }
  a.flagged.assign(n, false);
  for (auto ref : options.references) {
    const auto pos = static_cast<Eigen::Index>(subset.position(ref));
    std::vector<double> ov(n);
    for (std::size_t k = 0; k < n; ++k) {
      ov[k] = std::norm(a.eigenvectors(pos, static_cast<Eigen::Index>(k)));
      if (ov[k] > options.threshold) a.flagged[k] = true;
    }
    a.overlap.push_back(std::move(ov));
  }
  return a;
}

RStatReport r_statistic(std::vector<double> e) {
  std::sort(e.begin(), e.end());
  std::vector<double> levels;
  for (double x : e) {
    if (levels.empty() || x - levels.back() >= kDegeneracyMerge) levels.push_back(x);
  }
  if (levels.size() < 3) throw ConfigError("r statistic needs at least 3 distinct levels");
  RStatReport r;
  r.levels = levels.size();
  r.histogram.assign(kHistogramBins, 0.0);
  for (std::size_t i = 1; i + 1 < levels.size(); ++i) {
    const double a = levels[i] - levels[i - 1];
    const double b = levels[i + 1] - levels[i];
    const double v = std::min(a, b) / std::max(a, b);
    r.r_values.push_back(v);
    const int bin = std::min(kHistogramBins - 1, static_cast<int>(v * kHistogramBins));
    r.histogram[static_cast<std::size_t>(bin)] += 1.0;
  }
  const double count = double(r.r_values.size());
  for (auto& h : r.histogram) h *= kHistogramBins / count;
  r.mean = std::accumulate(r.r_values.begin(), r.r_values.end(), 0.0) / count;
  return r;
}

RStatReport r_statistic(const RealVector& eigenvalues) {
  return r_statistic(std::vector<double>(eigenvalues.data(), eigenvalues.data() + eigenvalues.size()));
}

double sample_poisson_mean_r(std::size_t levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(levels);
  for (auto& x : e) x = u(rng);
  return r_statistic(std::move(e)).mean;
}

double sample_goe_mean_r(int dim, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = g(rng);
    acc += r_statistic(eigvalsh_real((m + m.transpose()) / 2.0)).mean;
  }
  return acc / samples;
}

ScalingRow pr_extrema(const EvolutionJob& job, int length, std::size_t n_eff, double t_lo, double t_hi) {
  ScalingRow row;
  row.length = length;
  row.n_eff = n_eff;
  row.pr_max = 0.0;
  row.pr_min = 1.0;
  const auto times = job.grid.times();
  evolve(job, [&](std::size_t i, const DenseVector& psi) {
    if (times[i] <= t_lo || times[i] >= t_hi) return;
    const double pr = participation_ratio(psi, job.pr_weights);
    row.pr_max = std::max(row.pr_max, pr);
    row.pr_min = std::min(row.pr_min, pr);
  });
  return row;
}

}  // namespace scarforge
