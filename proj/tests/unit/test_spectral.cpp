#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "scarforge/spectral.hpp"

using namespace scarforge;

TEST_CASE("diagonal Hamiltonian has unit IPR and flags only the reference") {
  auto sub = std::make_shared<const BasisSubset>(BasisSubset::full(4));
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < 16; ++i) t.emplace_back(i, i, cplx(0.1 * i * i, 0.0));
  SparseOperator H(16, 16);
  H.setFromTriplets(t.begin(), t.end());
  SpectrumOptions opt;
  opt.references = {5};
  const auto a = analyze_spectrum(H, *sub, opt);
  REQUIRE(a.size() == 16);
  for (double v : a.ipr) CHECK(v == doctest::Approx(1.0));
  int flagged = 0;
  for (bool f : a.flagged) flagged += f;
  CHECK(flagged == 1);
  REQUIRE(a.flagged_energies().size() == 1);
  CHECK(a.flagged_energies()[0] == doctest::Approx(2.5));
}

TEST_CASE("overlaps with a reference state resolve the identity") {
  const FloquetCircuit c(fixtures::pxp(), 10, Geometry::Stride2);
  auto sub = std::make_shared<const BasisSubset>(krylov_subspace(c, BasisState::neel(10)));
  const auto h = build_hamiltonian(c, sub);
  SpectrumOptions opt;
  opt.references = {BasisState::neel(10).index(), BasisState::anti_neel(10).index()};
  const auto a = analyze_spectrum(h.H, *sub, opt);
  for (const auto& ov : a.overlap) {
    double s = 0.0;
    for (double x : ov) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  double mean_ipr = 0.0;
  for (double v : a.ipr) {
    CHECK(v >= 1.0 - 1e-12);
    CHECK(v <= double(a.size()) + 1e-9);
    mean_ipr += v / double(a.size());
  }
  CHECK(mean_ipr > 5.0);
}

TEST_CASE("QMBS-C full space: flagged energies form a ladder of spacing pi") {
  const FloquetCircuit c(fixtures::qmbs_c(), 8, Geometry::Stride4);
  auto sub = std::make_shared<const BasisSubset>(BasisSubset::full(8));
  const auto h = build_hamiltonian(c, sub);
  SpectrumOptions opt;
  opt.references = {BasisState::neel(8).index(), BasisState::anti_neel(8).index()};
  const auto e = analyze_spectrum(h.H, *sub, opt).flagged_energies(1e-8);
  REQUIRE(e.size() >= 2);
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] - e[i - 1] == doctest::Approx(std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("r statistic on constructed spectra") {
  const auto eq = r_statistic(std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
  CHECK(eq.mean == doctest::Approx(1.0));
  CHECK(eq.r_values.size() == 3);

  // Degenerate copies are merged before gaps are taken.
  const auto merged = r_statistic(std::vector<double>{0.0, 1.0, 1.0, 3.0, 3.0 + 1e-14});
  CHECK(merged.levels == 3);
  CHECK(merged.mean == doctest::Approx(0.5));

  std::vector<double> e{0.0, 0.3, 1.1, 1.2, 2.9, 3.0, 4.4};
  std::vector<double> f;
  for (double x : e) f.push_back(-7.0 * x + 11.0);
  CHECK(r_statistic(f).mean == doctest::Approx(r_statistic(e).mean));

  const auto rep = r_statistic(e);
  double integral = 0.0;
  for (double h : rep.histogram) integral += h / kHistogramBins;
  CHECK(integral == doctest::Approx(1.0));
  for (double r : rep.r_values) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
  CHECK_THROWS_AS(r_statistic(std::vector<double>{1.0, 2.0, 2.0}), ConfigError);
}

TEST_CASE("calibration ensembles reproduce the Poisson and GOE means") {
  CHECK(sample_poisson_mean_r(20000, 7) == doctest::Approx(2 * std::log(2.0) - 1).epsilon(0.03));
  CHECK(sample_goe_mean_r(200, 20, 7) == doctest::Approx(0.5307).epsilon(0.02));
  CHECK(sample_poisson_mean_r(500, 3) == sample_poisson_mean_r(500, 3));
}

TEST_CASE("PR extrema over a time window") {
  const FloquetCircuit c(fixtures::pxp(), 12, Geometry::Stride2);
  auto sub = std::make_shared<const BasisSubset>(krylov_subspace(c, BasisState::neel(12)));
  const auto h = build_hamiltonian(c, sub);
  const auto job = subset_job(h.H, *sub, BasisState::neel(12).index(), TimeGrid{0.05, 60.0});
  const auto row = pr_extrema(job, 12, sub->size(), 10.0, 60.0);
  CHECK(row.length == 12);
  CHECK(row.pr_min > 1.0 / double(sub->size()) - 1e-12);
  CHECK(row.pr_min < row.pr_max);
  CHECK(row.pr_max < 1.0);
}
