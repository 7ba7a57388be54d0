#include "doctest.h"

#include <set>

#include "fixtures.hpp"
#include "scarforge/automaton.hpp"

using namespace scarforge;

namespace {

// U_F from Kronecker-embedded gates: product of A-layer gates times B-layer gates.
DenseMatrix floquet_oracle(const FloquetCircuit& c) {
  const auto dim = Eigen::Index{1} << c.length();
  const DenseMatrix g = gate_matrix(c.gate());
  DenseMatrix a = DenseMatrix::Identity(dim, dim), b = a;
  for (int s : c.sites(Layer::A)) a = fixtures::embed(g, c.length(), s) * a;
  for (int s : c.sites(Layer::B)) b = fixtures::embed(g, c.length(), s) * b;
  return a * b;
}

}  // namespace

TEST_CASE("layer layouts") {
  const FloquetCircuit c4(fixtures::qmbs_a(), 12, Geometry::Stride4);
  CHECK(c4.sites(Layer::A) == std::vector<int>{1, 5, 9});
  CHECK(c4.sites(Layer::B) == std::vector<int>{3, 7, 11});
  const FloquetCircuit c2(fixtures::pxp(), 8, Geometry::Stride2);
  CHECK(c2.sites(Layer::A) == std::vector<int>{1, 3, 5, 7});
  CHECK(c2.sites(Layer::B) == std::vector<int>{2, 4, 6, 8});
  const FloquetCircuit c10(fixtures::qmbs_a(), 10, Geometry::Stride4);
  CHECK_FALSE(c10.has_brickwork());
  CHECK(c10.sites(Layer::A) == std::vector<int>{1, 5, 9});
  CHECK(c10.sites(Layer::B) == std::vector<int>{3, 7});
  CHECK_THROWS_AS(apply_floquet(c10, BasisState::neel(10)), ConfigError);
  CHECK_THROWS_AS(orbit_of(c10, BasisState::neel(10)), ConfigError);
  // QMBS-A gates overlapping by two sites do not commute.
  CHECK_THROWS_AS(FloquetCircuit(fixtures::qmbs_a(), 12, Geometry::Stride2), ConfigError);
}

TEST_CASE("QMBS-A maps Neel to anti-Neel") {
  const FloquetCircuit c(fixtures::qmbs_a(), 12, Geometry::Stride4);
  const auto out = apply_floquet(c, BasisState::neel(12));
  CHECK(out.state == BasisState::anti_neel(12));
  CHECK(std::abs(out.phase - 1.0) < 1e-15);
  const auto o = orbit_of(c, BasisState::neel(12));
  CHECK(o.length() == 2);
  CHECK(o.phi == doctest::Approx(0.0));
}

TEST_CASE("PXP protected cycle has three states") {
  const FloquetCircuit c(fixtures::pxp(), 12, Geometry::Stride2);
  auto s = BasisState::polarized(12);
  s = apply_floquet(c, s).state;
  CHECK(s == BasisState::anti_neel(12));
  s = apply_floquet(c, s).state;
  CHECK(s == BasisState::neel(12));
  s = apply_floquet(c, s).state;
  CHECK(s == BasisState::polarized(12));
  const auto o = orbit_of(c, BasisState::polarized(12));
  CHECK(o.length() == 3);
  CHECK(std::abs(o.phi) < 1e-12);
}

TEST_CASE("identity circuit fixes every state") {
  const FloquetCircuit c(PermutationGate::identity(4), 8, Geometry::Stride4);
  for (std::uint64_t i = 0; i < 256; i += 17) {
    const auto o = orbit_of(c, BasisState(i, 8));
    CHECK(o.length() == 1);
    CHECK(o.phi == 0.0);
  }
}

TEST_CASE("orbit length guard") {
  const FloquetCircuit c(fixtures::pxp(), 8, Geometry::Stride2);
  CHECK_THROWS_AS(orbit_of(c, BasisState::polarized(8), 2), NumericalGuardError);
}

TEST_CASE("Floquet eigenstates satisfy U_F psi = e^{i beta} psi") {
  const FloquetCircuit c(fixtures::pxp(), 8, Geometry::Stride2);
  const auto u = floquet_oracle(c);
  for (const auto& seed : {BasisState::polarized(8), BasisState::from_bits("10000000")}) {
    const auto o = orbit_of(c, seed);
    const auto eig = floquet_eigenstates(o);
    REQUIRE(eig.size() == static_cast<std::size_t>(o.length()));
    for (std::size_t m = 0; m < eig.size(); ++m) {
      DenseVector v = DenseVector::Zero(256);
      for (std::size_t p = 0; p < eig[m].vector.amplitudes.size(); ++p) {
        v(static_cast<Eigen::Index>(eig[m].vector.subset->state(p))) = eig[m].vector.amplitudes[p];
      }
      CHECK(std::abs(v.norm() - 1.0) < 1e-12);
      CHECK((u * v - std::polar(1.0, eig[m].beta) * v).norm() < 1e-10);
      if (m > 0) CHECK(eig[m].beta - eig[m - 1].beta == doctest::Approx(2 * kPi / o.length()));
    }
  }
  // l = 2, Phi = 0
  const FloquetCircuit ca(fixtures::qmbs_a(), 8, Geometry::Stride4);
  const auto e2 = floquet_eigenstates(orbit_of(ca, BasisState::neel(8)));
  CHECK(e2[0].beta == doctest::Approx(0.0));
  CHECK(e2[1].beta == doctest::Approx(kPi));
  CHECK(std::abs(e2[1].vector.amplitudes[0] + e2[1].vector.amplitudes[1]) < 1e-12);
}

TEST_CASE("fixed point with a phase") {
  auto ph = fixtures::ones();
  ph[0] = cplx(0, 1);  // |0000> picks up i
  const FloquetCircuit c(parse_gate("()", ph), 4, Geometry::Stride4);
  const auto o = orbit_of(c, BasisState(0, 4));
  CHECK(o.length() == 1);
  CHECK(o.phi == doctest::Approx(kPi));  // i * i = -1
  const auto e = floquet_eigenstates(o);
  CHECK(e.size() == 1);
  CHECK(e[0].beta == doctest::Approx(kPi));
}

TEST_CASE("exhaustive cycle decomposition at L = 8") {
  for (const auto& [gate, geo] : {std::pair{fixtures::qmbs_a(), Geometry::Stride4},
                                  std::pair{fixtures::qmbs_b(), Geometry::Stride4},
                                  std::pair{fixtures::pxp(), Geometry::Stride2}}) {
    const FloquetCircuit c(gate, 8, geo);
    const auto u = floquet_oracle(c);
    CHECK((floquet_matrix(c) - u).cwiseAbs().maxCoeff() < 1e-12);
    for (std::uint64_t i = 0; i < 256; ++i) {
      const auto out = apply_floquet(c, BasisState(i, 8));
      REQUIRE(std::abs(u(static_cast<Eigen::Index>(out.state.index()), static_cast<Eigen::Index>(i)) -
                       out.phase) < 1e-12);
    }
    std::set<std::uint64_t> seen;
    DenseMatrix basis(256, 256);
    Eigen::Index col = 0;
    for (std::uint64_t i = 0; i < 256; ++i) {
      if (seen.count(i)) continue;
      const auto o = orbit_of(c, BasisState(i, 8));
      for (const auto& s : o.states) REQUIRE(seen.insert(s.index()).second);
      for (const auto& e : floquet_eigenstates(o)) {
        basis.col(col).setZero();
        for (std::size_t p = 0; p < e.vector.amplitudes.size(); ++p) {
          basis(static_cast<Eigen::Index>(e.vector.subset->state(p)), col) = e.vector.amplitudes[p];
        }
        ++col;
      }
    }
    CHECK(seen.size() == 256);
    REQUIRE(col == 256);
    CHECK((basis.adjoint() * basis - DenseMatrix::Identity(256, 256)).cwiseAbs().maxCoeff() < 1e-9);
  }
}
