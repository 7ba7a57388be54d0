#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "scarforge/hamiltonian.hpp"

using namespace scarforge;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::size_t fib(int n) {
  std::size_t a = 0, b = 1;
  for (int i = 0; i < n; ++i) {
    const auto t = a + b;
    a = b;
    b = t;
  }
  return a;
}

std::size_t qmbs_b_formula(int L) {
  double acc = 0.0;
  for (int k = -L / 3; k <= L / 3; ++k) acc += binom(L, L / 2 + 3 * k);
  return static_cast<std::size_t>(acc + 0.5);
}

std::shared_ptr<const BasisSubset> shared(BasisSubset s) {
  return std::make_shared<const BasisSubset>(std::move(s));
}

// exp(-i M) for Hermitian M.
DenseMatrix expm_herm(const DenseMatrix& m) { return unitary_from_hamiltonian(m); }

}  // namespace

TEST_CASE("Krylov dimensions follow the closed formulas") {
  for (int L : {8, 10, 12, 16}) {
    const FloquetCircuit c(fixtures::pxp(), L, Geometry::Stride2);
    CHECK(krylov_subspace(c, BasisState::neel(L)).size() == fib(L + 1) + fib(L - 1));
  }
  CHECK(fib(17) + fib(15) == 2207);
  for (int L : {8, 10, 12}) {
    // |0...0> and |1...1> see only trivial fixed points of U0 in every
    // window, so H annihilates them and they are unreachable.
    const FloquetCircuit a(fixtures::qmbs_a(), L, Geometry::Stride4);
    const auto ka = krylov_subspace(a, BasisState::neel(L));
    CHECK(ka.size() == (std::size_t{1} << L) - 2);
    CHECK_FALSE(ka.contains(0));
    CHECK_FALSE(ka.contains(bits::mask(L)));
    const FloquetCircuit b(fixtures::qmbs_b(), L, Geometry::Stride4);
    CHECK(krylov_subspace(b, BasisState::neel(L)).size() == qmbs_b_formula(L));
    const FloquetCircuit cc(fixtures::qmbs_c(), L, Geometry::Stride4);
    CHECK(krylov_subspace(cc, BasisState::neel(L)).size() == (std::size_t{1} << (L / 2)));
  }
  CHECK(qmbs_b_formula(12) == 1366);
}

TEST_CASE("identity gate gives a zero Hamiltonian") {
  const FloquetCircuit c(PermutationGate::identity(4), 8, Geometry::Stride4);
  const auto h = build_hamiltonian(c, shared(BasisSubset::full(8)));
  CHECK(h.H.nonZeros() == 0);
}

TEST_CASE("layer Hamiltonians exponentiate to the layer unitaries at L = 8") {
  for (const auto& [gate, geo] : {std::pair{fixtures::qmbs_a(), Geometry::Stride4},
                                  std::pair{fixtures::pxp(), Geometry::Stride2}}) {
    const FloquetCircuit c(gate, 8, geo);
    const auto h = build_hamiltonian(c, shared(BasisSubset::full(8)));
    CHECK(hermiticity_defect(h.A) < 1e-10);
    CHECK(hermiticity_defect(h.B) < 1e-10);
    const DenseMatrix ea = expm_herm(to_dense(h.A));
    const DenseMatrix eb = expm_herm(to_dense(h.B));
    CHECK((ea - layer_matrix(c, Layer::A)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((eb - layer_matrix(c, Layer::B)).cwiseAbs().maxCoeff() < 1e-9);
    const DenseMatrix uf = ea * eb;
    for (std::uint64_t i = 0; i < 256; ++i) {
      const auto out = apply_floquet(c, BasisState(i, 8));
      REQUIRE(std::abs(uf(static_cast<Eigen::Index>(out.state.index()), static_cast<Eigen::Index>(i)) -
                       out.phase) < 1e-9);
    }
  }
}

TEST_CASE("non-closed subsets are reported") {
  const FloquetCircuit c(fixtures::qmbs_a(), 8, Geometry::Stride4);
  CHECK_THROWS_AS(build_hamiltonian(c, shared(BasisSubset(8, {BasisState::neel(8).index()}))),
                  NumericalGuardError);
}

TEST_CASE("QMBS-C block on W is the decoupled-pair Hamiltonian") {
  const int L = 12;
  const FloquetCircuit c(fixtures::qmbs_c(), L, Geometry::Stride4);
  const auto full = build_hamiltonian(c, shared(BasisSubset::full(L)));
  const auto w = krylov_subspace(c, BasisState::neel(L));
  REQUIRE(w.size() == 64);
  // Expected: sum over pairs (2j, 2j+1) of (pi/2) X X - pi/2.
  DenseMatrix xx(4, 4);
  xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  const DenseMatrix local = (kPi / 2) * (xx - DenseMatrix::Identity(4, 4));
  std::vector<int> pairs;
  for (int j = 2; j <= L; j += 2) pairs.push_back(j);
  const DenseMatrix expected = to_dense(local_sum(local, pairs, w));
  double worst = 0.0, leak = 0.0;
  const auto& H = full.H;
  for (std::size_t b = 0; b < w.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(w.state(b));
    for (SparseOperator::InnerIterator it(H, col); it; ++it) {
      const auto a = w.find(static_cast<std::uint64_t>(it.row()));
      if (a == BasisSubset::npos) {
        leak = std::max(leak, std::abs(it.value()));
      } else {
        worst = std::max(worst, std::abs(it.value() - expected(static_cast<Eigen::Index>(a),
                                                               static_cast<Eigen::Index>(b))));
      }
    }
  }
  CHECK(leak < 1e-12);
  CHECK(worst < 1e-12);
  CHECK(expected.cwiseAbs().maxCoeff() > 1.0);
}

TEST_CASE("[A, B] annihilates the orbit when every type-I rule holds") {
  for (int L : {8, 12}) {
    const FloquetCircuit c(fixtures::qmbs_c(), L, Geometry::Stride4);
    auto sub = shared(krylov_subspace(c, BasisState::neel(L)));
    const auto h = build_hamiltonian(c, sub);
    const SparseOperator comm = h.A * h.B - h.B * h.A;
    const auto orbit = orbit_of(c, BasisState::neel(L));
    double acc = 0.0;
    for (auto pos : orbit_positions(*sub, orbit)) acc += comm.col(static_cast<Eigen::Index>(pos)).squaredNorm();
    CHECK(std::sqrt(acc) < 1e-9);
  }
  // QMBS-A violates rules, so the commutator leaks.
  const FloquetCircuit a(fixtures::qmbs_a(), 8, Geometry::Stride4);
  auto sub = shared(BasisSubset::full(8));
  const auto h = build_hamiltonian(a, sub);
  const SparseOperator comm = h.A * h.B - h.B * h.A;
  CHECK(comm.col(static_cast<Eigen::Index>(BasisState::neel(8).index())).norm() > 1e-3);
}

TEST_CASE("spin-mirror operator is an involution mapping Neel to anti-Neel") {
  for (int L : {8, 10, 12}) {
    CHECK(spin_mirror(BasisState::neel(L).index(), L) == BasisState::anti_neel(L).index());
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << L); i += 7) CHECK(spin_mirror(spin_mirror(i, L), L) == i);
  }
}

TEST_CASE("sector parsing") {
  const auto s = SymmetrySector::parse("s2+1,usm+1", 16);
  CHECK(s.shift == 2);
  CHECK(s.spin_mirror);
  const auto k = SymmetrySector::parse("s2k1", 16);
  CHECK(std::abs(k.translation_eigenvalue - std::polar(1.0, 2 * kPi / 8)) < 1e-12);
  CHECK_THROWS_AS(SymmetrySector::parse("s2k1,usm+1", 16), ConfigError);
  CHECK_THROWS_AS(SymmetrySector::parse("s3+1", 16), ConfigError);
  CHECK_THROWS_AS(SymmetrySector::parse("foo", 16), ConfigError);
}

TEST_CASE("sectors block-diagonalise H and keep the full spectrum") {
  const int L = 8;
  const FloquetCircuit c(fixtures::qmbs_b(), L, Geometry::Stride4);
  auto sub = shared(krylov_subspace(c, BasisState::neel(L)));
  const auto h = build_hamiltonian(c, sub);
  const DenseMatrix hd = to_dense(h.H);
  auto all = eigvalsh(hd);
  std::vector<double> collected;
  std::size_t dims = 0;
  for (int k = 0; k < L / 2; ++k) {
    const auto sec = build_sector(sub, SymmetrySector::momentum(2, k, L));
    dims += sec.size();
    const auto block = project_sector(h, sec);
    CHECK(hermiticity_defect(block) < 1e-10);
    const auto ev = eigvalsh(to_dense(block));
    collected.insert(collected.end(), ev.data(), ev.data() + ev.size());
  }
  CHECK(dims == sub->size());
  std::sort(collected.begin(), collected.end());
  REQUIRE(collected.size() == static_cast<std::size_t>(all.size()));
  for (std::size_t i = 0; i < collected.size(); ++i) CHECK(collected[i] == doctest::Approx(all(static_cast<Eigen::Index>(i))).epsilon(1e-9));

  // The +1 sector of (S^2, U_SM) holds the symmetric Neel combination.
  const auto sec = build_sector(sub, SymmetrySector::parse("s2+1,usm+1", L));
  DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(sub->size()));
  v(static_cast<Eigen::Index>(sub->position(BasisState::neel(L).index()))) = 1.0 / std::sqrt(2.0);
  v(static_cast<Eigen::Index>(sub->position(BasisState::anti_neel(L).index()))) = 1.0 / std::sqrt(2.0);
  CHECK((sec.lift(sec.project(v)) - v).norm() < 1e-12);
  CHECK(symmetry_defect(h.H, *sub, sec.sector) < 1e-9);
  // ... while the stride-4 layers separately break S^2.
  CHECK(symmetry_defect(h.A, *sub, sec.sector) > 1e-3);
  CHECK(symmetry_defect(h.A, *sub, SymmetrySector::momentum(4, 0, L)) < 1e-9);
}

TEST_CASE("projection commutes with H: lifted sector eigenvectors are eigenvectors of H") {
  const int L = 8;
  const FloquetCircuit c(fixtures::qmbs_a(), L, Geometry::Stride4);
  auto sub = shared(BasisSubset::full(L));
  const auto h = build_hamiltonian(c, sub);
  const auto sec = build_sector(sub, SymmetrySector::parse("s2-1,usm-1", L));
  const auto es = eigh(to_dense(project_sector(h, sec)));
  for (Eigen::Index i = 0; i < es.values.size(); i += 5) {
    const DenseVector v = sec.lift(es.vectors.col(i));
    CHECK((h.H * v - es.values(i) * v).norm() < 1e-9);
  }
}

TEST_CASE("operator dump") {
  const FloquetCircuit c(fixtures::pxp(), 8, Geometry::Stride2);
  auto sub = shared(krylov_subspace(c, BasisState::neel(8)));
  const auto h = build_hamiltonian(c, sub);
  const auto j = operator_to_json(h.H, *sub, "pxp");
  CHECK(j["header"]["L"] == 8);
  CHECK(j["entries"].size() == static_cast<std::size_t>(h.H.nonZeros()));
}
