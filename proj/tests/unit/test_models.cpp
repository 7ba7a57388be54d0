#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "scarforge/logmap.hpp"
#include "scarforge/models.hpp"

using namespace scarforge;

TEST_CASE("registry lists the five models and rejects unknown names") {
  CHECK(model_names() == std::vector<std::string>{"pxp", "pxp-nophase", "qmbs-a", "qmbs-b", "qmbs-c"});
  CHECK_THROWS_AS(load_model("qmbs-d"), UnknownModelError);
  CHECK_THROWS_AS(resolve_model("nonexistent"), UnknownModelError);
  CHECK_THROWS_AS(resolve_model("/nonexistent/model.json"), UnknownModelError);
}

TEST_CASE("stored gates reproduce the tabulated permutations and phases") {
  const auto c = load_model("qmbs-c");
  CHECK(c.gate.cycle_notation() == "((3,5),(4,6),(7,15,9),(8,16,10),(11,13),(12,14))");
  CHECK(gate_order(c.gate).n == 6);
  CHECK(load_model("qmbs-a").gate.cycle_notation() == "((3,13,11,7,9,5),(4,14,12,8,10,6))");
  CHECK(load_model("qmbs-b").gate.cycle_notation() == "((1,15),(2,16),(3,9,5),(4,10,6),(7,13,11),(8,14,12))");

  const auto p = load_model("pxp");
  CHECK(p.gate.cycle_notation() == "((11,15),(12,16))");
  CHECK(p.geometry == Geometry::Stride2);
  for (int label = 1; label <= 16; ++label) {
    const bool imaginary = label == 11 || label == 12 || label == 15 || label == 16;
    CHECK(p.gate.phase(static_cast<std::uint32_t>(label - 1)) == (imaginary ? cplx(0, 1) : cplx(1, 0)));
  }
  CHECK(p.orbit(12).length() == 3);
  CHECK(p.expected.orbit_length == 3);

  const auto np = load_model("pxp-nophase");
  CHECK(np.gate.permutation() == p.gate.permutation());
  CHECK(np.gate.has_trivial_phases());

  // Identical to the hand-written fixtures, and stable through the JSON form.
  CHECK(gate_to_json(c.gate) == gate_to_json(fixtures::qmbs_c()));
  CHECK(gate_to_json(p.gate) == gate_to_json(fixtures::pxp()));
  for (const auto& name : model_names()) {
    const auto m = load_model(name);
    const auto back = model_from_json(model_to_json(m));
    CHECK(model_to_json(back) == model_to_json(m));
  }
}

TEST_CASE("registry rule ratios match through the rules module") {
  for (const auto& name : {"qmbs-a", "qmbs-b", "qmbs-c", "pxp"}) {
    CAPTURE(name);
    const auto m = load_model(name);
    REQUIRE(m.expected.rule_kind.has_value());
    const int L = m.geometry == Geometry::Stride4 ? 8 : 12;
    const auto r = evaluate_rules(m.circuit(L), m.orbit(L), *m.expected.rule_kind);
    CHECK(r.satisfied == m.expected.rule_satisfied);
    CHECK(r.total == m.expected.rule_total);
  }
}

TEST_CASE("registry decomposition coefficients match the closed forms") {
  const double r3 = std::sqrt(3.0);
  const std::vector<cplx> n6{-kPi / 6, {kPi / 6, kPi / (2 * r3)}, {-kPi / 6, -kPi / (6 * r3)},
                             kPi / 6,  {-kPi / 6, kPi / (6 * r3)}, {kPi / 6, -kPi / (2 * r3)}};
  const std::vector<cplx> n4{-kPi / 4, {kPi / 4, kPi / 4}, -kPi / 4, {kPi / 4, -kPi / 4}};
  for (const auto& name : {"qmbs-a", "qmbs-b", "qmbs-c", "pxp"}) {
    CAPTURE(name);
    const auto m = load_model(name);
    const auto d = power_decomposition(m.gate);
    const auto& want = m.expected.order == 4 ? n4 : n6;
    REQUIRE(d.coefficients.size() == want.size());
    REQUIRE(m.expected.coefficients.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(std::abs(d.coefficients[k] - want[k]) < 1e-12);
      CHECK(std::abs(m.expected.coefficients[k] - want[k]) < 1e-12);
    }
    CHECK(d.reconstruction_error < 1e-9);
  }
}

TEST_CASE("spin-operator expressions reproduce i log U0") {
  for (const auto& name : {"pxp", "qmbs-a", "qmbs-b", "qmbs-c"}) {
    CAPTURE(name);
    CHECK(verify_spin_representation(load_model(name)) < 1e-12);
  }
  ModelDefinition id;
  id.gate = PermutationGate::identity(4);
  id.spin_representation = "identity";
  CHECK(verify_spin_representation(id) == 0.0);
  CHECK_THROWS_AS(verify_spin_representation(load_model("pxp-nophase")), ConfigError);
}

TEST_CASE("effective-dimension formulas agree with the Krylov sets") {
  CHECK(neff_formula("fibonacci", 16) == 2207);
  CHECK(neff_formula("magnetization-mod3", 12) == 1366);
  CHECK(neff_formula("power2-half", 12) == 64);
  CHECK(neff_formula("power2", 12) == 4096);
  for (const auto& name : {"pxp", "qmbs-b", "qmbs-c"}) {
    const auto m = load_model(name);
    for (int L : {8, 12}) {
      CAPTURE(name);
      CAPTURE(L);
      CHECK(working_subset(m, L)->size() == neff_formula(m.neff, L));
    }
  }
  CHECK(working_subset(load_model("qmbs-a"), 8)->size() == 256);
  CHECK_THROWS_AS(neff_formula("power2", 7), ConfigError);
  CHECK_THROWS_AS(neff_formula("nothing", 8), ConfigError);
}

TEST_CASE("QMBS-C ladder operator obeys [H, Q+] = pi Q+ on W") {
  for (int L : {8, 12}) {
    const auto r = sga_check(L);
    CHECK(r.w_dimension == (std::size_t{1} << (L / 2)));
    CHECK(r.residual < 1e-10);
  }
  CHECK(sga_check(8, 3.0).residual > 0.1);
  CHECK(sga_check(8, -kPi).residual > 0.1);
}

TEST_CASE("QMBS-C restricted to W equals the two-site XX chain") {
  const int L = 8;
  const auto m = load_model("qmbs-c");
  auto full = std::make_shared<const BasisSubset>(BasisSubset::full(L));
  const auto h = build_hamiltonian(m.circuit(L), full);
  const DenseMatrix xx = fixtures::kron(DenseMatrix{{0, 1}, {1, 0}}, DenseMatrix{{0, 1}, {1, 0}});
  const DenseMatrix local = kPi / 2 * (xx - DenseMatrix::Identity(4, 4));
  const SparseOperator heff = local_sum(local, {2, 4, 6, 8}, *full);
  const auto w = working_subset(m, L);
  REQUIRE(w->size() == 16);
  const DenseMatrix hd = to_dense(h.H), ed = to_dense(heff);
  double dev = 0.0;
  for (auto a : w->states())
    for (auto b : w->states())
      dev = std::max(dev, std::abs(hd(Eigen::Index(a), Eigen::Index(b)) - ed(Eigen::Index(a), Eigen::Index(b))));
  CHECK(dev < 1e-12);
}

TEST_CASE("named states") {
  CHECK(named_state("neel", 4).bits() == "1010");
  CHECK(named_state("anti-neel", 4).bits() == "0101");
  CHECK(named_state("polarized", 4).bits() == "1111");
  CHECK(named_state("0110", 4).bits() == "0110");
  CHECK_THROWS_AS(named_state("011", 4), ConfigError);
}

TEST_CASE("scaling scan: exact revivals for QMBS-C") {
  const auto rows = scaling_scan(load_model("qmbs-c"), {8, 12}, TimeGrid{0.05, 40.0}, 1.0, 40.0);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.pr_max > 1 - 1e-8);
    CHECK(r.n_eff == (std::size_t{1} << (r.length / 2)));
  }
}
