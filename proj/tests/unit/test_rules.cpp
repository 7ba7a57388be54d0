#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "scarforge/rules.hpp"

using namespace scarforge;

namespace {

RuleReport neel_report(const PermutationGate& g, int L, RuleKind kind) {
  const FloquetCircuit c(g, L, Geometry::Stride4);
  return evaluate_rules(c, orbit_of(c, BasisState::neel(L)), kind);
}

PermutationGate inverse(const PermutationGate& g) {
  std::vector<std::uint32_t> inv(g.dimension());
  std::vector<cplx> ph(g.dimension());
  for (std::uint32_t q = 0; q < g.dimension(); ++q) {
    inv[g.image(q)] = q;
    ph[g.image(q)] = std::conj(g.phase(q));
  }
  return {g.width(), inv, ph};
}

}  // namespace

TEST_CASE("relevant rule totals") {
  CHECK(count_relevant_rules(2, 6, true, 12) == 350);
  CHECK(count_relevant_rules(3, 3, true, 12) == 48);
  CHECK(count_relevant_rules(2, 6, false, 12) == 350 * 6);
  CHECK(count_relevant_rules(2, 1, true, 12) == 0);
}

TEST_CASE("type-I rule ratios over the Neel orbit") {
  const auto a = neel_report(fixtures::qmbs_a(), 8, RuleKind::I);
  CHECK(a.total == 350);
  CHECK(a.satisfied == 70);
  CHECK(neel_report(fixtures::qmbs_b(), 8, RuleKind::I).satisfied == 246);
  const auto c = neel_report(fixtures::qmbs_c(), 8, RuleKind::I);
  CHECK(c.satisfied == 350);
  CHECK(c.total == 350);
}

TEST_CASE("rule totals do not depend on L") {
  for (int L : {8, 12, 16}) {
    const auto r = neel_report(fixtures::qmbs_a(), L, RuleKind::I);
    CHECK(r.total == 350);
    CHECK(r.satisfied == 70);
  }
}

TEST_CASE("PXP type-II rules") {
  const FloquetCircuit c(fixtures::pxp(), 12, Geometry::Stride2);
  const auto orbit = orbit_of(c, BasisState::polarized(12));
  const auto r = evaluate_rules(c, orbit, RuleKind::II);
  CHECK(r.power_bound == 3);
  CHECK(r.total == 48);
  CHECK(r.satisfied == 38);
  for (const auto& o : r.outcomes) {
    if (!o.satisfied) CHECK(o.residual > 1e-3);
  }
}

TEST_CASE("trivial rule cases") {
  const FloquetCircuit c(fixtures::qmbs_a(), 8, Geometry::Stride4);
  const auto s = BasisState::from_bits("10110100");
  for (int s1 = 0; s1 < 6; ++s1)
    for (int s3 = 0; s3 < 6; ++s3) {
      CHECK(check_type1(c, s, {RuleKind::I, 3, s1, 0, s3, 0}));
    }
  const auto h = principal_log(fixtures::qmbs_a());
  CHECK(check_type2(c, h, s, {RuleKind::II, 1, 2, 0, 1, 0}) == doctest::Approx(0.0));

  const FloquetCircuit id(PermutationGate::identity(4), 8, Geometry::Stride4);
  const auto r = evaluate_rules(id, orbit_of(id, BasisState::neel(8)), RuleKind::II);
  CHECK(r.total == 0);  // h0 = 0 closes at m = 1: no nontrivial powers
  CHECK(check_type2(id, principal_log(PermutationGate::identity(4)), s,
                    {RuleKind::II, 1, 1, 1, 1, 0}) == doctest::Approx(0.0));
}

TEST_CASE("type-I rules are unchanged by inverting gate and powers") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> perm{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto g = lift_permutation(perm);
    const int n = gate_order(g).n;
    const FloquetCircuit c(g, 8, Geometry::Stride4), ci(inverse(g), 8, Geometry::Stride4);
    const BasisState s(rng() % 256, 8);
    for (int s1 = 0; s1 < n; ++s1)
      for (int s2 = 0; s2 < n; ++s2)
        for (int s3 = 0; s3 < n; ++s3) {
          const RuleInstance r{RuleKind::I, 1 + 2 * static_cast<int>(rng() % 4), s1, s2, s3, 0};
          const RuleInstance ri{RuleKind::I, r.site, (n - s1) % n, (n - s2) % n, (n - s3) % n, 0};
          REQUIRE(check_type1(c, s, r) == check_type1(ci, s, ri));
        }
  }
}

TEST_CASE("rule sites collapse translated copies") {
  const FloquetCircuit c(fixtures::qmbs_c(), 12, Geometry::Stride4);
  CHECK(rule_sites(c, orbit_of(c, BasisState::neel(12))).size() == 2);
  const FloquetCircuit p(fixtures::pxp(), 12, Geometry::Stride2);
  CHECK(rule_sites(p, orbit_of(p, BasisState::polarized(12))).size() == 3);
}

TEST_CASE("search with order filter 1 keeps only the identity") {
  SearchConstraints cons;
  cons.order = 1;
  cons.neel_orbit = false;
  SearchStats stats;
  const auto hits = search_models(cons, &stats);
  CHECK(stats.enumerated == 40320);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].permutation == std::vector<std::uint8_t>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("search is independent of the thread count") {
  SearchConstraints cons;
  const auto one = search_models(cons);
  cons.threads = 3;
  const auto three = search_models(cons);
  REQUIRE(one.size() == three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].permutation == three[i].permutation);
    CHECK(one[i].satisfied == three[i].satisfied);
  }
  REQUIRE(!one.empty());
  CHECK(one.front().satisfied == 350);
}

TEST_CASE("search reproduces the three Neel-orbit models") {
  SearchConstraints cons;
  cons.threads = 2;
  SearchStats stats;
  const auto hits = search_models(cons, &stats);
  MESSAGE("order pass " << stats.order_pass << ", orbit pass " << stats.orbit_pass);
  const std::vector<std::pair<PermutationGate, int>> expected{
      {fixtures::qmbs_a(), 70}, {fixtures::qmbs_b(), 246}, {fixtures::qmbs_c(), 350}};
  for (const auto& [gate, count] : expected) {
    const auto it = std::find_if(hits.begin(), hits.end(), [&](const SearchHit& h) {
      return h.gate.permutation() == gate.permutation();
    });
    REQUIRE(it != hits.end());
    CHECK(it->satisfied == count);
    CHECK(it->total == 350);
  }
  for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].satisfied >= hits[i].satisfied);
}
