#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "scarforge/automaton.hpp"
#include "scarforge/logmap.hpp"

namespace scarforge {

enum class RuleKind { I, II };

/// U^{s1}_j U^{s3}_{j+2d} U^{s2}_{j+d} |psi> vs U^{s2}_{j+d} U^{s1}_j U^{s3}_{j+2d} |psi>
/// with d = stride / 2 (h0 powers instead of U0 powers for type II).
struct RuleInstance {
  RuleKind kind = RuleKind::I;
  int site = 1;  // 1-based j
  int s1 = 0, s2 = 0, s3 = 0;
  int orbit_index = 0;  // k of sigma^k(q) the class representative came from
};

struct RuleOutcome {
  RuleInstance rule;
  BasisState state;
  bool satisfied = false;
  double residual = 0.0;  // 0 or 1 for type I
};

struct RuleReport {
  RuleKind kind = RuleKind::I;
  int satisfied = 0;
  int total = 0;
  int power_bound = 0;  // n for type I, closing power m for type II
  std::vector<RuleOutcome> outcomes;
};

bool check_type1(const FloquetCircuit& c, const BasisState& state, const RuleInstance& r);

double check_type2(const FloquetCircuit& c, const LocalHamiltonian& h, const BasisState& state,
                   const RuleInstance& r);

/// l (n-1)(n^2-1), times L/2 when the orbit is not S^2-invariant.
long count_relevant_rules(int l, int n, bool translation_invariant, int L);

/// (state, site) representatives of the rule classes over an orbit: pairs
/// related by a simultaneous translation of stride/2 sites test the same
/// condition and are counted once.
std::vector<std::pair<int, BasisState>> rule_sites(const FloquetCircuit& c, const OrbitCycle& o);

RuleReport evaluate_rules(const FloquetCircuit& c, const OrbitCycle& o, RuleKind kind,
                          double tol = 1e-9);

/// Fast type-I count, no per-rule records; used by the search.
int count_satisfied_type1(const FloquetCircuit& c, const OrbitCycle& o, int n);

struct SearchConstraints {
  int order = 6;             // keep gates with U0^order = 1
  bool trivial_last_qubit = true;
  int length = 8;            // chain used for rule counting
  int threads = 1;
  // Protected orbit: exactly {Neel, anti-Neel} with U_F swapping them.
  bool neel_orbit = true;
};

struct SearchHit {
  std::vector<std::uint8_t> permutation;  // image of 3-bit patterns 0..7
  PermutationGate gate;
  int order = 0;
  int satisfied = 0;
  int total = 0;
};

struct SearchStats {
  std::uint64_t enumerated = 0;
  std::uint64_t order_pass = 0;
  std::uint64_t orbit_pass = 0;
};

/// Lifts a permutation of 3-bit patterns to a 4-qubit gate acting trivially
/// on the last qubit.
PermutationGate lift_permutation(const std::vector<std::uint8_t>& perm);

std::vector<SearchHit> search_models(const SearchConstraints& constraints,
                                     SearchStats* stats = nullptr);

std::string to_string(RuleKind k);

}  // namespace scarforge
