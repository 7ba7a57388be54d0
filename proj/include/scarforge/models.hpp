#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "scarforge/automaton.hpp"
#include "scarforge/dynamics.hpp"
#include "scarforge/hamiltonian.hpp"
#include "scarforge/rules.hpp"
#include "scarforge/spectral.hpp"

namespace scarforge {

/// Raised for a registry name that does not exist.
class UnknownModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class WorkingSpace { Full, Krylov };

struct ModelExpectation {
  int order = 0;  // n with U0^n = 1
  std::optional<RuleKind> rule_kind;
  int rule_satisfied = 0;
  int rule_total = 0;
  int orbit_length = 0;
  std::vector<cplx> coefficients;  // h0 = sum_k c_k U0^k
};

/// Gate file plus {geometry, orbit_seeds, working_space, neff, expected,
/// spin_representation}.
struct ModelDefinition {
  std::string name;
  PermutationGate gate = PermutationGate::identity(4);
  Geometry geometry = Geometry::Stride4;
  std::vector<std::string> orbit_seeds;  // state names, first one seeds the orbit
  WorkingSpace working_space = WorkingSpace::Krylov;
  std::string neff;                  // closed-form N_eff family, empty if none
  std::string spin_representation;   // constructor key, empty if none
  ModelExpectation expected;

  FloquetCircuit circuit(int length) const { return {gate, length, geometry}; }
  BasisState seed(int length) const;
  OrbitCycle orbit(int length) const;
};

std::vector<std::string> model_names();
/// Registry lookup; throws UnknownModelError.
ModelDefinition load_model(const std::string& name);
/// Registry name, or a path to a model JSON file.
ModelDefinition resolve_model(const std::string& name_or_path);
ModelDefinition model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelDefinition& m);

/// "neel", "anti-neel", "polarized" or an explicit bit string.
BasisState named_state(const std::string& name, int length);

/// Closed-form effective dimension for the model's family at length L.
std::uint64_t neff_formula(const std::string& family, int length);

/// Working subset at length L: the full space or the Krylov set of the seed
/// state (default: the model's policy).
std::shared_ptr<const BasisSubset> working_subset(const ModelDefinition& m, int length,
                                                  std::optional<WorkingSpace> space = std::nullopt,
                                                  const std::string& seed = "neel");

/// Local term built from the spin-operator expression of the model.
DenseMatrix spin_representation(const ModelDefinition& m);
/// max |h0(spin expression) - i log U0|.
double verify_spin_representation(const ModelDefinition& m);

struct SgaReport {
  double residual = 0.0;  // max over w of ||([H, Q+] - eps Q+)|w>||
  std::size_t w_dimension = 0;
};

/// QMBS-C ladder operator Q+ = sum_j Z_{2j}(1 - X_{2j}X_{2j+1}) on W, the
/// states with opposite spins on every bond (2j, 2j+1).
SgaReport sga_check(int length, double epsilon = kPi);

/// Neel PR extrema per length on the model's working subset.
std::vector<ScalingRow> scaling_scan(const ModelDefinition& m, const std::vector<int>& lengths,
                                     const TimeGrid& grid, double t_lo = 10.0, double t_hi = 300.0);

}  // namespace scarforge
