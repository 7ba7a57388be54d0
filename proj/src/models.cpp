#include "scarforge/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "scarforge/logmap.hpp"

namespace scarforge {

namespace detail {
// Generated from data/models/*.json at configure time.
extern const std::vector<std::pair<std::string, std::string>> kEmbeddedModels;
}  // namespace detail

namespace {

DenseMatrix pauli(char c) {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    case '+': m << 0, 0, 1, 0; break;   // S+ = |1><0|
    case '-': m << 0, 1, 0, 0; break;   // S- = |0><1|
    case 'K': m << 1, 0, 0, 0; break;   // (1 + Z)/2
    case 'P': m << 0, 0, 0, 1; break;   // (1 - Z)/2
    default: throw ConfigError(std::string("unknown local operator ") + c);
  }
  return m;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Product operator on the 4-qubit window, e.g. "+-PI"; missing sites are I.
DenseMatrix op(std::string_view s) {
  DenseMatrix out = DenseMatrix::Identity(1, 1);
  for (int i = 0; i < 4; ++i) out = kron(out, pauli(i < static_cast<int>(s.size()) ? s[i] : 'I'));
  return out;
}

DenseMatrix herm(const DenseMatrix& m) { return m + m.adjoint(); }

DenseMatrix pxp_rep() { return -kPi / 2 * op("PXP"); }

DenseMatrix qmbs_b_rep() {
  const DenseMatrix t = op("+++") + op("---");
  const cplx hop{0.0, 4 * kPi / (6 * std::sqrt(3.0))};
  return herm(kPi / 4 * t + hop * (op("-+") + op("I-+") + op("+I-")) - kPi / 4 * t * t);
}

DenseMatrix qmbs_c_rep() {
  const DenseMatrix one = op("");
  const DenseMatrix p1 = (one - op("IZZ")) / 2.0;
  const DenseMatrix k0 = op("K"), k1 = op("IK");
  const cplx amp{0.0, 4 * kPi / (6 * std::sqrt(3.0))};
  const DenseMatrix ext =
      herm(amp * (k1 + (one - k1) * op("X")) * (k0 + (one - k0) * op("IXX")) + kPi / 4 * one);
  return kPi / 2 * p1 * op("IXX") * p1 + (one - p1) * ext * (one - p1) - kPi / 2 * one;
}

// The QMBS-A expression gives U0 itself; h0 follows from the principal log.
DenseMatrix qmbs_a_unitary() {
  const DenseMatrix t = op("+++") + op("---");
  return op("++-") + op("+--") + op("P-+") + op("-+P") + op("-+K") + op("K-+") + t * t;
}

PermutationGate gate_from_matrix(const DenseMatrix& u) {
  const auto dim = static_cast<std::size_t>(u.cols());
  std::vector<std::uint32_t> sigma(dim);
  std::vector<cplx> phases(dim);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index r = 0;
    u.col(c).cwiseAbs().maxCoeff(&r);
    if (std::abs(std::abs(u(r, c)) - 1.0) > 1e-12 || u.col(c).cwiseAbs().sum() - 1.0 > 1e-12) {
      throw NumericalGuardError("spin expression is not a permutation with phases");
    }
    sigma[static_cast<std::size_t>(c)] = static_cast<std::uint32_t>(r);
    phases[static_cast<std::size_t>(c)] = u(r, c);
  }
  return {std::countr_zero(dim), std::move(sigma), std::move(phases)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnknownModelError("no registry model or readable file named '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

BasisState ModelDefinition::seed(int length) const {
  return named_state(orbit_seeds.empty() ? "neel" : orbit_seeds.front(), length);
}

OrbitCycle ModelDefinition::orbit(int length) const { return orbit_of(circuit(length), seed(length)); }

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::kEmbeddedModels) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

ModelDefinition load_model(const std::string& name) {
  for (const auto& [key, text] : detail::kEmbeddedModels) {
    if (key == name) return model_from_json(nlohmann::json::parse(text));
  }
  std::string known;
  for (const auto& n : model_names()) known += (known.empty() ? "" : ", ") + n;
  throw UnknownModelError("unknown model '" + name + "' (known: " + known + ")");
}

ModelDefinition resolve_model(const std::string& name_or_path) {
  const auto names = model_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return load_model(name_or_path);
  if (name_or_path.find('/') == std::string::npos && name_or_path.find(".json") == std::string::npos) {
    return load_model(name_or_path);  // throws with the list of names
  }
  try {
    return model_from_json(nlohmann::json::parse(read_file(name_or_path)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed model file " + name_or_path + ": " + e.what());
  }
}

ModelDefinition model_from_json(const nlohmann::json& j) {
  ModelDefinition m;
  try {
    m.name = j.value("name", std::string("custom"));
    m.gate = gate_from_json(j);
    m.geometry = parse_geometry(j.value("geometry", std::string("stride4")));
    m.orbit_seeds = j.value("orbit_seeds", std::vector<std::string>{"neel"});
    const auto space = j.value("working_space", std::string("krylov"));
    if (space != "krylov" && space != "full") throw ConfigError("working_space must be krylov or full");
    m.working_space = space == "full" ? WorkingSpace::Full : WorkingSpace::Krylov;
    m.neff = j.value("neff", std::string());
    m.spin_representation = j.value("spin_representation", std::string());
    if (j.contains("expected")) {
      const auto& e = j.at("expected");
      m.expected.order = e.value("n", 0);
      m.expected.orbit_length = e.value("orbit_length", 0);
      if (e.contains("rule_kind")) {
        const auto k = e.at("rule_kind").get<std::string>();
        m.expected.rule_kind = k == "II" ? RuleKind::II : RuleKind::I;
      }
      if (e.contains("rule_ratio")) {
        m.expected.rule_satisfied = e.at("rule_ratio").at(0).get<int>();
        m.expected.rule_total = e.at("rule_ratio").at(1).get<int>();
      }
      for (const auto& c : e.value("coefficients", nlohmann::json::array())) {
        m.expected.coefficients.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model JSON: ") + e.what());
  }
  return m;
}

nlohmann::json model_to_json(const ModelDefinition& m) {
  auto j = gate_to_json(m.gate);
  j["name"] = m.name;
  j["geometry"] = to_string(m.geometry);
  j["orbit_seeds"] = m.orbit_seeds;
  j["working_space"] = m.working_space == WorkingSpace::Full ? "full" : "krylov";
  if (!m.neff.empty()) j["neff"] = m.neff;
  if (!m.spin_representation.empty()) j["spin_representation"] = m.spin_representation;
  nlohmann::json e{{"n", m.expected.order}};
  if (m.expected.rule_kind) {
    e["rule_kind"] = to_string(*m.expected.rule_kind);
    e["rule_ratio"] = {m.expected.rule_satisfied, m.expected.rule_total};
  }
  if (m.expected.orbit_length) e["orbit_length"] = m.expected.orbit_length;
  if (!m.expected.coefficients.empty()) {
    auto& cs = e["coefficients"] = nlohmann::json::array();
    for (const auto& c : m.expected.coefficients) cs.push_back({c.real(), c.imag()});
  }
  j["expected"] = e;
  return j;
}

BasisState named_state(const std::string& name, int length) {
  if (name == "neel") return BasisState::neel(length);
  if (name == "anti-neel") return BasisState::anti_neel(length);
  if (name == "polarized") return BasisState::polarized(length);
  if (static_cast<int>(name.size()) == length &&
      name.find_first_not_of("01") == std::string::npos) {
    return BasisState::from_bits(name);
  }
  throw ConfigError("unknown state '" + name + "' (neel, anti-neel, polarized or a bit string of length L)");
}

std::uint64_t neff_formula(const std::string& family, int L) {
  if (L < 2 || L % 2 != 0 || L > 62) throw ConfigError("N_eff formulas need an even length");
  if (family == "fibonacci") {
    std::vector<std::uint64_t> f{0, 1};
    while (static_cast<int>(f.size()) <= L + 1) f.push_back(f[f.size() - 1] + f[f.size() - 2]);
    return f[static_cast<std::size_t>(L + 1)] + f[static_cast<std::size_t>(L - 1)];
  }
  if (family == "power2") return std::uint64_t{1} << L;
  if (family == "power2-half") return std::uint64_t{1} << (L / 2);
  if (family == "magnetization-mod3") {
    // Number of states whose up count differs from L/2 by a multiple of 3.
    std::uint64_t total = 0;
    for (int up = 0; up <= L; ++up) {
      if (std::abs(up - L / 2) % 3 != 0) continue;
      std::uint64_t c = 1;
      for (int i = 1; i <= up; ++i) c = c * static_cast<std::uint64_t>(L - up + i) / static_cast<std::uint64_t>(i);
      total += c;
    }
    return total;
  }
  throw ConfigError("model has no N_eff formula '" + family + "'");
}

std::shared_ptr<const BasisSubset> working_subset(const ModelDefinition& m, int length,
                                                  std::optional<WorkingSpace> space, const std::string& seed) {
  if (space.value_or(m.working_space) == WorkingSpace::Full) {
    return std::make_shared<const BasisSubset>(BasisSubset::full(length));
  }
  return std::make_shared<const BasisSubset>(krylov_subspace(m.circuit(length), named_state(seed, length)));
}

DenseMatrix spin_representation(const ModelDefinition& m) {
  const auto& key = m.spin_representation;
  if (key == "pxp") return pxp_rep();
  if (key == "qmbs-b") return qmbs_b_rep();
  if (key == "qmbs-c") return qmbs_c_rep();
  if (key == "qmbs-a") return principal_log(gate_from_matrix(qmbs_a_unitary())).matrix;
  if (key == "identity") return DenseMatrix::Zero(16, 16);
  throw ConfigError("model '" + m.name + "' has no spin representation");
}

double verify_spin_representation(const ModelDefinition& m) {
  const DenseMatrix rep = spin_representation(m);
  const DenseMatrix h0 = principal_log(m.gate).matrix;
  if (rep.rows() != h0.rows()) throw ConfigError("spin representation and gate widths differ");
  return (rep - h0).cwiseAbs().maxCoeff();
}

SgaReport sga_check(int L, double epsilon) {
  if (L < 4 || L % 2 != 0) throw ConfigError("sga-check needs an even L >= 4");
  const auto model = load_model("qmbs-c");
  auto full = std::make_shared<const BasisSubset>(BasisSubset::full(L));
  const auto h = build_hamiltonian(model.circuit(L), full);
  DenseMatrix q_local(4, 4);
  {
    DenseMatrix z(2, 2), x(2, 2), id = DenseMatrix::Identity(2, 2);
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    q_local = kron(z, id) - kron(z * x, x);
  }
  std::vector<int> even_sites;
  for (int j = 2; j <= L; j += 2) even_sites.push_back(j);
  const SparseOperator q = local_sum(q_local, even_sites, *full);
  SgaReport rep;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << L); ++s) {
    bool in_w = true;
    for (int j = 2; j <= L && in_w; j += 2) {
      in_w = bits::window(s, j - 1, 1, L) != bits::window(s, j % L, 1, L);
    }
    if (!in_w) continue;
    ++rep.w_dimension;
    DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(full->size()));
    w(static_cast<Eigen::Index>(s)) = 1.0;
    const DenseVector qw = q * w;
    const DenseVector r = h.H * qw - q * (h.H * w) - epsilon * qw;
    rep.residual = std::max(rep.residual, r.norm());
  }
  return rep;
}

std::vector<ScalingRow> scaling_scan(const ModelDefinition& m, const std::vector<int>& lengths,
                                     const TimeGrid& grid, double t_lo, double t_hi) {
  std::vector<ScalingRow> rows;
  for (int L : lengths) {
    const auto sub = working_subset(m, L);
    const auto h = build_hamiltonian(m.circuit(L), sub);
    const auto job = subset_job(h.H, *sub, BasisState::neel(L).index(), grid);
    rows.push_back(pr_extrema(job, L, sub->size(), t_lo, t_hi));
  }
  return rows;
}

}  // namespace scarforge
