#include "scarforge/gate.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace scarforge {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kPhaseTol = 1e-10;

}  // namespace

PermutationGate::PermutationGate(int width, std::vector<std::uint32_t> sigma,
                                 std::vector<cplx> phases)
    : width_(width), sigma_(std::move(sigma)), phases_(std::move(phases)) {
  if (width < 1 || width > 8) throw ConfigError("gate width must be in [1, 8]");
  const std::size_t dim = std::size_t{1} << width;
  if (sigma_.size() != dim) throw ConfigError("permutation size does not match 2^width");
  if (phases_.size() != dim) {
    throw ConfigError("phase array must have 2^width = " + std::to_string(dim) + " entries");
  }
  std::vector<bool> seen(dim, false);
  for (auto v : sigma_) {
    if (v >= dim || seen[v]) throw ConfigError("gate permutation is not a bijection");
    seen[v] = true;
  }
  for (const auto& p : phases_) {
    if (std::abs(std::abs(p) - 1.0) > kUnitTol) throw ConfigError("gate phases must have modulus 1");
  }
}

PermutationGate PermutationGate::identity(int width) {
  const std::size_t dim = std::size_t{1} << width;
  std::vector<std::uint32_t> sigma(dim);
  std::iota(sigma.begin(), sigma.end(), 0U);
  return {width, std::move(sigma), std::vector<cplx>(dim, cplx{1.0, 0.0})};
}

std::vector<std::vector<std::uint32_t>> PermutationGate::all_cycles() const {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<bool> seen(sigma_.size(), false);
  for (std::uint32_t start = 0; start < sigma_.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> cycle;
    for (auto q = start; !seen[q]; q = sigma_[q]) {
      seen[q] = true;
      cycle.push_back(q);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

std::vector<std::vector<int>> PermutationGate::cycles() const {
  std::vector<std::vector<int>> out;
  for (const auto& c : all_cycles()) {
    if (c.size() < 2) continue;
    std::vector<int> labels;
    for (auto q : c) labels.push_back(label_of(q));
    out.push_back(std::move(labels));
  }
  return out;
}

std::string PermutationGate::cycle_notation() const {
  std::ostringstream os;
  os << '(';
  bool first_cycle = true;
  for (const auto& c : cycles()) {
    if (!first_cycle) os << ',';
    first_cycle = false;
    os << '(';
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ')';
  }
  os << ')';
  return os.str();
}

PermutationGate::PowerTable PermutationGate::power(int exponent) const {
  if (exponent < 0) throw ConfigError("gate power must be non-negative");
  PowerTable t;
  t.image.resize(sigma_.size());
  t.phase.assign(sigma_.size(), cplx{1.0, 0.0});
  for (std::uint32_t q = 0; q < sigma_.size(); ++q) {
    auto cur = q;
    cplx ph{1.0, 0.0};
    for (int k = 0; k < exponent; ++k) {
      ph *= phases_[cur];
      cur = sigma_[cur];
    }
    t.image[q] = cur;
    t.phase[q] = ph;
  }
  return t;
}

bool PermutationGate::has_trivial_phases(double tol) const {
  return std::all_of(phases_.begin(), phases_.end(),
                     [tol](const cplx& p) { return std::abs(p - 1.0) <= tol; });
}

std::vector<std::vector<int>> parse_cycle_notation(std::string_view text) {
  std::vector<std::vector<int>> cycles;
  int depth = 0;
  std::vector<int> current;
  std::string number;
  auto flush_number = [&] {
    if (number.empty()) return;
    current.push_back(std::stoi(number));
    number.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '(') {
      ++depth;
      if (depth > 2) throw ConfigError("cycle notation nested too deeply");
      if (depth == 2) current.clear();
    } else if (c == ')') {
      flush_number();
      if (depth == 2 && !current.empty()) cycles.push_back(current);
      // A bare "(1,3,8)" is a single cycle.
      if (depth == 1 && !current.empty()) {
        cycles.push_back(current);
        current.clear();
      }
      --depth;
      if (depth < 0) throw ConfigError("unbalanced parentheses in cycle notation");
      if (depth == 1) current.clear();
    } else if (c == ',') {
      flush_number();
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      number.push_back(c);
    } else {
      throw ConfigError(std::string("unexpected character in cycle notation: ") + c);
    }
  }
  if (depth != 0) throw ConfigError("unbalanced parentheses in cycle notation");
  return cycles;
}

PermutationGate parse_gate(const std::vector<std::vector<int>>& cycles, std::vector<cplx> phases) {
  const std::size_t dim = phases.size();
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw ConfigError("phase array length must be a power of two");
  }
  const int width = std::countr_zero(dim);
  std::vector<std::uint32_t> sigma(dim);
  std::iota(sigma.begin(), sigma.end(), 0U);
  std::vector<bool> used(dim, false);
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int label = cycle[i];
      if (label < 1 || static_cast<std::size_t>(label) > dim) {
        throw ConfigError("cycle label " + std::to_string(label) + " out of range [1, " +
                          std::to_string(dim) + "]");
      }
      const auto q = pattern_of(label);
      if (used[q]) throw ConfigError("duplicate label " + std::to_string(label) + " in cycles");
      used[q] = true;
      sigma[q] = pattern_of(cycle[(i + 1) % cycle.size()]);
    }
  }
  return {width, std::move(sigma), std::move(phases)};
}

PermutationGate parse_gate(std::string_view cycles, std::vector<cplx> phases) {
  return parse_gate(parse_cycle_notation(cycles), std::move(phases));
}

GateOrder gate_order(const PermutationGate& g, int n_max) {
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  const std::size_t dim = g.dimension();
  std::vector<std::uint32_t> image(dim);
  std::iota(image.begin(), image.end(), 0U);
  std::vector<cplx> phase(dim, cplx{1.0, 0.0});
  for (int n = 1; n <= n_max; ++n) {
    bool identity = true;
    for (std::uint32_t q = 0; q < dim; ++q) {
      phase[q] *= g.phase(image[q]);
      image[q] = g.image(image[q]);
      if (image[q] != q || std::abs(phase[q] - 1.0) > kPhaseTol) identity = false;
    }
    if (identity) return {n, true};
  }
  return {0, false};
}

PhasedState apply_gate(const PermutationGate& g, const BasisState& s, int site) {
  const int L = s.length();
  if (g.width() > L) throw ConfigError("gate wider than the chain");
  const int start = ((site - 1) % L + L) % L;
  const auto q = bits::window(s.index(), start, g.width(), L);
  const auto out = bits::set_window(s.index(), start, g.width(), L, g.image(q));
  return {BasisState(out, L), g.phase(q)};
}

DenseMatrix gate_matrix(const PermutationGate& g) {
  const auto dim = static_cast<Eigen::Index>(g.dimension());
  DenseMatrix m = DenseMatrix::Zero(dim, dim);
  for (Eigen::Index q = 0; q < dim; ++q) {
    m(g.image(static_cast<std::uint32_t>(q)), q) = g.phase(static_cast<std::uint32_t>(q));
  }
  return m;
}

nlohmann::json gate_to_json(const PermutationGate& g) {
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : g.phases()) phases.push_back({p.real(), p.imag()});
  return {{"width", g.width()}, {"cycles", g.cycles()}, {"phases", phases}};
}

PermutationGate gate_from_json(const nlohmann::json& j) {
  try {
    const int width = j.at("width").get<int>();
    auto cycles = j.at("cycles").get<std::vector<std::vector<int>>>();
    std::vector<cplx> phases;
    if (j.contains("phases")) {
      for (const auto& p : j.at("phases")) {
        if (p.is_array()) {
          phases.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        } else {
          phases.emplace_back(p.get<double>(), 0.0);
        }
      }
    } else {
      phases.assign(std::size_t{1} << width, cplx{1.0, 0.0});
    }
    if (phases.size() != (std::size_t{1} << width)) {
      throw ConfigError("gate JSON: phases length does not match width");
    }
    return parse_gate(cycles, std::move(phases));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed gate JSON: ") + e.what());
  }
}

}  // namespace scarforge
