#include "scarforge/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <regex>
#include <sstream>
#include <unordered_set>

namespace scarforge {

namespace {

int width_of(const DenseMatrix& local) {
  int w = 0;
  while ((Eigen::Index{1} << w) < local.rows()) ++w;
  if ((Eigen::Index{1} << w) != local.rows() || local.rows() != local.cols()) {
    throw ConfigError("local operator must be square with power-of-two dimension");
  }
  return w;
}

struct GroupElement {
  int steps = 0;   // translation power
  bool mirror = false;
  cplx character{1.0, 0.0};
};

std::vector<GroupElement> group_elements(const SymmetrySector& s, int length) {
  std::vector<GroupElement> out;
  const int tcount = s.shift > 0 ? length / s.shift : 1;
  for (int b = 0; b < (s.spin_mirror ? 2 : 1); ++b) {
    for (int a = 0; a < tcount; ++a) {
      GroupElement g;
      g.steps = a;
      g.mirror = b == 1;
      g.character = std::pow(s.translation_eigenvalue, a) * (g.mirror ? double(s.spin_mirror_eigenvalue) : 1.0);
      out.push_back(g);
    }
  }
  return out;
}

// g = T^{steps * shift} U_SM^{mirror}
std::uint64_t act(const GroupElement& g, const SymmetrySector& s, std::uint64_t index, int length) {
  if (g.mirror) index = spin_mirror(index, length);
  if (g.steps) index = bits::rotate_right(index, g.steps * s.shift, length);
  return index;
}

}  // namespace

SparseOperator local_sum(const DenseMatrix& local, const std::vector<int>& sites,
                         const BasisSubset& subset) {
  const int w = width_of(local);
  const int L = subset.length();
  const auto n = static_cast<std::int64_t>(subset.size());
  std::vector<Eigen::Triplet<cplx, std::int64_t>> trip;
  for (std::int64_t col = 0; col < n; ++col) {
    const auto s = subset.state(static_cast<std::size_t>(col));
    for (int site : sites) {
      const int s0 = site - 1;
      const auto q = bits::window(s, s0, w, L);
      for (Eigen::Index r = 0; r < local.rows(); ++r) {
        const cplx v = local(r, static_cast<Eigen::Index>(q));
        if (std::abs(v) <= kAssemblyCutoff) continue;
        const auto t = bits::set_window(s, s0, w, L, static_cast<std::uint32_t>(r));
        const auto row = subset.find(t);
        if (row == BasisSubset::npos) {
          throw NumericalGuardError("basis subset is not closed: " + BasisState(s, L).bits() +
                                    " couples to " + BasisState(t, L).bits() + " at site " +
                                    std::to_string(site));
        }
        trip.emplace_back(static_cast<std::int64_t>(row), col, v);
      }
    }
  }
  SparseOperator op(n, n);
  op.setFromTriplets(trip.begin(), trip.end());
  prune(op, kAssemblyCutoff);
  op.makeCompressed();
  return op;
}

ChainHamiltonian build_hamiltonian(const FloquetCircuit& c, std::shared_ptr<const BasisSubset> subset,
                                   const LocalHamiltonian& h0) {
  if (subset->length() != c.length()) throw ConfigError("subset length does not match the circuit");
  ChainHamiltonian out;
  out.A = local_sum(h0.matrix, c.sites(Layer::A), *subset);
  out.B = local_sum(h0.matrix, c.sites(Layer::B), *subset);
  out.H = out.A + out.B;
  prune(out.H, kAssemblyCutoff);
  out.subset = std::move(subset);
  out.h0 = h0.matrix;
  out.length = c.length();
  out.geometry = c.geometry();
  return out;
}

ChainHamiltonian build_hamiltonian(const FloquetCircuit& c, std::shared_ptr<const BasisSubset> subset) {
  return build_hamiltonian(c, std::move(subset), principal_log(c.gate()));
}

BasisSubset krylov_subspace(const FloquetCircuit& c, const BasisState& seed) {
  if (seed.length() != c.length()) throw ConfigError("seed length does not match the circuit");
  const auto h0 = principal_log(c.gate()).matrix;
  const int w = c.gate().width();
  const int L = c.length();
  std::vector<int> sites = c.sites(Layer::A);
  sites.insert(sites.end(), c.sites(Layer::B).begin(), c.sites(Layer::B).end());

  std::unordered_set<std::uint64_t> seen{seed.index()};
  std::deque<std::uint64_t> queue{seed.index()};
  std::map<std::uint64_t, cplx> column;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    column.clear();
    for (int site : sites) {
      const auto q = bits::window(s, site - 1, w, L);
      for (Eigen::Index r = 0; r < h0.rows(); ++r) {
        const cplx v = h0(r, static_cast<Eigen::Index>(q));
        if (std::abs(v) <= kAssemblyCutoff) continue;
        column[bits::set_window(s, site - 1, w, L, static_cast<std::uint32_t>(r))] += v;
      }
    }
    for (const auto& [t, v] : column) {
      if (std::abs(v) <= kAssemblyCutoff) continue;
      if (seen.insert(t).second) queue.push_back(t);
    }
  }
  return {L, std::vector<std::uint64_t>(seen.begin(), seen.end())};
}

std::uint64_t spin_mirror(std::uint64_t index, int length) {
  // (prod X) S M: mirror, translate by one, flip every spin.
  const auto m = bits::reverse(index, length);
  return ~bits::rotate_right(m, 1, length) & bits::mask(length);
}

SymmetrySector SymmetrySector::momentum(int shift, int k, int length) {
  if (shift <= 0 || length % shift != 0) throw ConfigError("translation step must divide L");
  SymmetrySector s;
  s.shift = shift;
  s.translation_eigenvalue = std::polar(1.0, 2.0 * kPi * k * shift / length);
  return s;
}

SymmetrySector SymmetrySector::parse(const std::string& text, int length) {
  SymmetrySector s;
  static const std::regex trans(R"(s(\d+)(?:([+-]1)|k(\d+)))");
  static const std::regex usm(R"(usm([+-]1))");
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::smatch m;
    if (std::regex_match(tok, m, trans)) {
      const int shift = std::stoi(m[1]);
      if (shift <= 0 || length % shift != 0) throw ConfigError("translation step must divide L");
      if (m[2].matched) {
        s.shift = shift;
        s.translation_eigenvalue = m[2] == "+1" ? 1.0 : -1.0;
        if (m[2] == "-1" && (length / shift) % 2 != 0) {
          throw ConfigError("eigenvalue -1 needs an even number of translation steps");
        }
      } else {
        const auto keep = s;
        s = momentum(shift, std::stoi(m[3]), length);
        s.spin_mirror = keep.spin_mirror;
        s.spin_mirror_eigenvalue = keep.spin_mirror_eigenvalue;
      }
    } else if (std::regex_match(tok, m, usm)) {
      s.spin_mirror = true;
      s.spin_mirror_eigenvalue = m[1] == "+1" ? 1 : -1;
    } else {
      throw ConfigError("cannot parse sector token '" + tok + "'");
    }
  }
  if (s.spin_mirror && std::abs(s.translation_eigenvalue.imag()) > 1e-12) {
    throw ConfigError("U_SM reverses momentum; combine it only with translation eigenvalue +-1");
  }
  return s;
}

std::string SymmetrySector::describe() const {
  std::ostringstream os;
  bool first = true;
  if (shift > 0) {
    os << 's' << shift << "(" << translation_eigenvalue.real() << (translation_eigenvalue.imag() < 0 ? "" : "+")
       << translation_eigenvalue.imag() << "i)";
    first = false;
  }
  if (spin_mirror) os << (first ? "" : ",") << "usm" << (spin_mirror_eigenvalue > 0 ? "+1" : "-1");
  return os.str();
}

SectorBasis build_sector(std::shared_ptr<const BasisSubset> subset, const SymmetrySector& sector) {
  const int L = subset->length();
  const auto group = group_elements(sector, L);
  SectorBasis out;
  out.sector = sector;
  out.owner.assign(subset->size(), BasisSubset::npos);
  out.coefficient.assign(subset->size(), cplx{});
  std::vector<bool> visited(subset->size(), false);
  std::map<std::size_t, cplx> amp;

  for (std::size_t pos = 0; pos < subset->size(); ++pos) {
    if (visited[pos]) continue;
    const auto r = subset->state(pos);
    amp.clear();
    for (const auto& g : group) {
      const auto t = act(g, sector, r, L);
      const auto tp = subset->find(t);
      if (tp == BasisSubset::npos) {
        throw ConfigError("basis subset is not closed under the sector symmetries");
      }
      amp[tp] += std::conj(g.character) / double(group.size());
    }
    double n2 = 0.0;
    for (const auto& [tp, a] : amp) {
      visited[tp] = true;
      n2 += std::norm(a);
    }
    if (n2 < 1e-20) continue;
    const double inv = 1.0 / std::sqrt(n2);
    double u4 = 0.0;
    for (const auto& [tp, a] : amp) {
      out.owner[tp] = out.representatives.size();
      out.coefficient[tp] = a * inv;
      u4 += std::pow(std::abs(a) * inv, 4);
    }
    out.representatives.push_back(r);
    out.sum_u4.push_back(u4);
  }
  out.subset = std::move(subset);
  return out;
}

DenseVector SectorBasis::project(const DenseVector& v) const {
  DenseVector a = DenseVector::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t s = 0; s < owner.size(); ++s) {
    if (owner[s] == BasisSubset::npos) continue;
    a(static_cast<Eigen::Index>(owner[s])) += std::conj(coefficient[s]) * v(static_cast<Eigen::Index>(s));
  }
  return a;
}

DenseVector SectorBasis::lift(const DenseVector& a) const {
  DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(owner.size()));
  for (std::size_t s = 0; s < owner.size(); ++s) {
    if (owner[s] == BasisSubset::npos) continue;
    v(static_cast<Eigen::Index>(s)) = a(static_cast<Eigen::Index>(owner[s])) * coefficient[s];
  }
  return v;
}

double symmetry_defect(const SparseOperator& H, const BasisSubset& subset, const SymmetrySector& sector) {
  const int L = subset.length();
  std::vector<GroupElement> gens;
  if (sector.shift > 0) gens.push_back({1, false, 1.0});
  if (sector.spin_mirror) gens.push_back({0, true, 1.0});
  double worst = 0.0;
  std::map<std::size_t, cplx> diff;
  for (const auto& g : gens) {
    for (Eigen::Index s = 0; s < H.outerSize(); ++s) {
      diff.clear();
      const auto gs = subset.find(act(g, sector, subset.state(static_cast<std::size_t>(s)), L));
      if (gs == BasisSubset::npos) return std::numeric_limits<double>::infinity();
      // H g |s>
      for (SparseOperator::InnerIterator it(H, static_cast<Eigen::Index>(gs)); it; ++it) {
        diff[static_cast<std::size_t>(it.row())] += it.value();
      }
      // g H |s>
      for (SparseOperator::InnerIterator it(H, s); it; ++it) {
        const auto gt = subset.find(act(g, sector, subset.state(static_cast<std::size_t>(it.row())), L));
        if (gt == BasisSubset::npos) return std::numeric_limits<double>::infinity();
        diff[gt] -= it.value();
      }
      for (const auto& [row, v] : diff) worst = std::max(worst, std::abs(v));
    }
  }
  return worst;
}

SparseOperator project_sector(const SparseOperator& H, const SectorBasis& basis) {
  const double defect = symmetry_defect(H, *basis.subset, basis.sector);
  if (defect > 1e-9) {
    throw NumericalGuardError("sector symmetries do not commute with H (defect " +
                              std::to_string(defect) + ")");
  }
  const auto n = static_cast<std::int64_t>(basis.size());
  std::vector<Eigen::Triplet<cplx, std::int64_t>> trip;
  for (Eigen::Index s = 0; s < H.outerSize(); ++s) {
    const auto b = basis.owner[static_cast<std::size_t>(s)];
    if (b == BasisSubset::npos) continue;
    const cplx ub = basis.coefficient[static_cast<std::size_t>(s)];
    for (SparseOperator::InnerIterator it(H, s); it; ++it) {
      const auto a = basis.owner[static_cast<std::size_t>(it.row())];
      if (a == BasisSubset::npos) continue;
      trip.emplace_back(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b),
                        std::conj(basis.coefficient[static_cast<std::size_t>(it.row())]) * it.value() * ub);
    }
  }
  SparseOperator out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  prune(out, kAssemblyCutoff);
  out.makeCompressed();
  return out;
}

SparseOperator project_sector(const ChainHamiltonian& H, const SectorBasis& basis) {
  return project_sector(H.H, basis);
}

std::vector<std::size_t> orbit_positions(const BasisSubset& subset, const OrbitCycle& orbit) {
  std::vector<std::size_t> out;
  for (const auto& s : orbit.states) out.push_back(subset.position(s.index()));
  return out;
}

DenseMatrix to_dense(const SparseOperator& op) { return DenseMatrix(op); }

nlohmann::json operator_to_json(const SparseOperator& op, const BasisSubset& subset,
                                const std::string& model) {
  nlohmann::json entries = nlohmann::json::array();
  // Row-major listing with ascending columns for a deterministic dump.
  Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t> rows(op);
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    for (decltype(rows)::InnerIterator it(rows, r); it; ++it) {
      entries.push_back({it.row(), it.col(), it.value().real(), it.value().imag()});
    }
  }
  std::ostringstream hash;
  hash << std::hex << subset.hash();
  return {{"header", {{"model", model}, {"L", subset.length()}, {"dimension", op.rows()},
                      {"subset_hash", hash.str()}}},
          {"entries", entries}};
}

}  // namespace scarforge
