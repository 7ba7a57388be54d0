#include "scarforge/rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <thread>

namespace scarforge {

namespace {

constexpr double kPhaseTol = 1e-10;
constexpr double kDrop = 1e-14;

using SparseState = std::map<std::uint64_t, cplx>;

bool nontrivial(int s1, int s2, int s3) { return s2 != 0 && (s1 != 0 || s3 != 0); }

int offset(const FloquetCircuit& c) { return c.stride() / 2; }

struct Powers {
  std::vector<PermutationGate::PowerTable> tables;
  explicit Powers(const PermutationGate& g, int n) {
    for (int s = 0; s < n; ++s) tables.push_back(g.power(s));
  }
};

inline std::uint64_t act_power(const PermutationGate::PowerTable& t, int width, int L,
                               std::uint64_t index, int site0, cplx& phase) {
  const auto q = bits::window(index, site0, width, L);
  phase *= t.phase[q];
  return bits::set_window(index, site0, width, L, t.image[q]);
}

// Both sides of a type-I rule at 0-based site j0.
bool type1_holds(const Powers& p, int width, int L, int d, std::uint64_t state, int j0, int s1,
                 int s2, int s3) {
  const int jm = (j0 + d) % L, jr = (j0 + 2 * d) % L;
  cplx pl{1.0, 0.0}, pr{1.0, 0.0};
  auto lhs = act_power(p.tables[s2], width, L, state, jm, pl);
  lhs = act_power(p.tables[s3], width, L, lhs, jr, pl);
  lhs = act_power(p.tables[s1], width, L, lhs, j0, pl);
  auto rhs = act_power(p.tables[s3], width, L, state, jr, pr);
  rhs = act_power(p.tables[s1], width, L, rhs, j0, pr);
  rhs = act_power(p.tables[s2], width, L, rhs, jm, pr);
  return lhs == rhs && std::abs(pl - pr) <= kPhaseTol;
}

SparseState apply_local(const DenseMatrix& m, int width, int L, const SparseState& in, int site0) {
  SparseState out;
  for (const auto& [index, amp] : in) {
    const auto q = bits::window(index, site0, width, L);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const cplx v = m(r, static_cast<Eigen::Index>(q));
      if (std::abs(v) < kDrop) continue;
      out[bits::set_window(index, site0, width, L, static_cast<std::uint32_t>(r))] += v * amp;
    }
  }
  return out;
}

double distance(const SparseState& a, const SparseState& b) {
  double acc = 0.0;
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      acc += std::norm(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      acc += std::norm(ib->second);
      ++ib;
    } else {
      acc += std::norm(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return std::sqrt(acc);
}

double type2_residual(const std::vector<DenseMatrix>& hp, int width, int L, int d,
                      std::uint64_t state, int j0, int s1, int s2, int s3) {
  const int jm = (j0 + d) % L, jr = (j0 + 2 * d) % L;
  const SparseState psi{{state, cplx{1.0, 0.0}}};
  auto lhs = apply_local(hp[s2], width, L, psi, jm);
  lhs = apply_local(hp[s3], width, L, lhs, jr);
  lhs = apply_local(hp[s1], width, L, lhs, j0);
  auto rhs = apply_local(hp[s3], width, L, psi, jr);
  rhs = apply_local(hp[s1], width, L, rhs, j0);
  rhs = apply_local(hp[s2], width, L, rhs, jm);
  return distance(lhs, rhs);
}

std::vector<DenseMatrix> matrix_powers(const DenseMatrix& h, int m) {
  std::vector<DenseMatrix> out{DenseMatrix::Identity(h.rows(), h.cols())};
  for (int s = 1; s < m; ++s) out.push_back(out.back() * h);
  return out;
}

void require_powers(const RuleInstance& r, int bound) {
  for (int s : {r.s1, r.s2, r.s3}) {
    if (s < 0 || s >= bound) throw ConfigError("rule power outside [0, " + std::to_string(bound) + ")");
  }
}

}  // namespace

std::string to_string(RuleKind k) { return k == RuleKind::I ? "I" : "II"; }

bool check_type1(const FloquetCircuit& c, const BasisState& state, const RuleInstance& r) {
  const auto order = gate_order(c.gate());
  const int n = order.found ? order.n : 64;
  require_powers(r, n);
  const Powers p(c.gate(), n);
  return type1_holds(p, c.gate().width(), c.length(), offset(c), state.index(), r.site - 1, r.s1,
                     r.s2, r.s3);
}

double check_type2(const FloquetCircuit& c, const LocalHamiltonian& h, const BasisState& state,
                   const RuleInstance& r) {
  const int bound = std::max(r.s1, std::max(r.s2, r.s3)) + 1;
  const auto hp = matrix_powers(h.matrix, bound);
  return type2_residual(hp, c.gate().width(), c.length(), offset(c), state.index(), r.site - 1,
                        r.s1, r.s2, r.s3);
}

long count_relevant_rules(int l, int n, bool translation_invariant, int L) {
  if (l < 1 || n < 1) throw ConfigError("rule count needs l, n >= 1");
  const long per = static_cast<long>(n - 1) * (static_cast<long>(n) * n - 1);
  return l * per * (translation_invariant ? 1 : L / 2);
}

std::vector<std::pair<int, BasisState>> rule_sites(const FloquetCircuit& c, const OrbitCycle& o) {
  const int d = offset(c);
  std::vector<std::pair<int, BasisState>> reps;
  std::set<std::uint64_t> keys;
  for (int k = 0; k < o.length(); ++k) {
    const auto& s = o.states[static_cast<std::size_t>(k)];
    for (int j0 = 0; j0 < c.length(); j0 += d) {
      // Shift the window at j0 back onto site 1.
      const auto key = translate(s, (c.length() - j0) % c.length());
      if (keys.insert(key.index()).second) reps.emplace_back(k, key);
    }
  }
  return reps;
}

RuleReport evaluate_rules(const FloquetCircuit& c, const OrbitCycle& o, RuleKind kind, double tol) {
  const int width = c.gate().width();
  const int L = c.length();
  const int d = offset(c);
  RuleReport report;
  report.kind = kind;

  std::optional<Powers> powers;
  std::vector<DenseMatrix> hp;
  if (kind == RuleKind::I) {
    const auto order = gate_order(c.gate());
    if (!order.found) throw ConfigError("type-I rules need a gate of finite order");
    report.power_bound = order.n;
    powers.emplace(c.gate(), order.n);
  } else {
    const auto h = principal_log(c.gate());
    report.power_bound = closing_relation(h).power;
    hp = matrix_powers(h.matrix, report.power_bound);
  }
  const int bound = report.power_bound;

  for (const auto& [k, state] : rule_sites(c, o)) {
    for (int s1 = 0; s1 < bound; ++s1) {
      for (int s2 = 0; s2 < bound; ++s2) {
        for (int s3 = 0; s3 < bound; ++s3) {
          if (!nontrivial(s1, s2, s3)) continue;
          RuleOutcome out{{kind, 1, s1, s2, s3, k}, state, false, 0.0};
          if (kind == RuleKind::I) {
            out.satisfied = type1_holds(*powers, width, L, d, state.index(), 0, s1, s2, s3);
            out.residual = out.satisfied ? 0.0 : 1.0;
          } else {
            out.residual = type2_residual(hp, width, L, d, state.index(), 0, s1, s2, s3);
            out.satisfied = out.residual < tol;
          }
          report.satisfied += out.satisfied ? 1 : 0;
          report.outcomes.push_back(std::move(out));
        }
      }
    }
  }
  report.total = static_cast<int>(report.outcomes.size());
  return report;
}

int count_satisfied_type1(const FloquetCircuit& c, const OrbitCycle& o, int n) {
  const Powers p(c.gate(), n);
  const int width = c.gate().width();
  const int d = offset(c);
  int count = 0;
  for (const auto& [k, state] : rule_sites(c, o)) {
    for (int s1 = 0; s1 < n; ++s1)
      for (int s2 = 1; s2 < n; ++s2)
        for (int s3 = 0; s3 < n; ++s3) {
          if (!nontrivial(s1, s2, s3)) continue;
          count += type1_holds(p, width, c.length(), d, state.index(), 0, s1, s2, s3) ? 1 : 0;
        }
  }
  return count;
}

PermutationGate lift_permutation(const std::vector<std::uint8_t>& perm) {
  if (perm.size() != 8) throw ConfigError("search permutations act on 8 three-qubit patterns");
  std::vector<std::uint32_t> sigma(16);
  for (std::uint32_t q = 0; q < 16; ++q) sigma[q] = (static_cast<std::uint32_t>(perm[q >> 1]) << 1) | (q & 1U);
  return {4, std::move(sigma), std::vector<cplx>(16, cplx{1.0, 0.0})};
}

namespace {

std::vector<std::uint8_t> unrank(std::uint64_t rank) {
  std::vector<std::uint8_t> pool{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<std::uint8_t> out;
  std::uint64_t fact = 5040;
  for (int i = 7; i >= 0; --i) {
    const auto pick = rank / fact;
    rank %= fact;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    if (i > 0) fact /= static_cast<std::uint64_t>(i);
  }
  return out;
}

int permutation_order(const std::vector<std::uint8_t>& perm) {
  int order = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    int len = 0;
    for (auto q = s; !seen[q]; q = perm[q]) {
      seen[q] = true;
      ++len;
    }
    if (len) order = std::lcm(order, len);
  }
  return order;
}

}  // namespace

std::vector<SearchHit> search_models(const SearchConstraints& cons, SearchStats* stats) {
  if (cons.order < 1) throw ConfigError("order filter must be >= 1");
  if (cons.length % 4 != 0) throw ConfigError("search chain length must be divisible by 4");
  if (!cons.trivial_last_qubit) {
    throw ConfigError("only the trivial-last-qubit search space (8! gates) is supported");
  }
  constexpr std::uint64_t kTotal = 40320;
  const int threads = std::max(1, cons.threads);
  const auto neel = BasisState::neel(cons.length);
  const auto anti = BasisState::anti_neel(cons.length);

  struct Chunk {
    std::vector<SearchHit> hits;
    SearchStats stats;
  };
  std::vector<Chunk> chunks(static_cast<std::size_t>(threads));

  auto work = [&](int t) {
    const std::uint64_t begin = kTotal * static_cast<std::uint64_t>(t) / threads;
    const std::uint64_t end = kTotal * static_cast<std::uint64_t>(t + 1) / threads;
    auto perm = unrank(begin);
    auto& chunk = chunks[static_cast<std::size_t>(t)];
    for (std::uint64_t r = begin; r < end; ++r, std::next_permutation(perm.begin(), perm.end())) {
      ++chunk.stats.enumerated;
      const int order = permutation_order(perm);
      if (cons.order % order != 0) continue;
      ++chunk.stats.order_pass;
      auto gate = lift_permutation(perm);
      const FloquetCircuit c(gate, cons.length, Geometry::Stride4);
      if (cons.neel_orbit) {
        cplx ph{1.0, 0.0};
        if (c.apply(neel.index(), ph) != anti.index()) continue;
        if (c.apply(anti.index(), ph) != neel.index()) continue;
      }
      ++chunk.stats.orbit_pass;
      const auto orbit = orbit_of(c, neel);
      const int n = order;
      SearchHit hit{perm, gate, n, 0, 0};
      hit.satisfied = count_satisfied_type1(c, orbit, n);
      hit.total = static_cast<int>(rule_sites(c, orbit).size()) * (n - 1) * (n * n - 1);
      chunk.hits.push_back(std::move(hit));
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  std::vector<SearchHit> hits;
  SearchStats total;
  for (auto& ch : chunks) {
    total.enumerated += ch.stats.enumerated;
    total.order_pass += ch.stats.order_pass;
    total.orbit_pass += ch.stats.orbit_pass;
    for (auto& h : ch.hits) hits.push_back(std::move(h));
  }
  std::stable_sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.satisfied != b.satisfied) return a.satisfied > b.satisfied;
    return a.permutation < b.permutation;
  });
  if (stats) *stats = total;
  return hits;
}

}  // namespace scarforge
