#include "scarforge/bch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/multiprecision/cpp_int.hpp>

namespace scarforge {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Words over {X, Y} of length d are d-bit integers, X = 0, Y = 1, first letter
// in the most significant bit; key = (1 << d) | bits. For equal lengths the
// integer order is the lexicographic order with X < Y.
using Word = std::uint32_t;
inline Word key_of(int len, std::uint32_t bits) { return (Word{1} << len) | bits; }
inline int len_of(Word w) { return std::bit_width(w) - 1; }
inline std::uint32_t bits_of(Word w) { return w & ((Word{1} << len_of(w)) - 1); }

std::string spell(Word w) {
  const int n = len_of(w);
  std::string s(static_cast<std::size_t>(n), 'X');
  for (int i = 0; i < n; ++i) {
    if ((w >> (n - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = 'Y';
  }
  return s;
}

bool is_lyndon(Word w) {
  const auto s = spell(w);
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s < s.substr(i))) return false;
  }
  return true;
}

// w = uv with v the longest proper Lyndon suffix.
std::pair<Word, Word> standard_factorization(Word w) {
  const int n = len_of(w);
  const auto b = bits_of(w);
  for (int k = n - 1; k >= 1; --k) {
    const Word v = key_of(k, b & ((1U << k) - 1));
    if (is_lyndon(v)) return {key_of(n - k, b >> k), v};
  }
  throw std::logic_error("letter has no standard factorization");
}

std::string bracket_of(Word w) {
  if (len_of(w) == 1) return spell(w);
  const auto [u, v] = standard_factorization(w);
  return "[" + bracket_of(u) + "," + bracket_of(v) + "]";
}

// Truncated series in the free algebra, one dense coefficient vector per degree.
using Series = std::vector<std::vector<Rational>>;

Series zero_series(int D) {
  Series s(static_cast<std::size_t>(D + 1));
  for (int d = 0; d <= D; ++d) s[static_cast<std::size_t>(d)].assign(std::size_t{1} << d, Rational{0});
  return s;
}

Series multiply(const Series& p, const Series& q, int D) {
  auto out = zero_series(D);
  for (int i = 1; i <= D; ++i) {
    const auto& pi = p[static_cast<std::size_t>(i)];
    for (int j = 1; i + j <= D; ++j) {
      const auto& qj = q[static_cast<std::size_t>(j)];
      auto& o = out[static_cast<std::size_t>(i + j)];
      for (std::size_t v = 0; v < qj.size(); ++v) {
        if (qj[v] == 0) continue;
        for (std::size_t u = 0; u < pi.size(); ++u) {
          if (pi[u] == 0) continue;
          o[(u << j) | v] += pi[u] * qj[v];
        }
      }
    }
  }
  return out;
}

// log(e^X e^Y) through degree D.
Series bch_series(int D) {
  auto e1 = zero_series(D);
  std::vector<Rational> fact(static_cast<std::size_t>(D + 1), Rational{1});
  for (int k = 1; k <= D; ++k) fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k - 1)] * k;
  for (int d = 1; d <= D; ++d) {
    for (int b = 0; b <= d; ++b) {
      e1[static_cast<std::size_t>(d)][(std::size_t{1} << b) - 1] =
          1 / (fact[static_cast<std::size_t>(d - b)] * fact[static_cast<std::size_t>(b)]);
    }
  }
  auto z = zero_series(D);
  auto power = e1;
  for (int k = 1; k <= D; ++k) {
    const Rational c = Rational(k % 2 ? 1 : -1) / k;
    for (int d = k; d <= D; ++d) {
      auto& zd = z[static_cast<std::size_t>(d)];
      const auto& pd = power[static_cast<std::size_t>(d)];
      for (std::size_t w = 0; w < zd.size(); ++w) {
        if (pd[w] != 0) zd[w] += c * pd[w];
      }
    }
    if (k < D) power = multiply(power, e1, D);
  }
  return z;
}

// Word expansion of the standard bracket of a Lyndon word (integer coefficients).
class BracketExpansions {
 public:
  const std::vector<std::int64_t>& of(Word w) {
    if (auto it = memo_.find(w); it != memo_.end()) return it->second;
    const int n = len_of(w);
    std::vector<std::int64_t> out(std::size_t{1} << n, 0);
    if (n == 1) {
      out[bits_of(w)] = 1;
    } else {
      const auto [u, v] = standard_factorization(w);
      const auto pu = of(u);
      const auto pv = of(v);
      const int lu = len_of(u), lv = len_of(v);
      for (std::size_t a = 0; a < pu.size(); ++a) {
        if (!pu[a]) continue;
        for (std::size_t b = 0; b < pv.size(); ++b) {
          if (!pv[b]) continue;
          out[(a << lv) | b] += pu[a] * pv[b];
          out[(b << lu) | a] -= pu[a] * pv[b];
        }
      }
    }
    return memo_.emplace(w, std::move(out)).first->second;
  }

 private:
  std::map<Word, std::vector<std::int64_t>> memo_;
};

struct LyndonTerm {
  Word word;
  Rational lambda;
};

// Lyndon coefficients per degree, cached up to the largest degree asked for.
const std::vector<std::vector<LyndonTerm>>& lyndon_terms(int D) {
  static std::mutex mu;
  static std::vector<std::vector<LyndonTerm>> cache;
  std::lock_guard lock(mu);
  if (static_cast<int>(cache.size()) > D) return cache;

  const auto z = bch_series(D);
  BracketExpansions expand;
  cache.assign(static_cast<std::size_t>(D + 1), {});
  for (int d = 1; d <= D; ++d) {
    auto residual = z[static_cast<std::size_t>(d)];
    // The smallest word of a Lie element is Lyndon and P(w) = w + larger words,
    // so one ascending sweep peels the element off exactly.
    for (std::uint32_t b = 0; b < residual.size(); ++b) {
      if (residual[b] == 0) continue;
      const Word w = key_of(d, b);
      if (!is_lyndon(w)) throw std::logic_error("BCH element is not a Lie polynomial at " + spell(w));
      const Rational lambda = residual[b];
      const auto& p = expand.of(w);
      for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x]) residual[x] -= lambda * p[x];
      }
      cache[static_cast<std::size_t>(d)].push_back({w, lambda});
    }
  }
  return cache;
}

template <class M>
void prune_relative(M& m) {
  const double cut = 1e-13 * m.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) < cut) m(i, j) = 0.0;
    }
  }
}

// Brackets needed for degrees 2..D: every Lyndon word with a nonzero
// coefficient, closed under standard factorization, grouped by length, with
// the length of the longest word that consumes each one.
struct BracketPlan {
  std::vector<std::vector<Word>> by_length;
  std::map<Word, int> last_use;
};

BracketPlan plan_brackets(const std::vector<std::vector<LyndonTerm>>& terms, int D) {
  BracketPlan p;
  p.by_length.resize(static_cast<std::size_t>(D + 1));
  std::vector<Word> stack;
  for (int d = 2; d <= D; ++d) {
    for (const auto& t : terms[static_cast<std::size_t>(d)]) stack.push_back(t.word);
  }
  while (!stack.empty()) {
    const Word w = stack.back();
    stack.pop_back();
    if (p.last_use.count(w)) continue;
    p.last_use[w] = len_of(w);
    p.by_length[static_cast<std::size_t>(len_of(w))].push_back(w);
    if (len_of(w) > 1) {
      const auto [u, v] = standard_factorization(w);
      stack.push_back(u);
      stack.push_back(v);
    }
  }
  for (const auto& entry : p.last_use) {
    const Word w = entry.first;
    if (len_of(w) == 1) continue;
    const auto [u, v] = standard_factorization(w);
    p.last_use[u] = std::max(p.last_use[u], len_of(w));
    p.last_use[v] = std::max(p.last_use[v], len_of(w));
  }
  for (auto& ws : p.by_length) std::sort(ws.begin(), ws.end());
  return p;
}

// C_0..C_N on one dense block. With X = -iA, Y = -iB a degree-d bracket of
// X, Y is (-i)^d times the same bracket of A, B, so C_n = (-i)^n sum_w
// lambda_w [A, B]_w; the brackets are formed in the scalar type of M, which
// is real whenever the block is.
template <class M>
std::vector<DenseMatrix> series_block(const M& a, const M& b, int N) {
  std::vector<DenseMatrix> out;
  out.push_back((a + b).template cast<cplx>());
  if (N == 0) return out;
  const auto& terms = lyndon_terms(N + 1);
  auto plan = plan_brackets(terms, N + 1);

  std::map<Word, M> mat;
  mat[key_of(1, 0)] = a;
  mat[key_of(1, 1)] = b;
  cplx phase{1.0, 0.0};
  for (int d = 2; d <= N + 1; ++d) {
    for (Word w : plan.by_length[static_cast<std::size_t>(d)]) {
      const auto [u, v] = standard_factorization(w);
      const auto& mu = mat.at(u);
      const auto& mv = mat.at(v);
      M m = mu * mv;
      m.noalias() -= mv * mu;
      prune_relative(m);
      mat[w] = std::move(m);
    }
    M z = M::Zero(a.rows(), a.cols());
    for (const auto& t : terms[static_cast<std::size_t>(d)]) {
      z += t.lambda.template convert_to<double>() * mat.at(t.word);
    }
    phase *= cplx{0.0, -1.0};
    out.push_back(phase * z.template cast<cplx>());
    for (auto it = mat.begin(); it != mat.end();) {
      it = plan.last_use[it->first] <= d ? mat.erase(it) : std::next(it);
    }
  }
  return out;
}

// Imaginary parts at round-off level (from the matrix logarithm) are dropped.
bool effectively_real(const DenseMatrix& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

std::vector<DenseMatrix> series_block(const DenseMatrix& a, const DenseMatrix& b, int N) {
  if (effectively_real(a) && effectively_real(b)) {
    auto out = series_block<Eigen::MatrixXd>(a.real(), b.real(), N);
    out[0] = a + b;
    return out;
  }
  return series_block<DenseMatrix>(a, b, N);
}

void check_order(int N) {
  if (N < 0 || N > kMaxBchOrder) {
    throw ConfigError("BCH order must lie in [0, " + std::to_string(kMaxBchOrder) + "]");
  }
}

// Lifts a block-diagonal operator back onto the subset.
template <class BlockFn>
SparseOperator lift_blocks(const BchSeries& s, BlockFn block) {
  const auto n = static_cast<std::int64_t>(s.subset->size());
  if (s.subset->size() > kDenseLimit) {
    throw ConfigError("subset too large to lift BCH terms (" + std::to_string(n) + " states)");
  }
  std::vector<Eigen::Triplet<cplx, std::int64_t>> trip;
  double peak = 0.0;
  for (std::size_t b = 0; b < s.sectors.size(); ++b) {
    const auto& sec = s.sectors[b];
    const DenseMatrix m = block(b);
    std::vector<std::size_t> members;
    for (std::size_t p = 0; p < sec.owner.size(); ++p) {
      if (sec.owner[p] != BasisSubset::npos) members.push_back(p);
    }
    for (auto t : members) {
      const cplx ct = std::conj(sec.coefficient[t]);
      const auto ot = static_cast<Eigen::Index>(sec.owner[t]);
      for (auto r : members) {
        const cplx v = sec.coefficient[r] * m(static_cast<Eigen::Index>(sec.owner[r]), ot) * ct;
        if (v == cplx{}) continue;
        peak = std::max(peak, std::abs(v));
        trip.emplace_back(static_cast<std::int64_t>(r), static_cast<std::int64_t>(t), v);
      }
    }
  }
  SparseOperator out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  prune(out, 1e-13 * peak);
  out.makeCompressed();
  return out;
}

}  // namespace

std::vector<BchCoefficient> bch_coefficients(int degree) {
  if (degree < 1 || degree > kMaxBchOrder + 1) throw ConfigError("BCH degree out of range");
  std::vector<BchCoefficient> out;
  for (const auto& t : lyndon_terms(degree)[static_cast<std::size_t>(degree)]) {
    BchCoefficient c;
    c.word = spell(t.word);
    c.bracket = bracket_of(t.word);
    c.numerator = static_cast<std::int64_t>(boost::multiprecision::numerator(t.lambda));
    c.denominator = static_cast<std::int64_t>(boost::multiprecision::denominator(t.lambda));
    out.push_back(std::move(c));
  }
  return out;
}

SparseOperator BchSeries::term(int n) const {
  if (n < 0 || n > max_order) throw ConfigError("BCH order not computed");
  return lift_blocks(*this, [&](std::size_t b) { return term_block(n, b); });
}

BchSeries bch_terms(const SparseOperator& A, const SparseOperator& B, int N,
                    std::shared_ptr<const BasisSubset> subset) {
  check_order(N);
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols() ||
      A.rows() != static_cast<Eigen::Index>(subset->size())) {
    throw ConfigError("BCH inputs must be square operators on the same subset");
  }
  if (subset->size() > kDenseLimit) throw ConfigError("subset exceeds the dense BCH limit");
  BchSeries s;
  s.subset = subset;
  s.max_order = N;
  s.sectors.push_back(build_sector(subset, SymmetrySector{}));
  s.blocks.push_back(series_block(DenseMatrix(A), DenseMatrix(B), N));
  return s;
}

BchSeries bch_terms(const ChainHamiltonian& h, int N, const BchOptions& options) {
  check_order(N);
  if (!options.blocked) return bch_terms(h.A, h.B, N, h.subset);
  const int shift = h.geometry == Geometry::Stride4 ? 4 : 2;
  if (h.length % shift != 0) throw ConfigError("BCH needs the brickwork layout (L divisible by the stride)");
  const int count = h.length / shift;
  std::vector<int> momenta = options.momenta;
  if (momenta.empty()) {
    for (int k = 0; k < count; ++k) momenta.push_back(k);
  }
  // For real A, B the sector -k is the complex conjugate of sector k (same
  // representatives, conjugate coefficients), so C_n(-k) = (-1)^n conj C_n(k).
  const auto sparse_real = [](const SparseOperator& op) {
    return max_abs(SparseOperator(op.imag().cast<cplx>())) <= 1e-14 * std::max(1.0, max_abs(op));
  };
  const bool real = sparse_real(h.A) && sparse_real(h.B);
  BchSeries s;
  s.subset = h.subset;
  s.max_order = N;
  std::map<int, std::size_t> done;  // momentum -> block
  for (int k : momenta) {
    if (k < 0 || k >= count) throw ConfigError("momentum index out of range");
    auto sec = build_sector(h.subset, SymmetrySector::momentum(shift, k, h.length));
    if (sec.size() == 0) continue;
    if (sec.size() > kDenseLimit) throw ConfigError("momentum block exceeds the dense BCH limit");
    const int partner = (count - k) % count;
    if (auto it = done.find(partner); real && it != done.end()) {
      std::vector<DenseMatrix> terms;
      for (int n = 0; n <= N; ++n) {
        terms.push_back((n % 2 ? -1.0 : 1.0) * s.blocks[it->second][static_cast<std::size_t>(n)].conjugate());
      }
      s.blocks.push_back(std::move(terms));
    } else {
      const DenseMatrix a(project_sector(h.A, sec));
      const DenseMatrix b(project_sector(h.B, sec));
      s.blocks.push_back(series_block(a, b, N));
    }
    done[k] = s.blocks.size() - 1;
    s.sectors.push_back(std::move(sec));
  }
  return s;
}

DenseMatrix augmented_block(const BchSeries& series, int order, std::size_t b) {
  if (order < 0 || order > series.max_order) throw ConfigError("augmentation order not computed");
  DenseMatrix m = series.term_block(0, b);
  for (int n = 1; n <= order; ++n) m += series.term_block(n, b);
  return m;
}

SparseOperator augmented_hamiltonian(const BchSeries& series, int order) {
  if (order < 0 || order > series.max_order) throw ConfigError("augmentation order not computed");
  return lift_blocks(series, [&](std::size_t b) { return augmented_block(series, order, b); });
}

std::size_t sector_of(const BchSeries& series, std::uint64_t index) {
  const auto pos = series.subset->position(index);
  for (std::size_t b = 0; b < series.sectors.size(); ++b) {
    const auto& sec = series.sectors[b];
    if (sec.owner[pos] == BasisSubset::npos) continue;
    if (std::abs(std::abs(sec.coefficient[pos]) - 1.0) > 1e-9) {
      throw NumericalGuardError("state " + BasisState(index, series.subset->length()).bits() +
                                " is not invariant under the block symmetry; use an unblocked series");
    }
    return b;
  }
  throw ConfigError("state lies in a sector that was not computed");
}

NormProfile norm_profile(const BchSeries& series, const OrbitCycle& orbit) {
  std::size_t covered = 0;
  for (const auto& sec : series.sectors) covered += sec.size();
  if (covered != series.subset->size()) throw ConfigError("norm profile needs every sector of the subset");

  std::vector<std::vector<Eigen::Index>> cols(series.sectors.size());
  for (const auto& st : orbit.states) {
    const auto b = sector_of(series, st.index());
    const auto pos = series.subset->position(st.index());
    const auto c = static_cast<Eigen::Index>(series.sectors[b].owner[pos]);
    if (std::find(cols[b].begin(), cols[b].end(), c) == cols[b].end()) cols[b].push_back(c);
  }

  NormProfile p;
  p.orbit_length = orbit.length();
  p.n_eff = series.subset->size();
  const double l = orbit.length();
  const double neff = double(p.n_eff);
  for (int n = 0; n <= series.max_order; ++n) {
    NormRow row;
    row.n = n;
    double total = 0.0;
    for (std::size_t b = 0; b < series.sectors.size(); ++b) {
      const auto& m = series.term_block(n, b);
      total += m.squaredNorm();
      std::vector<bool> in_orbit(static_cast<std::size_t>(m.rows()), false);
      for (auto c : cols[b]) in_orbit[static_cast<std::size_t>(c)] = true;
      for (auto c : cols[b]) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          (in_orbit[static_cast<std::size_t>(r)] ? row.orbit_sq : row.leakage_sq) += std::norm(m(r, c));
        }
      }
    }
    row.generic_sq = std::max(0.0, total - row.orbit_sq - 2.0 * row.leakage_sq);
    row.orbit_norm = std::sqrt(row.orbit_sq) / l;
    row.leakage_norm = std::sqrt(row.leakage_sq) / std::sqrt(l * neff);
    row.generic_norm = std::sqrt(row.generic_sq) / neff;
    p.rows.push_back(row);
  }
  return p;
}

DecayEstimate fgr_rate(const NormProfile& profile, int length, double bandwidth) {
  if (profile.rows.size() < 3) throw ConfigError("decay estimate needs C_2");
  if (bandwidth <= 0.0) throw ConfigError("bandwidth must be positive");
  DecayEstimate d;
  d.leakage_sq = profile.rows[2].leakage_sq;
  d.n_eff = profile.n_eff;
  d.length = length;
  d.orbit_length = profile.orbit_length;
  d.bandwidth = bandwidth;
  const double neff = double(profile.n_eff);
  d.rate = 2.0 * kPi * (2.0 * neff / (length * bandwidth)) * d.leakage_sq / (neff * profile.orbit_length);
  return d;
}

DecayEstimate fgr_rate(const BchSeries& series, const OrbitCycle& orbit, int length, double bandwidth) {
  return fgr_rate(norm_profile(series, orbit), length, bandwidth);
}

SymmetryFlags classify(const SparseOperator& op, const BasisSubset& subset, double tol) {
  const double scale = std::max(1.0, max_abs(op));
  const double eps = tol * scale;
  const int L = subset.length();
  SymmetryFlags f{true, true, true};
  for (Eigen::Index c = 0; c < op.outerSize(); ++c) {
    const auto sc = subset.state(static_cast<std::size_t>(c));
    const auto mc = subset.find(bits::reverse(sc, L));
    for (SparseOperator::InnerIterator it(op, c); it; ++it) {
      if (std::abs(it.value()) <= eps) continue;
      const auto sr = subset.state(static_cast<std::size_t>(it.row()));
      if (std::abs(it.value().imag()) > eps) f.time_reversal = false;
      if (std::popcount(sr) % 2 == std::popcount(sc) % 2) f.parity_anticommutes = false;
      const auto mr = subset.find(bits::reverse(sr, L));
      if (mr == BasisSubset::npos || mc == BasisSubset::npos ||
          std::abs(op.coeff(static_cast<Eigen::Index>(mr), static_cast<Eigen::Index>(mc)) - it.value()) > eps) {
        f.inversion = false;
      }
    }
  }
  return f;
}

}  // namespace scarforge
