#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scarforge {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a caller-supplied value violates a documented precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical guard trips (norm drift, non-closed subset, ...).
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bit convention used throughout: qubit 1 (site 0 internally) is the most
// significant bit of the index, so |0001> on four qubits has index 1 and the
// integer label 2 (label = index + 1).

/// Computational basis state of an even-length periodic qubit chain.
class BasisState {
 public:
  BasisState(std::uint64_t index, int length);

  static BasisState from_bits(std::string_view bits);
  static BasisState neel(int length);       // |1010...>
  static BasisState anti_neel(int length);  // |0101...>
  static BasisState polarized(int length);  // |1111...>

  std::uint64_t index() const noexcept { return index_; }
  int length() const noexcept { return length_; }

  /// Value of qubit at 0-based site `site` (0 or 1).
  int qubit(int site) const noexcept {
    return static_cast<int>((index_ >> (length_ - 1 - site)) & 1U);
  }

  /// Bit string, qubit 1 first.
  std::string bits() const;

  friend bool operator==(const BasisState&, const BasisState&) = default;

 private:
  std::uint64_t index_;
  int length_;
};

/// A basis state multiplied by a unit-modulus phase.
struct PhasedState {
  BasisState state;
  cplx phase{1.0, 0.0};
};

// Raw-index helpers, shared by the hot loops of the other modules.
namespace bits {

inline std::uint64_t mask(int length) {
  return length >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << length) - 1);
}

/// Moves every qubit `shift` sites to the right with periodic wrap.
inline std::uint64_t rotate_right(std::uint64_t index, int shift, int length) {
  shift %= length;
  if (shift < 0) shift += length;
  if (shift == 0) return index;
  // Moving a qubit to a higher site lowers its bit position.
  return ((index >> shift) | (index << (length - shift))) & mask(length);
}

std::uint64_t reverse(std::uint64_t index, int length);

/// Reads `width` qubits starting at 0-based site `site` (periodic) as an
/// integer, first qubit most significant.
inline std::uint32_t window(std::uint64_t index, int site, int width, int length) {
  std::uint32_t out = 0;
  for (int b = 0; b < width; ++b) {
    int s = site + b;
    if (s >= length) s -= length;
    out = (out << 1) | static_cast<std::uint32_t>((index >> (length - 1 - s)) & 1U);
  }
  return out;
}

/// Overwrites the `width`-qubit window at `site` with `value`.
inline std::uint64_t set_window(std::uint64_t index, int site, int width, int length,
                                std::uint32_t value) {
  for (int b = 0; b < width; ++b) {
    int s = site + b;
    if (s >= length) s -= length;
    const int pos = length - 1 - s;
    const std::uint64_t bit = (value >> (width - 1 - b)) & 1U;
    index = (index & ~(std::uint64_t{1} << pos)) | (bit << pos);
  }
  return index;
}

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

}  // namespace bits

BasisState translate(const BasisState& state, int shift);
BasisState mirror(const BasisState& state);
BasisState global_spin_flip(const BasisState& state);

/// App.-A style label of a w-qubit pattern: index + 1.
inline int label_of(std::uint32_t pattern) { return static_cast<int>(pattern) + 1; }
inline std::uint32_t pattern_of(int label) { return static_cast<std::uint32_t>(label - 1); }

/// Basis states of one chain, kept in ascending index order; positions are
/// looked up by binary search (or directly for the full space).
class BasisSubset {
 public:
  BasisSubset() = default;
  BasisSubset(int length, std::vector<std::uint64_t> states);

  static BasisSubset full(int length);

  int length() const noexcept { return length_; }
  std::size_t size() const noexcept { return states_.size(); }
  std::size_t n_eff() const noexcept { return states_.size(); }
  std::uint64_t state(std::size_t pos) const { return states_[pos]; }
  const std::vector<std::uint64_t>& states() const noexcept { return states_; }

  bool contains(std::uint64_t index) const;
  /// Position of `index`, or npos.
  std::size_t find(std::uint64_t index) const;
  std::size_t position(std::uint64_t index) const;  // throws when absent

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Stable FNV-1a digest of the member list, used in output headers.
  std::uint64_t hash() const;

 private:
  int length_ = 0;
  bool full_ = false;
  std::vector<std::uint64_t> states_;
};

/// Amplitudes over a subset.
struct StateVector {
  std::shared_ptr<const BasisSubset> subset;
  std::vector<cplx> amplitudes;

  double norm() const;
  static StateVector basis(std::shared_ptr<const BasisSubset> subset, std::uint64_t index);
};

}  // namespace scarforge
