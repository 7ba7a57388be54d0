#include "scarforge/basis.hpp"

#include <algorithm>
#include <cmath>

namespace scarforge {

namespace {

void require_even(int length) {
  if (length <= 0 || length % 2 != 0 || length > 62) {
    throw ConfigError("chain length must be a positive even integer <= 62, got " +
                      std::to_string(length));
  }
}

std::uint64_t alternating(int length, bool first_up) {
  std::uint64_t index = 0;
  for (int s = 0; s < length; ++s) {
    const bool up = (s % 2 == 0) == first_up;
    index = (index << 1) | (up ? 1U : 0U);
  }
  return index;
}

}  // namespace

namespace bits {

std::uint64_t reverse(std::uint64_t index, int length) {
  std::uint64_t out = 0;
  for (int b = 0; b < length; ++b) {
    out = (out << 1) | ((index >> b) & 1U);
  }
  return out;
}

}  // namespace bits

BasisState::BasisState(std::uint64_t index, int length) : index_(index), length_(length) {
  require_even(length);
  if (index > bits::mask(length)) {
    throw ConfigError("basis index " + std::to_string(index) + " out of range for L=" +
                      std::to_string(length));
  }
}

BasisState BasisState::from_bits(std::string_view text) {
  std::uint64_t index = 0;
  for (char c : text) {
    if (c != '0' && c != '1') throw ConfigError("basis state must be a 0/1 string");
    index = (index << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return {index, static_cast<int>(text.size())};
}

BasisState BasisState::neel(int length) {
  require_even(length);
  return {alternating(length, true), length};
}

BasisState BasisState::anti_neel(int length) {
  require_even(length);
  return {alternating(length, false), length};
}

BasisState BasisState::polarized(int length) {
  require_even(length);
  return {bits::mask(length), length};
}

std::string BasisState::bits() const {
  std::string out(static_cast<std::size_t>(length_), '0');
  for (int s = 0; s < length_; ++s) out[static_cast<std::size_t>(s)] = qubit(s) ? '1' : '0';
  return out;
}

BasisState translate(const BasisState& state, int shift) {
  return {bits::rotate_right(state.index(), shift, state.length()), state.length()};
}

BasisState mirror(const BasisState& state) {
  return {bits::reverse(state.index(), state.length()), state.length()};
}

BasisState global_spin_flip(const BasisState& state) {
  return {~state.index() & bits::mask(state.length()), state.length()};
}

BasisSubset::BasisSubset(int length, std::vector<std::uint64_t> states)
    : length_(length), states_(std::move(states)) {
  require_even(length);
  std::sort(states_.begin(), states_.end());
  if (std::adjacent_find(states_.begin(), states_.end()) != states_.end()) {
    throw ConfigError("basis subset contains duplicate states");
  }
  if (!states_.empty() && states_.back() > bits::mask(length)) {
    throw ConfigError("basis subset state out of range");
  }
  full_ = states_.size() == (std::uint64_t{1} << length);
}

BasisSubset BasisSubset::full(int length) {
  require_even(length);
  if (length > 26) throw ConfigError("full Hilbert space too large");
  std::vector<std::uint64_t> states(std::uint64_t{1} << length);
  for (std::uint64_t i = 0; i < states.size(); ++i) states[i] = i;
  return {length, std::move(states)};
}

std::size_t BasisSubset::find(std::uint64_t index) const {
  if (full_) return index < states_.size() ? static_cast<std::size_t>(index) : npos;
  auto it = std::lower_bound(states_.begin(), states_.end(), index);
  if (it == states_.end() || *it != index) return npos;
  return static_cast<std::size_t>(it - states_.begin());
}

bool BasisSubset::contains(std::uint64_t index) const { return find(index) != npos; }

std::size_t BasisSubset::position(std::uint64_t index) const {
  const auto pos = find(index);
  if (pos == npos) {
    throw NumericalGuardError("state " + BasisState(index, length_).bits() +
                              " is not in the basis subset");
  }
  return pos;
}

std::uint64_t BasisSubset::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(length_));
  for (auto s : states_) mix(s);
  return h;
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return std::sqrt(acc);
}

StateVector StateVector::basis(std::shared_ptr<const BasisSubset> subset, std::uint64_t index) {
  StateVector v;
  v.amplitudes.assign(subset->size(), cplx{});
  v.amplitudes[subset->position(index)] = 1.0;
  v.subset = std::move(subset);
  return v;
}

}  // namespace scarforge
