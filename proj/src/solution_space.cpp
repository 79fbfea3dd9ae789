#include "gpo/solution_space.hpp"

#include <string>

#include "gpo/errors.hpp"

namespace gpo {

std::size_t SolutionHash::operator()(const Solution& s) const noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (Token t : s.tokens) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(t));
    h *= 0x100000001B3ULL;
  }
  return static_cast<std::size_t>(h);
}

SolutionSpace::SolutionSpace(std::vector<std::size_t> alphabet_sizes, EncodingKind kind)
    : alphabet_(std::move(alphabet_sizes)), kind_(kind) {
  if (alphabet_.empty()) throw Error(ErrorCode::BadRange, "solution space needs at least one position");
  std::uint64_t card = 1;
  bool overflow = false;
  for (std::size_t a : alphabet_) {
    if (a == 0) throw Error(ErrorCode::BadRange, "alphabet sizes must be positive");
    if (!overflow && __builtin_mul_overflow(card, static_cast<std::uint64_t>(a), &card)) overflow = true;
  }
  if (!overflow) cardinality_ = card;
}

SolutionSpace SolutionSpace::uniform(std::size_t positions, std::size_t alphabet, EncodingKind kind) {
  return SolutionSpace(std::vector<std::size_t>(positions, alphabet), kind);
}

bool SolutionSpace::contains(const Solution& s) const noexcept {
  if (s.size() != alphabet_.size()) return false;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (s.tokens[i] < 0 || static_cast<std::size_t>(s.tokens[i]) >= alphabet_[i]) return false;
  }
  return true;
}

void SolutionSpace::validate(const Solution& s) const {
  if (s.size() != alphabet_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "solution has " + std::to_string(s.size()) +
                                                  " tokens, space has " +
                                                  std::to_string(alphabet_.size()) + " positions");
  }
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (s.tokens[i] < 0 || static_cast<std::size_t>(s.tokens[i]) >= alphabet_[i]) {
      throw Error(ErrorCode::OutOfRange, "token " + std::to_string(s.tokens[i]) + " at position " +
                                             std::to_string(i) + " outside [0, " +
                                             std::to_string(alphabet_[i] - 1) + "]");
    }
  }
}

std::uint64_t SolutionSpace::index_of(const Solution& s) const {
  if (!cardinality_) throw Error(ErrorCode::CardinalityExceeded, "space size overflows 64 bits");
  validate(s);
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) idx = idx * alphabet_[i] + static_cast<std::uint64_t>(s.tokens[i]);
  return idx;
}

Solution SolutionSpace::solution_at(std::uint64_t index) const {
  if (!cardinality_ || index >= *cardinality_) throw Error(ErrorCode::OutOfRange, "solution index out of range");
  std::vector<Token> t(alphabet_.size());
  for (std::size_t i = alphabet_.size(); i-- > 0;) {
    t[i] = static_cast<Token>(index % alphabet_[i]);
    index /= alphabet_[i];
  }
  return Solution(std::move(t));
}

void for_each_solution(const SolutionSpace& space, std::uint64_t budget,
                       const std::function<void(std::uint64_t, const Solution&)>& visit) {
  auto card = space.cardinality();
  if (!card) throw Error(ErrorCode::CardinalityExceeded, "space size overflows 64 bits");
  if (*card > budget) {
    throw Error(ErrorCode::CardinalityExceeded,
                "space has " + std::to_string(*card) + " solutions, budget " + std::to_string(budget));
  }
  Solution s(std::vector<Token>(space.num_positions(), 0));
  for (std::uint64_t idx = 0; idx < *card; ++idx) {
    visit(idx, s);
    // odometer increment, last position fastest
    for (std::size_t i = space.num_positions(); i-- > 0;) {
      if (static_cast<std::size_t>(++s.tokens[i]) < space.alphabet_size(i)) break;
      s.tokens[i] = 0;
    }
  }
}

std::vector<Solution> enumerate(const SolutionSpace& space, std::uint64_t budget) {
  std::vector<Solution> out;
  if (auto card = space.cardinality(); card && *card <= budget) out.reserve(*card);
  for_each_solution(space, budget, [&](std::uint64_t, const Solution& s) { out.push_back(s); });
  return out;
}

Solution encode_durations(std::span<const int> durations, int min_value, const SolutionSpace& space) {
  if (durations.size() != space.num_positions()) {
    throw Error(ErrorCode::DimensionMismatch, "duration vector length does not match space");
  }
  std::vector<Token> t(durations.size());
  for (std::size_t i = 0; i < durations.size(); ++i) {
    long long tok = static_cast<long long>(durations[i]) - min_value;
    if (tok < 0 || static_cast<unsigned long long>(tok) >= space.alphabet_size(i)) {
      throw Error(ErrorCode::OutOfRange, "duration " + std::to_string(durations[i]) + " at position " +
                                             std::to_string(i) + " not representable");
    }
    t[i] = static_cast<Token>(tok);
  }
  return Solution(std::move(t));
}

std::vector<int> decode_durations(const Solution& s, int min_value) {
  std::vector<int> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = s.tokens[i] + min_value;
  return v;
}

}  // namespace gpo
