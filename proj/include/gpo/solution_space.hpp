#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gpo {

using Token = std::int32_t;

/// Fixed-length token sequence. Validity is always relative to a SolutionSpace.
struct Solution {
  std::vector<Token> tokens;

  Solution() = default;
  explicit Solution(std::vector<Token> t) : tokens(std::move(t)) {}

  std::size_t size() const noexcept { return tokens.size(); }
  Token operator[](std::size_t i) const { return tokens[i]; }

  friend bool operator==(const Solution&, const Solution&) = default;
  friend auto operator<=>(const Solution&, const Solution&) = default;
};

struct SolutionHash {
  std::size_t operator()(const Solution& s) const noexcept;
};

enum class EncodingKind { duration_vector, edge_subset, generic };

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 20;

class SolutionSpace {
 public:
  SolutionSpace(std::vector<std::size_t> alphabet_sizes, EncodingKind kind = EncodingKind::generic);

  static SolutionSpace uniform(std::size_t positions, std::size_t alphabet,
                               EncodingKind kind = EncodingKind::generic);

  std::size_t num_positions() const noexcept { return alphabet_.size(); }
  std::size_t alphabet_size(std::size_t position) const { return alphabet_.at(position); }
  const std::vector<std::size_t>& alphabet_sizes() const noexcept { return alphabet_; }
  EncodingKind encoding_kind() const noexcept { return kind_; }

  /// Product of alphabet sizes; empty when it does not fit in 64 bits.
  std::optional<std::uint64_t> cardinality() const noexcept { return cardinality_; }

  bool contains(const Solution& s) const noexcept;
  /// Throws DimensionMismatch / OutOfRange.
  void validate(const Solution& s) const;

  /// Lexicographic (mixed-radix) rank of s; requires a finite cardinality.
  std::uint64_t index_of(const Solution& s) const;
  Solution solution_at(std::uint64_t index) const;

  friend bool operator==(const SolutionSpace& a, const SolutionSpace& b) {
    return a.alphabet_ == b.alphabet_;
  }

 private:
  std::vector<std::size_t> alphabet_;
  EncodingKind kind_;
  std::optional<std::uint64_t> cardinality_;
};

/// All solutions in lexicographic token order. Throws CardinalityExceeded
/// when the space is larger than budget or its size overflows.
std::vector<Solution> enumerate(const SolutionSpace& space,
                                std::uint64_t budget = kDefaultEnumerationBudget);

/// Visits every solution in lexicographic order without materializing the list.
void for_each_solution(const SolutionSpace& space, std::uint64_t budget,
                       const std::function<void(std::uint64_t, const Solution&)>& visit);

// Duration vectors: token = v - min_value.
Solution encode_durations(std::span<const int> durations, int min_value, const SolutionSpace& space);
std::vector<int> decode_durations(const Solution& s, int min_value);

}  // namespace gpo
