#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ralab {

/// Raised when a caller breaks a documented precondition (e.g. a search point
/// of the wrong length is handed to a fitness function).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Fixed-length bit string stored packed in 64-bit words.
///
/// Bits beyond `size()` in the last word are kept at zero so that popcount
/// and equality can work word-wise.
class SearchPoint {
 public:
  explicit SearchPoint(std::size_t n);

  static SearchPoint all_zeros(std::size_t n) { return SearchPoint(n); }
  static SearchPoint all_ones(std::size_t n);
  /// Bits taken from the low end of successive words produced by `next_word`.
  template <class WordSource>
  static SearchPoint from_words(std::size_t n, WordSource&& next_word) {
    SearchPoint x(n);
    for (auto& w : x.words_) w = next_word();
    x.clear_tail();
    return x;
  }

  std::size_t size() const noexcept { return n_; }
  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  /// Popcount from scratch. The heuristics keep a running count instead.
  std::size_t count_ones() const noexcept;
  std::size_t count_zeros() const noexcept { return n_ - count_ones(); }

  friend bool operator==(const SearchPoint&, const SearchPoint&) = default;

 private:
  void clear_tail() noexcept;

  std::size_t n_;
  std::vector<std::uint64_t> words_;
};

enum class ProblemKind { OneMax, Cliff };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);

/// OneMax(n) or Cliff_{d,m}(n). Parameters are validated on construction.
///
/// Cliff_{d,m}(x) = |x|_1 if |x|_1 <= n - m, and |x|_1 - d - 1 otherwise,
/// with 1 <= m < n and 0 < d < m - 1.
class ProblemInstance {
 public:
  static ProblemInstance onemax(std::size_t n);
  static ProblemInstance cliff(std::size_t n, std::size_t m, double d);

  ProblemKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }
  std::optional<std::size_t> m() const noexcept { return m_; }
  std::optional<double> d() const noexcept { return d_; }

  /// Fitness as a function of the one-count only; both benchmarks are
  /// permutation symmetric.
  double fitness_of_ones(std::size_t ones) const noexcept {
    if (kind_ == ProblemKind::Cliff && ones > n_ - *m_) {
      return static_cast<double>(ones) - *d_ - 1.0;
    }
    return static_cast<double>(ones);
  }

  std::string describe() const;

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;

 private:
  ProblemInstance(ProblemKind kind, std::size_t n, std::optional<std::size_t> m, std::optional<double> d)
      : kind_(kind), n_(n), m_(m), d_(d) {}

  ProblemKind kind_;
  std::size_t n_;
  std::optional<std::size_t> m_;
  std::optional<double> d_;
};

double evaluate(const ProblemInstance& instance, const SearchPoint& x);

/// Number of zero-bits, i.e. Hamming distance to the optimum 1^n.
std::size_t distance(const ProblemInstance& instance, const SearchPoint& x);

bool is_global_optimum(const ProblemInstance& instance, const SearchPoint& x);

}  // namespace ralab
