#include "ralab/benchmarks.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace ralab {

SearchPoint::SearchPoint(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {
  if (n == 0) throw std::invalid_argument("search point length must be positive");
}

SearchPoint SearchPoint::all_ones(std::size_t n) {
  SearchPoint x(n);
  for (auto& w : x.words_) w = ~std::uint64_t{0};
  x.clear_tail();
  return x;
}

std::size_t SearchPoint::count_ones() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

void SearchPoint::clear_tail() noexcept {
  const std::size_t used = n_ & 63;
  if (used != 0) words_.back() &= (std::uint64_t{1} << used) - 1;
}

std::string to_string(ProblemKind kind) {
  return kind == ProblemKind::OneMax ? "onemax" : "cliff";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "onemax") return ProblemKind::OneMax;
  if (name == "cliff") return ProblemKind::Cliff;
  throw std::invalid_argument("unknown problem '" + name + "' (expected onemax or cliff)");
}

ProblemInstance ProblemInstance::onemax(std::size_t n) {
  if (n < 1) throw std::invalid_argument("OneMax requires n >= 1");
  return ProblemInstance(ProblemKind::OneMax, n, std::nullopt, std::nullopt);
}

ProblemInstance ProblemInstance::cliff(std::size_t n, std::size_t m, double d) {
  if (m < 1 || m >= n) {
    throw std::invalid_argument("Cliff requires 1 <= m < n (got n=" + std::to_string(n) +
                                ", m=" + std::to_string(m) + ")");
  }
  if (!std::isfinite(d) || !(d > 0.0) || !(d < static_cast<double>(m) - 1.0)) {
    std::ostringstream msg;
    msg << "Cliff requires 0 < d < m - 1 (got d=" << d << ", m=" << m << ")";
    throw std::invalid_argument(msg.str());
  }
  return ProblemInstance(ProblemKind::Cliff, n, m, d);
}

std::string ProblemInstance::describe() const {
  std::ostringstream out;
  if (kind_ == ProblemKind::OneMax) {
    out << "OneMax(n=" << n_ << ")";
  } else {
    out << "Cliff(n=" << n_ << ", m=" << *m_ << ", d=" << *d_ << ")";
  }
  return out.str();
}

namespace {

void require_length(const ProblemInstance& instance, const SearchPoint& x) {
  if (x.size() != instance.n()) {
    throw ContractViolation("search point has length " + std::to_string(x.size()) +
                            " but the instance expects " + std::to_string(instance.n()));
  }
}

}  // namespace

double evaluate(const ProblemInstance& instance, const SearchPoint& x) {
  require_length(instance, x);
  return instance.fitness_of_ones(x.count_ones());
}

std::size_t distance(const ProblemInstance& instance, const SearchPoint& x) {
  require_length(instance, x);
  return x.count_zeros();
}

bool is_global_optimum(const ProblemInstance& instance, const SearchPoint& x) {
  return distance(instance, x) == 0;
}

}  // namespace ralab
