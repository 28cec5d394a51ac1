#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ralab/heuristics.hpp"
#include "ralab/markov_oracle.hpp"
#include "ralab/theory_bounds.hpp"

using namespace ralab;

namespace {

bool has_status(const BoundReport& r, HypothesisStatus s) {
  for (const auto& h : r.validity) {
    if (h.status == s) return true;
  }
  return false;
}

}  // namespace

// Frozen values below come from 30-digit evaluations of the closed forms.

TEST_CASE("magnitude arithmetic") {
  const auto a = Magnitude::from_linear(200.0);
  const auto b = Magnitude::from_linear(50.0);
  CHECK((a * b).linear() == doctest::Approx(1e4));
  CHECK((a + b).linear() == doctest::Approx(250.0));
  CHECK(b <= a);
  CHECK(Magnitude{400.0}.ln() == doctest::Approx(400.0 * std::log(10.0)));
  CHECK(std::isinf(Magnitude{400.0}.linear()));
}

TEST_CASE("onemax-ma main term") {
  const BoundReport r = onemax_ma_bound(100, 20.0);
  CHECK(r.main_term.linear() == doctest::Approx(3428.7802006503412).epsilon(1e-12));
  CHECK(r.asymptotic_slack);
  CHECK(has_status(r, HypothesisStatus::Asymptotic));
  CHECK(onemax_ma_bound(100, 200.0).main_term.linear() == doctest::Approx(100 * std::log(100.0)).epsilon(1e-12));
  CHECK(r.derived_value("indicator_alpha_le_n") == 1.0);
  CHECK_FALSE(r.derived_value("nope").has_value());
  CHECK_THROWS_AS(onemax_ma_bound(100, 1.0), std::invalid_argument);
}

TEST_CASE("positive drift phase") {
  const BoundReport r = posdrift_bounds(100, 20.0);
  CHECK(r.upper->linear() == doctest::Approx(533.82573199886584).epsilon(1e-12));
  CHECK(r.lower->linear() == doctest::Approx(299.57322735539910).epsilon(1e-12));
  CHECK(r.derived_value("k") == 5.0);
  const BoundReport inf = posdrift_bounds(100, kInfiniteAlpha);
  CHECK_FALSE(inf.lower.has_value());
  CHECK(inf.upper->linear() == doctest::Approx(100 * (std::log(100.0) + 1)).epsilon(1e-12));
}

TEST_CASE("e1 bounds") {
  const BoundReport r = e1_bounds(100, 50.0);
  CHECK(r.upper->linear() == doctest::Approx(369.45280494653251).epsilon(1e-12));
  CHECK(r.lower->linear() == doctest::Approx(174.67940084106493).epsilon(1e-12));
  const BoundReport big = e1_bounds(100, 200.0);
  CHECK(big.upper->linear() == doctest::Approx(200.0).epsilon(1e-12));
  const BoundReport tiny = e1_bounds(100, 10.0);
  CHECK(tiny.lower.has_value());
  const BoundReport flat = e1_bounds(10, 100.0);
  CHECK_FALSE(flat.lower.has_value());
}

TEST_CASE("E_1 expansion brackets the exact value") {
  const std::size_t n = 40;
  for (double alpha : {20.0, 50.0}) {
    const HittingTimes h = expected_upgrade_times(build_level_chain(ProblemInstance::onemax(n), alpha));
    for (std::size_t ell : {1, 2, 5, 10}) {
      const Magnitude upper = e1_expansion(n, alpha, ell, Magnitude::from_linear(static_cast<double>(h.E[ell + 1])));
      CHECK(static_cast<double>(h.E[1]) <= upper.linear() * (1 + 1e-12));
    }
  }
  const HittingTimes h = expected_upgrade_times(build_level_chain(ProblemInstance::onemax(n), 20.0));
  const Magnitude at5 = e1_expansion(n, 20.0, 5, Magnitude::from_linear(static_cast<double>(h.E[6])));
  CHECK(static_cast<double>(h.E[1]) / at5.linear() >= 0.9);
  CHECK(e1_expansion(n, kInfiniteAlpha, 3, Magnitude::from_linear(1e9)).linear() == doctest::Approx(40.0));
  // ell = 1: n + (n/alpha) E_2.
  CHECK(e1_expansion(10, 5.0, 1, Magnitude::from_linear(7.0)).linear() == doctest::Approx(10 + 2 * 7.0));
}

TEST_CASE("cliff-ma regime 1") {
  const double alpha = std::numbers::e * 100 / 8;
  const BoundReport r = cliff_ma_bounds(100, 10, 1.5, alpha);
  CHECK(r.derived_value("part") == 1.0);
  CHECK(r.lower->linear() == doctest::Approx(31788.950475190916).epsilon(1e-11));
  CHECK(r.upper->linear() == doctest::Approx(53709.648098378032).epsilon(1e-11));
  CHECK(*r.derived_value("k_star") == doctest::Approx(2.8588971699128073).epsilon(1e-12));
  CHECK(*r.derived_value("beta_hat") == doctest::Approx(6.8533476804605602).epsilon(1e-12));
  CHECK(r.derived_value("upper_constant") == doctest::Approx(5.0 / 3.0));
  CHECK(r.main_term.log10 == r.lower->log10);

  const BoundReport s = cliff_ma_bounds(100, 6, 1.0, std::numbers::e * 100 / 4);
  CHECK(s.lower->linear() == doctest::Approx(32770.088686428352).epsilon(1e-11));
  CHECK(s.upper->linear() == doctest::Approx(53200.990505900800).epsilon(1e-11));
}

TEST_CASE("cliff-ma regime 2") {
  const BoundReport r = cliff_ma_bounds(1000, 5, 2.0, 50.0);
  CHECK(r.derived_value("part") == 2.0);
  CHECK(r.upper->linear() == doctest::Approx(3032282471311189.2).epsilon(1e-11));
  CHECK(r.lower->linear() == doctest::Approx(269373682295525.37).epsilon(1e-11));
  CHECK(r.main_term.log10 == r.upper->log10);
}

TEST_CASE("cliff-ma on both sides of the regime boundary") {
  const std::size_t n = 100;
  const std::size_t m = 6;
  const double boundary = static_cast<double>(n) / (m + 1) - 1.0;
  const BoundReport below = cliff_ma_bounds(n, m, 1.0, boundary * 0.999);
  const BoundReport above = cliff_ma_bounds(n, m, 1.0, boundary * 1.001);
  CHECK(below.derived_value("part") == 2.0);
  CHECK(above.derived_value("part") == 1.0);
  for (const auto* r : {&below, &above}) {
    CHECK(std::isfinite(r->lower->log10));
    CHECK(std::isfinite(r->upper->log10));
    CHECK(r->lower->linear() > 0);
    CHECK(r->lower->log10 <= r->upper->log10);
  }
}

TEST_CASE("cliff-ma preconditions") {
  CHECK_THROWS_AS(cliff_ma_bounds(100, 6, 0.5, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(cliff_ma_bounds(100, 6, 5.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(cliff_ma_bounds(100, 6, 1.0, kInfiniteAlpha), std::invalid_argument);
  CHECK_THROWS_AS(cliff_ma_bounds(100, 6, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("cliff-ea bound") {
  const BoundReport r = cliff_ea_bound(100, 10, 3.0, 0.01);
  CHECK(r.upper->linear() == doctest::Approx(103100876.75158560).epsilon(1e-11));
  CHECK(std::pow(10.0, *r.derived_value("term1_log10")) == doctest::Approx(1516.0186296177584).epsilon(1e-11));
  CHECK(std::pow(10.0, *r.derived_value("term2_log10")) == doctest::Approx(103099360.73295598).epsilon(1e-11));
  CHECK(r.derived_value("jump") == 5.0);
  CHECK_FALSE(r.asymptotic_slack);
  CHECK(cliff_ea_bound(100, 8, 3.0, 0.05).upper->linear() == doctest::Approx(7486248.2990096192).epsilon(1e-11));
  CHECK_THROWS_AS(cliff_ea_bound(100, 8, 3.0, 0.5), std::invalid_argument);
}

TEST_CASE("cliff-ea bound increases in p beyond the optimal rate") {
  for (const auto& [m, d] : {std::pair{8UL, 3.0}, std::pair{12UL, 1.5}, std::pair{20UL, 4.0}}) {
    const double p_star = (std::floor(d) + 2) / 100.0;
    double last = cliff_ea_bound(100, m, d, p_star * 1.0001).upper->log10;
    for (double p = p_star * 1.02; p < 0.49; p *= 1.02) {
      const double now = cliff_ea_bound(100, m, d, p).upper->log10;
      CHECK(now > last);
      last = now;
    }
  }
}

TEST_CASE("optimal parameters") {
  const OptimalParameters o = optimal_parameters(100, 10, 1.5);
  CHECK(*o.alpha_star_case1_exact == doctest::Approx(31.908963466881133).epsilon(1e-12));
  CHECK(*o.alpha_star_case1_asym == doctest::Approx(33.978522855738065).epsilon(1e-12));
  CHECK(*o.alpha_star_case2 == doctest::Approx(25.0));
  CHECK(*o.p_star == doctest::Approx(0.03));
  const OptimalParameters degenerate = optimal_parameters(100, 5, 3.0);
  CHECK_FALSE(degenerate.alpha_star_case1_exact.has_value());
  CHECK_FALSE(degenerate.notes.empty());
}
