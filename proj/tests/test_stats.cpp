#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "likesim/random.hpp"
#include "likesim/stats.hpp"

using namespace likesim;

namespace {

double box_muller(Engine& rng) {
  const double u1 = 1.0 - uniform_unit(rng);  // (0, 1], keeps the log finite
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> normal_sample(std::size_t n, Engine& rng) {
  std::vector<double> out(n);
  for (auto& x : out) x = box_muller(rng);
  return out;
}

struct Ev {
  std::string user, page;
  std::int64_t t;
};

std::vector<std::int64_t> lifetimes_of(const std::vector<Ev>& events) {
  return stats::lifetime_distribution(
      events, [](const Ev& e) { return std::string_view(e.user); },
      [](const Ev& e) { return std::string_view(e.page); },
      [](const Ev& e) { return e.t; });
}

}  // namespace

TEST_CASE("moments: symmetric data has zero skewness") {
  const std::vector<double> s{1.0, 2.0, 3.0};
  const auto m = stats::moments(s);
  CHECK(m.mean == 2.0);
  REQUIRE(m.skewness.has_value());
  CHECK(*m.skewness == 0.0);
}

TEST_CASE("moments: hand-computed n-denominator values") {
  // mean 3; variance (9+9+9+81)/4 = 27
  const std::vector<double> s{0.0, 0.0, 0.0, 12.0};
  const auto m = stats::moments(s);
  CHECK(m.mean == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m.variance == doctest::Approx(27.0).epsilon(1e-12));
}

TEST_CASE("moments: zero variance leaves standardized moments absent") {
  const std::vector<double> s{5.0, 5.0, 5.0, 5.0};
  const auto m = stats::moments(s);
  CHECK(m.mean == 5.0);
  CHECK(m.variance == 0.0);
  CHECK_FALSE(m.skewness.has_value());
  CHECK_FALSE(m.excess_kurtosis.has_value());
  CHECK_THROWS_AS(stats::moments({}), std::invalid_argument);
}

TEST_CASE("moments: standard normal sample has excess kurtosis near zero") {
  Engine rng(2024);
  const auto s = normal_sample(100'000, rng);
  const auto m = stats::moments(s);
  CHECK(std::abs(*m.excess_kurtosis) < 0.1);
  CHECK(std::abs(*m.skewness) < 0.05);
  CHECK(m.variance == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("moments: translation covariance to 1e-9 relative") {
  Engine rng(31);
  std::vector<double> s(1000);
  for (auto& x : s) x = uniform_unit(rng) * 100.0;
  const auto base = stats::moments(s);
  for (double shift : {3.5, -17.0, 1e6}) {
    std::vector<double> shifted = s;
    for (auto& x : shifted) x += shift;
    const auto m = stats::moments(shifted);
    CHECK(m.mean == doctest::Approx(base.mean + shift).epsilon(1e-9));
    CHECK(m.variance == doctest::Approx(base.variance).epsilon(1e-9));
    CHECK(*m.skewness == doctest::Approx(*base.skewness).epsilon(1e-9));
    CHECK(*m.excess_kurtosis ==
          doctest::Approx(*base.excess_kurtosis).epsilon(1e-9));
  }
}

TEST_CASE("moments: scale covariance to 1e-9 relative") {
  Engine rng(32);
  std::vector<double> s(1000);
  for (auto& x : s) x = uniform_unit(rng) * 10.0 - 5.0;
  const auto base = stats::moments(s);
  for (double scale : {2.0, 0.125, 3.25e3}) {
    std::vector<double> scaled = s;
    for (auto& x : scaled) x *= scale;
    const auto m = stats::moments(scaled);
    CHECK(m.variance ==
          doctest::Approx(base.variance * scale * scale).epsilon(1e-9));
    CHECK(*m.skewness == doctest::Approx(*base.skewness).epsilon(1e-9));
    CHECK(*m.excess_kurtosis ==
          doctest::Approx(*base.excess_kurtosis).epsilon(1e-9));
  }
}

TEST_CASE("jarque_bera: definition and hand-computed value") {
  CHECK(stats::jarque_bera(100, 0.0, 0.0) == 0.0);
  // 600/6 * (0.01 + 0.04/4) = 2
  CHECK(stats::jarque_bera(600, 0.1, 0.2) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("jarque_bera: large for an exponential sample") {
  Engine rng(55);
  std::vector<double> s(10'000);
  for (auto& x : s) x = -std::log(1.0 - uniform_unit(rng));
  // asymptotically S = 2, K = 6 -> JB ~ n/6 * (4 + 9)
  CHECK(stats::jarque_bera(s) > 1000.0);
}

TEST_CASE("jarque_bera: input errors") {
  const std::vector<double> few{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(stats::jarque_bera(few), std::invalid_argument);
  const std::vector<double> flat(10, 4.0);
  CHECK_THROWS_AS(stats::jarque_bera(flat), std::domain_error);
}

TEST_CASE("hill_tail_index: hand-evaluated log spacings") {
  // H = (ln e^3 + ln e^2 + ln e)/3 = 2, index = 1/2
  const std::vector<double> s{std::exp(3.0), std::exp(2.0), std::exp(1.0), 1.0};
  CHECK(stats::hill_tail_index(s, 3) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("hill_tail_index: recovers the exponent of exact Pareto data") {
  Engine rng(808);
  std::vector<double> s(100'000);
  for (auto& x : s) x = 1.0 / std::sqrt(1.0 - uniform_unit(rng));  // alpha = 2
  const double estimate = stats::hill_tail_index(s, 1000);
  CHECK(estimate == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::abs(estimate - 2.0) < 0.2);

  // error shrinks as k grows toward 1% of n
  const double err_small = std::abs(stats::hill_tail_index(s, 10) - 2.0);
  const double err_large = std::abs(stats::hill_tail_index(s, 1000) - 2.0);
  CHECK(err_large <= err_small);
}

TEST_CASE("hill_tail_index: domain errors") {
  const std::vector<double> s{8.0, 4.0, 2.0, 1.0};
  CHECK_THROWS_AS(stats::hill_tail_index(s, 1), std::invalid_argument);
  CHECK_THROWS_AS(stats::hill_tail_index(s, 4), std::invalid_argument);
  const std::vector<double> with_zero{8.0, 4.0, 0.0, -1.0};
  CHECK_THROWS_AS(stats::hill_tail_index(with_zero, 2), std::domain_error);
  const std::vector<double> flat{3.0, 3.0, 3.0, 3.0};
  CHECK_THROWS_AS(stats::hill_tail_index(flat, 2), std::domain_error);
}

TEST_CASE("classify_regime: threshold arithmetic") {
  using stats::Regime;
  CHECK(stats::classify_regime(0.1, 0.3, {}) == Regime::approx_gaussian);
  CHECK(stats::classify_regime(4.0, 30.0, {}) == Regime::heavy_tailed);
  CHECK(stats::classify_regime(1.0, 2.0, {}) == Regime::indeterminate);
  CHECK(stats::classify_regime(1.0, 2.0, 2.5) == Regime::heavy_tailed);
  // the Gaussian region wins when both tests would fire
  CHECK(stats::classify_regime(0.1, 0.3, 2.5) == Regime::approx_gaussian);
  const stats::RegimeThresholds tight{0.05, 0.1, 2.0, 3.0};
  CHECK(stats::classify_regime(0.1, 0.3, {}, tight) == Regime::indeterminate);
}

TEST_CASE("classify_regime: affine-invariant when no hill index is supplied") {
  Engine rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(500);
    const bool planted_heavy = trial % 2 == 0;
    for (auto& x : s)
      x = planted_heavy ? std::pow(1.0 - uniform_unit(rng), -1.0)
                        : box_muller(rng);
    const auto m = stats::moments(s);
    const auto base = stats::classify_regime(*m.skewness, *m.excess_kurtosis, {});
    const double scale = 0.5 + uniform_unit(rng) * 10.0;
    const double shift = uniform_unit(rng) * 200.0 - 100.0;
    for (auto& x : s) x = x * scale + shift;
    const auto t = stats::moments(s);
    CHECK(stats::classify_regime(*t.skewness, *t.excess_kurtosis, {}) == base);
  }
}

TEST_CASE("estimate_pdf: uniform sample, 10 bins, densities near 1") {
  Engine rng(6);
  std::vector<double> s(10'000);
  for (auto& x : s) x = uniform_unit(rng);
  const auto h = stats::estimate_pdf(s, 10);
  REQUIRE(h.densities.size() == 10);
  for (double d : h.densities) {
    CHECK(d > 0.85);
    CHECK(d < 1.15);
  }
}

TEST_CASE("estimate_pdf: two-point normalization arithmetic") {
  const std::vector<double> s{0.0, 1.0};
  const auto h = stats::estimate_pdf(s, 2);
  REQUIRE(h.densities.size() == 2);
  CHECK(h.densities[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.densities[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.bin_edges == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("estimate_pdf: density always integrates to one") {
  Engine rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> s(50 + uniform_below(rng, 2000));
    const double scale = std::pow(10.0, static_cast<double>(trial % 7) - 3.0);
    for (auto& x : s) x = uniform_unit(rng) * scale;
    const std::size_t bins = trial % 3 == 0 ? 0 : 1 + uniform_below(rng, 60);
    const auto h = stats::estimate_pdf(s, bins);
    double integral = 0.0;
    for (std::size_t i = 0; i < h.densities.size(); ++i)
      integral += h.densities[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("estimate_pdf: Freedman-Diaconis rule, hand-checked bin count") {
  // values 1..100: IQR = 49.5, width = 99/cbrt(100), 99/21.329 -> 5 bins
  std::vector<double> s(100);
  for (std::size_t i = 0; i < 100; ++i) s[i] = static_cast<double>(i + 1);
  CHECK(stats::freedman_diaconis_bins(s) == 5);
  CHECK(stats::estimate_pdf(s).densities.size() == 5);
}

TEST_CASE("estimate_pdf: sqrt fallback when the IQR collapses") {
  // 96 fives flanked by 1 and 9: IQR = 0, n = 98 -> ceil(sqrt(98)) = 10
  std::vector<double> s(96, 5.0);
  s.push_back(1.0);
  s.push_back(9.0);
  CHECK(stats::freedman_diaconis_bins(s) == 10);
}

TEST_CASE("estimate_pdf: degenerate inputs") {
  CHECK_THROWS_AS(stats::estimate_pdf({}), std::domain_error);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(stats::estimate_pdf(one), std::domain_error);
  const std::vector<double> flat(20, 3.0);
  CHECK_THROWS_AS(stats::estimate_pdf(flat), std::domain_error);
}

TEST_CASE("lifetime_distribution: span between first and last like") {
  CHECK(lifetimes_of({{"u1", "pA", 100}, {"u1", "pA", 500}}) ==
        std::vector<std::int64_t>{400});
  CHECK(lifetimes_of({{"u1", "pA", 123}}) == std::vector<std::int64_t>{0});
  CHECK(lifetimes_of({{"u1", "pA", 10},
                      {"u1", "pA", 20},
                      {"u1", "pB", 5},
                      {"u1", "pB", 905}}) ==
        std::vector<std::int64_t>{10, 900});
}

TEST_CASE("lifetime_distribution: invariant under event order") {
  Engine rng(17);
  std::vector<Ev> events;
  for (int i = 0; i < 200; ++i)
    events.push_back({"u" + std::to_string(uniform_below(rng, 12)),
                      "p" + std::to_string(uniform_below(rng, 4)),
                      static_cast<std::int64_t>(uniform_below(rng, 100'000))});
  const auto expected = lifetimes_of(events);
  for (int trial = 0; trial < 10; ++trial) {
    for (std::size_t i = events.size(); i > 1; --i)
      std::swap(events[i - 1], events[uniform_below(rng, i)]);
    CHECK(lifetimes_of(events) == expected);
  }
}

TEST_CASE("summarize_distribution: planted regimes get the right label") {
  Engine rng(2718);
  std::vector<double> pareto(5000);
  for (auto& x : pareto)
    x = std::pow(1.0 - uniform_unit(rng), -1.0 / 1.5);  // tail index 1.5
  const auto heavy = stats::summarize_distribution(pareto);
  CHECK(heavy.regime == stats::Regime::heavy_tailed);
  REQUIRE(heavy.hill_tail_index.has_value());
  CHECK(*heavy.hill_tail_index == doctest::Approx(1.5).epsilon(0.25));

  auto gaussian_like = normal_sample(5000, rng);
  for (auto& x : gaussian_like) x += 100.0;
  const auto gauss = stats::summarize_distribution(gaussian_like);
  CHECK(gauss.regime == stats::Regime::approx_gaussian);
  CHECK(gauss.jarque_bera.has_value());
}

TEST_CASE("summarize_distribution: degenerate and small inputs") {
  const std::vector<double> flat(20, 2.0);
  const auto s = stats::summarize_distribution(flat);
  CHECK(s.regime == stats::Regime::indeterminate);
  CHECK_FALSE(s.skewness.has_value());
  CHECK_FALSE(s.jarque_bera.has_value());
  CHECK(s.mean == 2.0);

  const std::vector<double> tiny{1.0, 2.0, 4.0};
  const auto t = stats::summarize_distribution(tiny);
  CHECK_FALSE(t.jarque_bera.has_value());  // below the n >= 8 gate
  CHECK(t.skewness.has_value());
}
