#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "sifair/error.hpp"
#include "sifair/metrics.hpp"

using namespace sifair;

namespace {

// Pairwise-difference definition, O(n^2).
double gini_pairwise(const std::vector<double>& v) {
  double mean = 0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (mean == 0) return 0;
  double sum = 0;
  for (const double a : v) {
    for (const double b : v) sum += std::abs(a - b);
  }
  return sum / (2.0 * static_cast<double>(v.size() * v.size()) * mean);
}

Request in_group(RequestId id, GroupId g) {
  Request r;
  r.id = id;
  r.group = g;
  return r;
}

}  // namespace

TEST_CASE("gini hand values") {
  CHECK(gini(std::vector<double>{3, 3, 3, 3}) == 0.0);
  CHECK(std::abs(gini(std::vector<double>{0, 1}) - 0.5) <= 1e-12);
  for (std::size_t n = 1; n <= 50; ++n) {
    std::vector<double> v(n, 0.0);
    v.back() = 1;
    CHECK(std::abs(gini(v) - static_cast<double>(n - 1) / static_cast<double>(n)) <= 1e-12);
  }
  CHECK(gini(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(gini(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(gini(std::vector<double>{1, -1}), InputError);
}

TEST_CASE("gini agrees with the pairwise definition, scale and order free") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 30);
    for (auto& x : v) x = u(rng);
    const double g = gini(v);
    CHECK(g == doctest::Approx(gini_pairwise(v)).epsilon(1e-12));
    CHECK(g >= 0);
    CHECK(g <= 1);
    const double c = 0.01 + u(rng);
    std::vector<double> scaled = v;
    for (auto& x : scaled) x *= c;
    CHECK(std::abs(gini(scaled) - g) <= 1e-12);
    std::vector<double> shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(gini(shuffled) == g);
  }
}

TEST_CASE("variance") {
  CHECK(variance(std::vector<double>{0.4, 0.8}) == doctest::Approx(0.04));
  CHECK(variance(std::vector<double>{5}) == 0.0);
  CHECK_THROWS_AS(variance(std::vector<double>{}), InputError);
}

TEST_CASE("passenger history updates") {
  PassengerHistory h(2);
  SUBCASE("empty batch") {
    h.update({}, {});
    CHECK(h.observed_count() == 0);
    CHECK(h.total_requested() == 0);
    CHECK(h.mean() == 0.0);
  }
  SUBCASE("one of two served") {
    const std::vector<Request> b{in_group(0, {0, 1}), in_group(1, {0, 1})};
    const std::vector<RequestId> served{1};
    h.update(b, served);
    CHECK(h.rate(h.group_index({0, 1})) == 0.5);
    CHECK(h.observed_count() == 1);
    CHECK(h.mean() == 0.5);
    // Unobserved groups report the mean.
    CHECK(h.rate(h.group_index({1, 1})) == 0.5);
  }
  SUBCASE("mean over observed groups") {
    h.seed(0, 10, 4);
    h.seed(3, 10, 8);
    CHECK(h.mean() == doctest::Approx(0.6));
    CHECK(h.total_requested() == 20);
    CHECK(h.total_served() == 12);
  }
  SUBCASE("contract checks") {
    const std::vector<Request> b{in_group(0, {0, 0})};
    const std::vector<RequestId> stray{9};
    CHECK_THROWS_AS(h.update(b, stray), ContractError);
    const std::vector<Request> outside{in_group(0, {2, 0})};
    CHECK_THROWS_AS(h.update(outside, {}), ContractError);
    CHECK_THROWS_AS(h.seed(0, 1, 2), InputError);
  }
}

TEST_CASE("history updates commute with batch splitting; mean stays in range") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int areas = 1 + static_cast<int>(rng() % 3);
    std::vector<Request> b;
    std::vector<RequestId> served;
    for (RequestId id = 0; id < 40; ++id) {
      b.push_back(in_group(id, {static_cast<AreaId>(rng() % areas), static_cast<AreaId>(rng() % areas)}));
      if (rng() % 2) served.push_back(id);
    }
    PassengerHistory whole(areas);
    whole.update(b, served);

    PassengerHistory parts(areas);
    std::size_t start = 0;
    while (start < b.size()) {
      const std::size_t len = std::min<std::size_t>(1 + rng() % 10, b.size() - start);
      std::span<const Request> piece(b.data() + start, len);
      std::vector<RequestId> piece_served;
      for (const auto id : served) {
        if (id >= static_cast<RequestId>(start) && id < static_cast<RequestId>(start + len)) {
          piece_served.push_back(id);
        }
      }
      parts.update(piece, piece_served);
      start += len;
    }
    for (std::size_t g = 0; g < whole.num_groups(); ++g) {
      CHECK(whole.requested(g) == parts.requested(g));
      CHECK(whole.served(g) == parts.served(g));
    }
    CHECK(whole.mean() == parts.mean());
    const auto rates = whole.observed_rates();
    CHECK(whole.mean() >= *std::min_element(rates.begin(), rates.end()) - 1e-12);
    CHECK(whole.mean() <= *std::max_element(rates.begin(), rates.end()) + 1e-12);
  }
}

TEST_CASE("driver history") {
  DriverHistory h(2);
  const std::vector<double> none{0, 0};
  h.update(none);
  CHECK(h.incomes() == std::vector<double>{0, 0});
  CHECK(h.scaled(0) == 0.0);
  CHECK(h.mean() == 0.0);

  const std::vector<double> rewards{0, 2};
  h.update(rewards);
  CHECK(h.scaled_incomes() == std::vector<double>{0, 1});
  CHECK(h.mean() == 0.5);
  CHECK(h.max_income() == 2.0);
  const std::vector<double> wrong{1};
  CHECK_THROWS_AS(h.update(wrong), ContractError);
  CHECK_THROWS_AS(h.set_income(0, -1), InputError);
}

TEST_CASE("equity reports") {
  PassengerHistory one(1);
  one.seed(0, 10, 7);
  const auto r1 = equity_report(one);
  CHECK(r1.f_gini == 1.0);
  CHECK(r1.min_value == doctest::Approx(0.7));
  CHECK(r1.variance == 0.0);
  REQUIRE(r1.overall_service_rate.has_value());
  CHECK(*r1.overall_service_rate == doctest::Approx(0.7));

  PassengerHistory two(2);
  two.seed(0, 10, 4);
  two.seed(3, 10, 8);
  const auto r2 = equity_report(two);
  CHECK(r2.variance == doctest::Approx(0.04));
  CHECK(r2.min_value == doctest::Approx(0.4));
  CHECK(r2.f_gini == doctest::Approx(1 - gini_pairwise({0.4, 0.8})));
  CHECK_THROWS_AS(equity_report(PassengerHistory(2)), InputError);

  DriverHistory d(3);
  for (std::size_t i = 0; i < 3; ++i) d.set_income(i, 5);
  CHECK(equity_report(d).f_gini == 1.0);
  CHECK(equity_report(d).min_value == 5.0);
  d.set_income(1, 10);
  const auto rd = equity_report(d);
  CHECK(rd.min_value == 5.0);
  CHECK(rd.f_gini == doctest::Approx(1 - gini_pairwise({0.5, 1.0, 0.5})));
  CHECK(rd.variance == doctest::Approx(variance(std::vector<double>{0.5, 1.0, 0.5})));
  CHECK_FALSE(rd.overall_service_rate.has_value());
}

TEST_CASE("metrics rows and csv") {
  PassengerHistory p(2);
  DriverHistory d(2);
  const auto empty = metrics_row(0, p, d);
  CHECK(empty.overall_service_rate == 1.0);
  CHECK(empty.passenger_f_gini == 1.0);
  CHECK(empty.passenger_min == 1.0);
  CHECK(empty.passenger_var == 0.0);

  p.seed(0, 4, 1);
  p.seed(1, 4, 3);
  d.set_income(0, 1);
  d.set_income(1, 3);
  const auto row = metrics_row(7, p, d);
  CHECK(row.window_index == 7);
  CHECK(row.overall_service_rate == 0.5);
  CHECK(row.passenger_min == 0.25);
  CHECK(row.driver_min_raw == 1.0);
  CHECK(metrics_csv_header() ==
        "window_index,overall_service_rate,passenger_f_gini,passenger_min,passenger_var,"
        "driver_f_gini,driver_min_raw,driver_var");
  const std::vector<MetricsRow> rows{empty, row};
  const auto text = metrics_csv(rows);
  CHECK(text.substr(0, metrics_csv_header().size()) == metrics_csv_header());
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(metrics_csv_line(row).substr(0, 6) == "7,0.5,");
}
