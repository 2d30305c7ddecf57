#include <cmath>

#include "doctest.h"
#include "sifair/demand.hpp"
#include "sifair/error.hpp"
#include "testing.hpp"

using namespace sifair;
using sifair::testing::TempDir;

namespace {

bool same(const Request& a, const Request& b) {
  return a.id == b.id && a.pickup == b.pickup && a.dropoff == b.dropoff && a.arrival == b.arrival &&
         a.group == b.group && a.value == b.value;
}

std::vector<Request> at_times(std::initializer_list<Seconds> times) {
  std::vector<Request> out;
  for (const auto t : times) {
    Request r;
    r.id = static_cast<RequestId>(out.size());
    r.arrival = t;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("load_requests") {
  const auto net = make_grid(3, 3, 60);
  const auto part = make_grid_partition(3, 3, 3, 2);
  TempDir dir("req");

  SUBCASE("single row") {
    const auto rs = load_requests(dir.write("r.csv", "0,5,30\n"), net, part);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].arrival == 30.0);
    CHECK(rs[0].pickup == 0);
    CHECK(rs[0].dropoff == 5);
    CHECK(rs[0].value == 1.0);
    CHECK(rs[0].group == group_of(part, 0, 5));
  }
  SUBCASE("sorted by arrival, ids in file order") {
    const auto rs = load_requests(dir.write("r.csv", "0,1,120\n2,3,60\n"), net, part);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].arrival == 60.0);
    CHECK(rs[0].id == 1);
    CHECK(rs[1].arrival == 120.0);
    CHECK(rs[1].id == 0);
  }
  SUBCASE("pickup equals dropoff") {
    CHECK_THROWS_AS(load_requests(dir.write("r.csv", "4,4,10\n"), net, part), ParseError);
  }
  SUBCASE("other malformed rows") {
    CHECK_THROWS_AS(load_requests(dir.write("r.csv", "0,99,10\n"), net, part), ParseError);
    CHECK_THROWS_AS(load_requests(dir.write("r.csv", "0,1,-1\n"), net, part), ParseError);
    CHECK_THROWS_AS(load_requests(dir.write("r.csv", "0,1\n"), net, part), ParseError);
  }
  SUBCASE("write then read") {
    DemandProfile prof;
    prof.rates.assign(part.num_groups(), 0.5);
    prof.horizon = 600;
    prof.seed = 3;
    const auto rs = synth_requests(prof, net, part);
    const auto p = dir.path() / "out.csv";
    write_requests(p, rs, net);
    const auto back = load_requests(p, net, part);
    REQUIRE(back.size() == rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) CHECK(same(back[i], rs[i]));
  }
}

TEST_CASE("pricing overrides values") {
  const auto net = make_grid(3, 3, 60);
  const auto part = make_single_area(net);
  TempDir dir("price");
  auto rs = load_requests(dir.write("r.csv", "0,1,0\n1,2,5\n2,3,9\n"), net, part);
  apply_pricing(rs, dir.write("p.csv", "0,1.5\n2,2.5\n"));
  CHECK(rs[0].value == 1.5);
  CHECK(rs[1].value == 1.0);
  CHECK(rs[2].value == 2.5);
  CHECK_THROWS_AS(apply_pricing(rs, dir.write("bad.csv", "0,-1\n")), ParseError);
}

TEST_CASE("synth_requests") {
  const auto net = make_grid(4, 4, 60);
  const auto part = make_grid_partition(4, 4, 2, 2);
  DemandProfile prof;
  prof.horizon = 3600;
  prof.seed = 11;

  SUBCASE("zero rates") {
    prof.rates.assign(part.num_groups(), 0.0);
    CHECK(synth_requests(prof, net, part).empty());
  }
  SUBCASE("deterministic and well formed") {
    prof.rates.assign(part.num_groups(), 0.3);
    const auto a = synth_requests(prof, net, part);
    const auto b = synth_requests(prof, net, part);
    REQUIRE(a.size() == b.size());
    REQUIRE(!a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(same(a[i], b[i]));
      CHECK(a[i].id == static_cast<RequestId>(i));
      CHECK(a[i].pickup != a[i].dropoff);
      CHECK(a[i].arrival >= 0);
      CHECK(a[i].arrival < prof.horizon);
      CHECK(a[i].arrival == std::floor(a[i].arrival));
      CHECK(a[i].group == group_of(part, a[i].pickup, a[i].dropoff));
      if (i > 0) CHECK(a[i - 1].arrival <= a[i].arrival);
    }
    prof.seed = 12;
    const auto c = synth_requests(prof, net, part);
    bool differs = c.size() != a.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = !same(a[i], c[i]);
    CHECK(differs);
  }
  SUBCASE("only positive-rate groups appear") {
    prof.rates.assign(part.num_groups(), 0.0);
    prof.rates[part.group_index({1, 2})] = 1.0;
    for (const auto& r : synth_requests(prof, net, part)) CHECK(r.group == GroupId{1, 2});
  }
  SUBCASE("validation") {
    prof.rates.assign(3, 1.0);
    CHECK_THROWS_AS(synth_requests(prof, net, part), ConfigError);
    prof.rates.assign(part.num_groups(), -1.0);
    CHECK_THROWS_AS(synth_requests(prof, net, part), ConfigError);
    // A one-location area cannot host an intra-area trip.
    const auto tiny = make_grid_partition(1, 2, 1, 1);
    DemandProfile p2;
    p2.rates = {1.0, 0, 0, 0};
    CHECK_THROWS_AS(synth_requests(p2, make_grid(1, 2, 60), tiny), ConfigError);
  }
}

TEST_CASE("Poisson count concentrates around rate times steps") {
  const auto net = make_grid(3, 3, 60);
  const auto part = make_single_area(net);
  DemandProfile prof;
  prof.rates = {2.0};
  prof.step = 60;
  prof.horizon = 60 * 1000;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    prof.seed = seed;
    const auto n = static_cast<double>(synth_requests(prof, net, part).size());
    CHECK(std::abs(n - 2000.0) <= 3 * std::sqrt(2000.0));
  }
}

TEST_CASE("batch boundaries") {
  const auto rs = at_times({0, 59, 60});
  const auto b = batch(rs, 0, 60);
  REQUIRE(b.size() == 2);
  CHECK(b[0].arrival == 0.0);
  CHECK(b[1].arrival == 59.0);
  CHECK(batch(std::span<const Request>{}, 0, 60).empty());
  CHECK(batch(at_times({30}), 60, 60).empty());
}

TEST_CASE("consecutive windows partition the requests") {
  const auto net = make_grid(4, 4, 60);
  const auto part = make_single_area(net);
  DemandProfile prof;
  prof.rates = {1.7};
  prof.horizon = 7200;
  prof.seed = 5;
  const auto rs = synth_requests(prof, net, part);
  for (const Seconds len : {30.0, 60.0, 90.0}) {
    std::vector<RequestId> seen;
    for (Seconds start = 0; start < prof.horizon; start += len) {
      for (const auto& r : batch(rs, start, len)) {
        CHECK(r.arrival >= start);
        CHECK(r.arrival < start + len);
        seen.push_back(r.id);
      }
    }
    REQUIRE(seen.size() == rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) CHECK(seen[i] == rs[i].id);
  }
}
