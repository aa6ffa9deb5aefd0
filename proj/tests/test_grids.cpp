#include <cmath>

#include "doctest.h"
#include "hedgekit/common.hpp"
#include "hedgekit/grids.hpp"

using hedgekit::config_error;
using hedgekit::make_grid;
using hedgekit::parse_grid;

TEST_CASE("linear grid hits both endpoints with even spacing") {
  const auto g = make_grid(parse_grid("1:3:lin:5"));
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 3.0);
  CHECK(std::abs(g[1] - 1.5) <= 1e-15);
  CHECK(std::abs(g[2] - 2.0) <= 1e-15);
  CHECK(std::abs(g[3] - 2.5) <= 1e-15);
}

TEST_CASE("log grid spaces points evenly in ln space") {
  const auto g = make_grid(parse_grid("1:16:log:5"));
  REQUIRE(g.size() == 5);
  CHECK(std::abs(g[0] - 1.0) <= 1e-12);
  CHECK(std::abs(g[1] - 2.0) <= 1e-12);
  CHECK(std::abs(g[2] - 4.0) <= 1e-12);
  CHECK(std::abs(g[3] - 8.0) <= 1e-12);
  CHECK(std::abs(g[4] - 16.0) <= 1e-12);
}

TEST_CASE("count one degenerates to the low endpoint") {
  const auto g = make_grid(parse_grid("7:9:lin:1"));
  REQUIRE(g.size() == 1);
  CHECK(g[0] == 7.0);
}

TEST_CASE("malformed specs are configuration errors") {
  CHECK_THROWS_AS(parse_grid(""), config_error);
  CHECK_THROWS_AS(parse_grid("1:2:lin"), config_error);
  CHECK_THROWS_AS(parse_grid("1:2:cubic:5"), config_error);
  CHECK_THROWS_AS(parse_grid("2:1:lin:5"), config_error);     // hi < lo
  CHECK_THROWS_AS(parse_grid("0:4:log:5"), config_error);     // log needs lo > 0
  CHECK_THROWS_AS(parse_grid("-1:4:log:5"), config_error);
  CHECK_THROWS_AS(parse_grid("1:4:lin:0"), config_error);
  CHECK_THROWS_AS(parse_grid("a:4:lin:5"), config_error);
  CHECK_THROWS_AS(parse_grid("1:b:lin:5"), config_error);
  CHECK_THROWS_AS(parse_grid("1:4:lin:x"), config_error);
}

TEST_CASE("grids are strictly increasing") {
  for (const char* text : {"0.5:32:log:25", "0.01:100:log:60", "1:100:lin:200"}) {
    const auto g = make_grid(parse_grid(text));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  }
}
