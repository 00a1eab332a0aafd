#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "wsn/error.hpp"
#include "wsn/series.hpp"

using wsn::Series;

TEST_CASE("difference of a constant series is zero") {
  Series s{{5.0, 5.0, 5.0}};
  const Series d = wsn::difference(s, 1);
  CHECK(d.values == std::vector<double>{0.0, 0.0});
  CHECK(d.start_tick == 1);
}

TEST_CASE("second difference of a quadratic sequence is constant") {
  Series s{{1.0, 2.0, 4.0, 7.0}};
  const Series d = wsn::difference(s, 2);
  CHECK(d.values == std::vector<double>{1.0, 1.0});
}

TEST_CASE("difference with d=0 is the identity") {
  Series s = testgen::quantized_uniform(7, 40, -10.0, 10.0);
  const Series d = wsn::difference(s, 0);
  CHECK(d.values == s.values);
}

TEST_CASE("difference rejects series that are too short") {
  Series s{{1.0, 2.0}};
  CHECK_THROWS_AS(wsn::difference(s, 2), wsn::LengthError);
  CHECK_THROWS_AS(wsn::difference(Series{}, 0), wsn::LengthError);
}

TEST_CASE("integrate inverts the documented examples") {
  const double init1[] = {5.0};
  const Series a = wsn::integrate(Series{{0.0, 0.0}, 1}, init1, 1);
  CHECK(a.values == std::vector<double>{5.0, 5.0, 5.0});

  const double init2[] = {1.0, 2.0};
  const Series b = wsn::integrate(Series{{1.0, 1.0}, 2}, init2, 2);
  CHECK(b.values == std::vector<double>{1.0, 2.0, 4.0, 7.0});
}

TEST_CASE("integrate rejects a wrong number of initial values") {
  const double init[] = {1.0};
  CHECK_THROWS_AS(wsn::integrate(Series{{1.0}}, init, 2), wsn::ArityError);
}

TEST_CASE("roundtrip on a 100-point pseudo-random series is bit-identical") {
  // Positive same-magnitude values: first differences are exact (Sterbenz).
  wsn::GaussianSampler rng(42);
  Series s;
  for (int i = 0; i < 100; ++i) s.values.push_back(15.0 + 10.0 * rng.uniform());
  const Series d = wsn::difference(s, 1);
  const double init[] = {s.values[0]};
  const Series back = wsn::integrate(d, init, 1);
  REQUIRE(back.values.size() == s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    CHECK(back.values[i] == s.values[i]);
  }
}

TEST_CASE("difference/integrate roundtrip is exact for d <= 3") {
  // Quantized samples keep every intermediate difference representable, so
  // the roundtrip must be bit-identical, not merely close.
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Series s = testgen::quantized_uniform(seed, 64, -100.0, 100.0);
    for (int d = 0; d <= 3; ++d) {
      const Series diffed = wsn::difference(s, d);
      const Series back = wsn::integrate(
          diffed, std::span<const double>(s.values.data(), static_cast<std::size_t>(d)), d);
      REQUIRE(back.values.size() == s.values.size());
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(back.values[i] == s.values[i]);
      }
    }
  }
}
