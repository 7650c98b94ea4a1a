#include <array>
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "momc/rng.hpp"

using namespace momc;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // reference vectors from the Random123 distribution (kat_vectors)
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
  CHECK(ones == std::array<uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform01 is a pure function of its address") {
  CHECK(uniform01(1, 2, 3, 0) == 0.86732097398475705);
  CHECK(uniform01(1, 2, 3, 1) == 0.7828516853705596);
  CHECK(uniform01(1, 2, 3, 0) == uniform01(1, 2, 3, 0));
  // distinct addresses decorrelate
  CHECK(uniform01(1, 2, 3, 0) != uniform01(1, 2, 4, 0));
  CHECK(uniform01(1, 2, 3, 0) != uniform01(1, 3, 3, 0));
  CHECK(uniform01(2, 2, 3, 0) != uniform01(1, 2, 3, 0));
}

TEST_CASE("uniform01 range and moments") {
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(42, uint64_t(i), 0, 0);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("RngStream matches the raw function") {
  const RngStream s(9, 4);
  CHECK(s.uniform(7, 1) == uniform01(9, 4, 7, 1));
}

TEST_CASE("normal quantile known values") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(0.841344746068543) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(normal_quantile(0.00134989803163009) == doctest::Approx(-3.0).epsilon(1e-11));
  CHECK(std::abs(normal_quantile(0.3) + normal_quantile(0.7)) <= 1e-13);
}

TEST_CASE("normal quantile is strictly increasing") {
  double prev = normal_quantile(1e-12);
  for (int i = 1; i <= 4000; ++i) {
    const double u = 1e-12 + (1.0 - 2e-12) * double(i) / 4000.0;
    const double q = normal_quantile(u);
    CHECK(q > prev);
    prev = q;
  }
  // dense local grid around the center and in a tail
  for (double base : {0.5, 0.9999}) {
    prev = normal_quantile(base);
    for (int i = 1; i <= 1000; ++i) {
      const double q = normal_quantile(base + i * 1e-11);
      CHECK(q >= prev);
      prev = q;
    }
  }
}
