#include "momc/rng.hpp"

#include <cmath>

namespace momc {

namespace {

constexpr uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57;

inline uint32_t mulhi(uint32_t a, uint32_t b) { return uint32_t((uint64_t(a) * b) >> 32); }

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const uint32_t lo0 = kPhiloxM4x32A * ctr[0];
    const uint32_t hi0 = mulhi(kPhiloxM4x32A, ctr[0]);
    const uint32_t lo1 = kPhiloxM4x32B * ctr[2];
    const uint32_t hi1 = mulhi(kPhiloxM4x32B, ctr[2]);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return ctr;
}

double uniform01(uint64_t seed, uint64_t rep, uint64_t step, uint32_t channel) {
  const std::array<uint32_t, 4> ctr = {uint32_t(step), uint32_t(step >> 32),
                                       uint32_t(rep), uint32_t(rep >> 32) ^ channel};
  const std::array<uint32_t, 2> key = {uint32_t(seed), uint32_t(seed >> 32)};
  const std::array<uint32_t, 4> out = philox4x32(ctr, key);
  const uint64_t bits = (uint64_t(out[0]) << 32) | out[1];
  return double(bits >> 11) * 0x1.0p-53;
}

double normal_quantile(double u) {
  // rational approximation (Acklam), then one Halley step through erfc
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425, p_high = 1.0 - p_low;
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -1e308;
    if (u == 1.0) return 1e308;
    return std::nan("");
  }
  double x;
  if (u < p_low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= p_high) {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  const double v = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - v / (1.0 + x * v / 2.0);
}

}  // namespace momc
