#include "momc/dist.hpp"

#include <cmath>
#include <string>

namespace momc {

Dist::Dist(std::vector<double> p, double tol) : p_(std::move(p)), tol_(tol) {
  if (p_.empty()) throw DimensionMismatch("empty distribution");
  double sum = 0.0;
  for (double& v : p_) {
    if (!std::isfinite(v)) throw DimensionMismatch("non-finite probability entry");
    if (v < -tol_) throw DimensionMismatch("negative probability entry " + std::to_string(v));
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol_)
    throw DimensionMismatch("probabilities sum to " + std::to_string(sum) + ", not 1");
  if (sum != 1.0)
    for (double& v : p_) v /= sum;
}

Dist Dist::from_weights(const std::vector<double>& w) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DimensionMismatch("weights must be finite and nonnegative");
    sum += v;
  }
  if (sum <= 0.0) throw DimensionMismatch("weights sum to zero");
  std::vector<double> p(w);
  for (double& v : p) v /= sum;
  return Dist(std::move(p));
}

Dist Dist::dirac(int n, int i) {
  if (i < 0 || i >= n) throw DimensionMismatch("dirac index out of range");
  std::vector<double> p(n, 0.0);
  p[i] = 1.0;
  return Dist(std::move(p));
}

double Dist::mass(const UpSet& s) const {
  if (s.ground_size() != size()) throw DimensionMismatch("up-set over different ground set");
  double m = 0.0;
  for (int i = 0; i < size(); ++i)
    if (s.contains(i)) m += p_[i];
  return m;
}

double Dist::l1_distance(const Dist& other) const {
  if (other.size() != size()) throw DimensionMismatch("distributions over different ground sets");
  double d = 0.0;
  for (int i = 0; i < size(); ++i) d += std::abs(p_[i] - other.p_[i]);
  return d;
}

}  // namespace momc
