#pragma once

#include <vector>

#include "momc/poset.hpp"

namespace momc {

// Probability distribution over poset states.  Inputs are validated against
// `tol` (entries >= -tol, total mass within tol of 1), tiny negatives are
// clamped to zero and the vector is renormalized on construction.
class Dist {
 public:
  explicit Dist(std::vector<double> p, double tol = 1e-9);

  // normalizes arbitrary nonnegative weights with positive sum
  static Dist from_weights(const std::vector<double>& w);
  static Dist dirac(int n, int i);

  int size() const { return int(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }
  double tol() const { return tol_; }

  double mass(const UpSet& s) const;
  double l1_distance(const Dist& other) const;

 private:
  std::vector<double> p_;
  double tol_;
};

}  // namespace momc
