#pragma once

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "momc/poset.hpp"

namespace momc {

// Point on the integer lattice Z^d (componentwise order).
using LatticePoint = boost::container::small_vector<int64_t, 4>;

// Point of the layered space N_0 x R.
struct LayeredPoint {
  int64_t layer;
  double x;
  bool operator==(const LayeredPoint&) const = default;
};

// Dynamic state: finite-poset index, real value, lattice point, or layered point.
using State = std::variant<int64_t, double, LatticePoint, LayeredPoint>;

std::string state_to_string(const State& s);

// Ordered Polish space a chain lives on.  Immutable; shared by kernels.
class OrderedSpace {
 public:
  virtual ~OrderedSpace() = default;
  virtual bool leq(const State& a, const State& b) const = 0;
  virtual bool contains(const State& s) const = 0;
  // metric used for diagnostics (distance to a reference point etc.)
  virtual double distance(const State& a, const State& b) const = 0;
  virtual std::string name() const = 0;
};

using SpacePtr = std::shared_ptr<const OrderedSpace>;

class FinitePosetSpace final : public OrderedSpace {
 public:
  explicit FinitePosetSpace(PosetPtr poset) : poset_(std::move(poset)) {}
  bool leq(const State& a, const State& b) const override;
  bool contains(const State& s) const override;
  double distance(const State& a, const State& b) const override;
  std::string name() const override { return "finite_poset"; }
  const Poset& poset() const { return *poset_; }
  PosetPtr poset_ptr() const { return poset_; }

 private:
  PosetPtr poset_;
};

class RealIntervalSpace final : public OrderedSpace {
 public:
  RealIntervalSpace(double lo, double hi) : lo_(lo), hi_(hi) {}
  bool leq(const State& a, const State& b) const override;
  bool contains(const State& s) const override;
  double distance(const State& a, const State& b) const override;
  std::string name() const override { return "real_interval"; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
};

class IntLatticeSpace final : public OrderedSpace {
 public:
  explicit IntLatticeSpace(int dim) : dim_(dim) {}
  bool leq(const State& a, const State& b) const override;  // componentwise
  bool contains(const State& s) const override;
  double distance(const State& a, const State& b) const override;  // l1
  std::string name() const override { return "int_lattice"; }
  int dim() const { return dim_; }

 private:
  int dim_;
};

// Layers N_0 x R.  Within a layer the order is the real order.  Across layers
// i < j, a point of layer i sits below a point of layer j iff the real parts
// are separated by the dyadic gap h(i, j); symmetrically above.  Gaps:
//   h(0, j) = 2^-j,   h(i, j) = 2^-i - 2^-j  (i >= 1).
// Both forms are exact in double arithmetic while the exponents stay
// representable; far beyond that the gap saturates at the nearest double.
class LayeredSpace final : public OrderedSpace {
 public:
  static double layer_gap(int64_t i, int64_t j);  // requires i < j
  bool leq(const State& a, const State& b) const override;
  bool contains(const State& s) const override;
  double distance(const State& a, const State& b) const override;
  std::string name() const override { return "layered"; }
};

bool state_equal(const State& a, const State& b);

}  // namespace momc
