#include "momc/spaces.hpp"

#include <cmath>
#include <sstream>

#include "momc/errors.hpp"

namespace momc {

std::string state_to_string(const State& s) {
  std::ostringstream os;
  os.precision(17);
  if (std::holds_alternative<int64_t>(s)) {
    os << std::get<int64_t>(s);
  } else if (std::holds_alternative<double>(s)) {
    os << std::get<double>(s);
  } else if (std::holds_alternative<LatticePoint>(s)) {
    const auto& v = std::get<LatticePoint>(s);
    os << "(";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
  } else {
    const auto& p = std::get<LayeredPoint>(s);
    os << "(" << p.layer << "," << p.x << ")";
  }
  return os.str();
}

bool state_equal(const State& a, const State& b) { return a == b; }

bool FinitePosetSpace::leq(const State& a, const State& b) const {
  return poset_->leq(int(std::get<int64_t>(a)), int(std::get<int64_t>(b)));
}

bool FinitePosetSpace::contains(const State& s) const {
  if (!std::holds_alternative<int64_t>(s)) return false;
  const int64_t i = std::get<int64_t>(s);
  return i >= 0 && i < poset_->size();
}

double FinitePosetSpace::distance(const State& a, const State& b) const {
  return state_equal(a, b) ? 0.0 : 1.0;
}

bool RealIntervalSpace::leq(const State& a, const State& b) const {
  return std::get<double>(a) <= std::get<double>(b);
}

bool RealIntervalSpace::contains(const State& s) const {
  if (!std::holds_alternative<double>(s)) return false;
  const double x = std::get<double>(s);
  return std::isfinite(x) && x >= lo_ && x <= hi_;
}

double RealIntervalSpace::distance(const State& a, const State& b) const {
  return std::abs(std::get<double>(a) - std::get<double>(b));
}

bool IntLatticeSpace::leq(const State& a, const State& b) const {
  const auto& u = std::get<LatticePoint>(a);
  const auto& v = std::get<LatticePoint>(b);
  for (int k = 0; k < dim_; ++k)
    if (u[k] > v[k]) return false;
  return true;
}

bool IntLatticeSpace::contains(const State& s) const {
  return std::holds_alternative<LatticePoint>(s) && int(std::get<LatticePoint>(s).size()) == dim_;
}

double IntLatticeSpace::distance(const State& a, const State& b) const {
  const auto& u = std::get<LatticePoint>(a);
  const auto& v = std::get<LatticePoint>(b);
  double d = 0.0;
  for (int k = 0; k < dim_; ++k) d += std::abs(double(u[k] - v[k]));
  return d;
}

double LayeredSpace::layer_gap(int64_t i, int64_t j) {
  if (i >= j) throw DomainError("layer_gap requires i < j");
  // ldexp underflows cleanly to 0 for exponents below the double range,
  // which is the correct saturation for astronomically deep layers
  const double twoj = std::ldexp(1.0, j > 1100 ? -1100 : int(-j));
  if (i == 0) return twoj;
  const double twoi = std::ldexp(1.0, i > 1100 ? -1100 : int(-i));
  return twoi - twoj;
}

bool LayeredSpace::leq(const State& a, const State& b) const {
  const auto& p = std::get<LayeredPoint>(a);
  const auto& q = std::get<LayeredPoint>(b);
  if (p.layer == q.layer) return p.x <= q.x;
  // lower layer below higher layer: real parts must be separated by the gap
  if (p.layer < q.layer) return q.x >= p.x + layer_gap(p.layer, q.layer);
  // higher layer below lower layer: mirrored separation
  return p.x <= q.x - layer_gap(q.layer, p.layer);
}

bool LayeredSpace::contains(const State& s) const {
  if (!std::holds_alternative<LayeredPoint>(s)) return false;
  const auto& p = std::get<LayeredPoint>(s);
  return p.layer >= 0 && std::isfinite(p.x);
}

double LayeredSpace::distance(const State& a, const State& b) const {
  const auto& p = std::get<LayeredPoint>(a);
  const auto& q = std::get<LayeredPoint>(b);
  return std::abs(double(p.layer - q.layer)) + std::abs(p.x - q.x);
}

}  // namespace momc
