#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "momc/errors.hpp"

namespace momc {

// Finite partial order on states {0..n-1}.  The relation is stored as one
// bitset row per element: up_[i] = { j : i <= j }.  Construction validates
// reflexivity, antisymmetry and transitivity.
class Poset {
 public:
  // relation given as a full boolean matrix (row-major n*n, entry i*n+j means i <= j).
  static Poset from_matrix(int n, const std::vector<uint8_t>& leq);

  // relation given as a pair list; the reflexive-transitive closure is taken
  // before validation, so either the reduction or the full relation works.
  static Poset from_pairs(int n, const std::vector<std::pair<int, int>>& pairs);

  static Poset chain(int n);       // total order 0 < 1 < ... < n-1
  static Poset antichain(int n);   // trivial order (only i <= i)

  int size() const { return n_; }
  int words() const { return words_; }

  bool leq(int i, int j) const { return (up_[size_t(i) * words_ + (j >> 6)] >> (j & 63)) & 1u; }

  // bitset rows of the relation
  const uint64_t* up_row(int i) const { return up_.data() + size_t(i) * words_; }
  const uint64_t* down_row(int i) const { return down_.data() + size_t(i) * words_; }

  // covering pairs (transitive reduction), sorted lexicographically
  const std::vector<std::pair<int, int>>& covers() const { return covers_; }

  bool is_total_order() const;
  bool is_trivial_order() const;

  // number of comparable ordered pairs (i, j), i != j, i <= j
  int64_t relation_size() const;

 private:
  Poset() = default;
  void finish();  // builds down_, covers_; validates axioms

  int n_ = 0;
  int words_ = 0;
  std::vector<uint64_t> up_;
  std::vector<uint64_t> down_;
  std::vector<std::pair<int, int>> covers_;
};

using PosetPtr = std::shared_ptr<const Poset>;

// Subset of poset elements closed upward.  Stored as a dynamic bitset (a
// single machine word when n <= 64); indices() gives the sorted element list.
class UpSet {
 public:
  UpSet() = default;
  UpSet(int n, std::vector<uint64_t> bits) : n_(n), bits_(std::move(bits)) {}
  static UpSet empty(int n) { return UpSet(n, std::vector<uint64_t>((n + 63) / 64, 0)); }
  static UpSet from_indices(int n, const std::vector<int>& idx);

  int ground_size() const { return n_; }
  bool contains(int i) const { return (bits_[i >> 6] >> (i & 63)) & 1u; }
  void add(int i) { bits_[i >> 6] |= uint64_t(1) << (i & 63); }
  void remove(int i) { bits_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
  int count() const;
  std::vector<int> indices() const;
  const std::vector<uint64_t>& bits() const { return bits_; }
  std::vector<uint64_t>& bits() { return bits_; }

  bool operator==(const UpSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }

 private:
  int n_ = 0;
  std::vector<uint64_t> bits_;
};

// Plain subset of states.  Same bitset machinery; up-closedness is not implied.
using IndexSet = UpSet;

// True iff S is closed upward: i in S and i <= j imply j in S.
bool is_up_set(const Poset& poset, const UpSet& s);

// Upward closure of an arbitrary subset.
UpSet up_closure(const Poset& poset, const UpSet& s);
UpSet up_of(const Poset& poset, int i);    // { j : i <= j }
UpSet down_of_mask(const Poset& poset, int i);  // { j : j <= i }, as an UpSet-shaped bitset

// All up-sets of the poset, each exactly once (includes the empty set and
// the full set).  Throws CapExceeded if there are more than `cap` of them.
std::vector<UpSet> enumerate_up_sets(const Poset& poset, std::size_t cap = (std::size_t(1) << 20));

// A deterministic linear extension (indices ordered so predecessors come first).
std::vector<int> linear_extension(const Poset& poset);

}  // namespace momc
