#include "momc/poset.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace momc {

namespace {
constexpr int kMaxPosetSize = 4096;
}

Poset Poset::from_matrix(int n, const std::vector<uint8_t>& leq) {
  if (n <= 0 || n > kMaxPosetSize) throw DimensionMismatch("poset size out of range: " + std::to_string(n));
  if (leq.size() != size_t(n) * n) throw DimensionMismatch("relation matrix has wrong size");
  Poset p;
  p.n_ = n;
  p.words_ = (n + 63) / 64;
  p.up_.assign(size_t(n) * p.words_, 0);
  for (int i = 0; i < n; ++i) {
    if (!leq[size_t(i) * n + i])
      throw DimensionMismatch("relation is not reflexive at " + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      if (leq[size_t(i) * n + j]) p.up_[size_t(i) * p.words_ + (j >> 6)] |= uint64_t(1) << (j & 63);
    }
  }
  p.finish();
  return p;
}

Poset Poset::from_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
  if (n <= 0 || n > kMaxPosetSize) throw DimensionMismatch("poset size out of range: " + std::to_string(n));
  Poset p;
  p.n_ = n;
  p.words_ = (n + 63) / 64;
  p.up_.assign(size_t(n) * p.words_, 0);
  auto set = [&](int i, int j) { p.up_[size_t(i) * p.words_ + (j >> 6)] |= uint64_t(1) << (j & 63); };
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= n || j < 0 || j >= n) throw DimensionMismatch("pair index out of range");
    set(i, j);
  }
  for (int i = 0; i < n; ++i) set(i, i);
  // Warshall closure on bitset rows: if i <= k then up(i) |= up(k).
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if ((p.up_[size_t(i) * p.words_ + (k >> 6)] >> (k & 63)) & 1u) {
        uint64_t* ri = p.up_.data() + size_t(i) * p.words_;
        const uint64_t* rk = p.up_.data() + size_t(k) * p.words_;
        for (int w = 0; w < p.words_; ++w) ri[w] |= rk[w];
      }
    }
  }
  p.finish();
  return p;
}

Poset Poset::chain(int n) {
  std::vector<uint8_t> leq(size_t(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) leq[size_t(i) * n + j] = 1;
  return from_matrix(n, leq);
}

Poset Poset::antichain(int n) {
  std::vector<uint8_t> leq(size_t(n) * n, 0);
  for (int i = 0; i < n; ++i) leq[size_t(i) * n + i] = 1;
  return from_matrix(n, leq);
}

void Poset::finish() {
  const int n = n_, w = words_;
  // antisymmetry
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (leq(i, j) && leq(j, i))
        throw DimensionMismatch("relation is not antisymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  // transitivity: i <= j requires up(j) subset of up(i)
  for (int i = 0; i < n; ++i) {
    const uint64_t* ri = up_.data() + size_t(i) * w;
    for (int j = 0; j < n; ++j) {
      if (i == j || !leq(i, j)) continue;
      const uint64_t* rj = up_.data() + size_t(j) * w;
      for (int k = 0; k < w; ++k)
        if (rj[k] & ~ri[k]) throw DimensionMismatch("relation is not transitive below " + std::to_string(i));
    }
  }
  down_.assign(size_t(n) * w, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (leq(i, j)) down_[size_t(j) * w + (i >> 6)] |= uint64_t(1) << (i & 63);
  covers_.clear();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !leq(i, j)) continue;
      bool cover = true;
      for (int k = 0; k < n && cover; ++k)
        if (k != i && k != j && leq(i, k) && leq(k, j)) cover = false;
      if (cover) covers_.emplace_back(i, j);
    }
  }
}

bool Poset::is_total_order() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (!leq(i, j) && !leq(j, i)) return false;
  return true;
}

bool Poset::is_trivial_order() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j && leq(i, j)) return false;
  return true;
}

int64_t Poset::relation_size() const {
  int64_t total = 0;
  for (const uint64_t w : up_) total += std::popcount(w);
  return total - n_;
}

UpSet UpSet::from_indices(int n, const std::vector<int>& idx) {
  UpSet s = empty(n);
  for (int i : idx) {
    if (i < 0 || i >= n) throw DimensionMismatch("up-set index out of range");
    s.add(i);
  }
  return s;
}

int UpSet::count() const {
  int c = 0;
  for (uint64_t w : bits_) c += std::popcount(w);
  return c;
}

std::vector<int> UpSet::indices() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

bool is_up_set(const Poset& poset, const UpSet& s) {
  const int n = poset.size();
  for (int i = 0; i < n; ++i) {
    if (!s.contains(i)) continue;
    const uint64_t* up = poset.up_row(i);
    for (int w = 0; w < poset.words(); ++w)
      if (up[w] & ~s.bits()[w]) return false;
  }
  return true;
}

UpSet up_closure(const Poset& poset, const UpSet& s) {
  UpSet out = UpSet::empty(poset.size());
  for (int i = 0; i < poset.size(); ++i) {
    if (!s.contains(i)) continue;
    const uint64_t* up = poset.up_row(i);
    for (int w = 0; w < poset.words(); ++w) out.bits()[w] |= up[w];
  }
  return out;
}

UpSet up_of(const Poset& poset, int i) {
  UpSet s = UpSet::empty(poset.size());
  const uint64_t* up = poset.up_row(i);
  for (int w = 0; w < poset.words(); ++w) s.bits()[w] = up[w];
  return s;
}

UpSet down_of_mask(const Poset& poset, int i) {
  UpSet s = UpSet::empty(poset.size());
  const uint64_t* dn = poset.down_row(i);
  for (int w = 0; w < poset.words(); ++w) s.bits()[w] = dn[w];
  return s;
}

std::vector<int> linear_extension(const Poset& poset) {
  const int n = poset.size();
  std::vector<int> indeg(n, 0), order;
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && poset.leq(j, i)) ++indeg[i];
  std::vector<uint8_t> done(n, 0);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && indeg[i] == 0) { pick = i; break; }
    if (pick < 0) throw DimensionMismatch("relation has a cycle");
    done[pick] = 1;
    order.push_back(pick);
    for (int j = 0; j < n; ++j)
      if (!done[j] && poset.leq(pick, j)) --indeg[j];
  }
  return order;
}

std::vector<UpSet> enumerate_up_sets(const Poset& poset, std::size_t cap) {
  const int n = poset.size();
  const std::vector<int> ext = linear_extension(poset);
  std::vector<UpSet> out;
  // Assign membership along the linear extension.  An element whose strict
  // predecessor is already in the set is forced in; otherwise both choices
  // branch.  Every up-set is produced exactly once.
  UpSet cur = UpSet::empty(n);
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      if (out.size() >= cap) throw CapExceeded("up-set enumeration exceeded cap");
      out.push_back(cur);
      return;
    }
    const int e = ext[k];
    bool forced = false;
    for (int t = 0; t < k && !forced; ++t) {
      const int p = ext[t];
      if (cur.contains(p) && poset.leq(p, e)) forced = true;
    }
    if (forced) {
      cur.add(e);
      rec(k + 1);
      cur.remove(e);
    } else {
      rec(k + 1);
      cur.add(e);
      rec(k + 1);
      cur.remove(e);
    }
  };
  rec(0);
  return out;
}

}  // namespace momc
