#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

namespace parabox {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }

  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  bool connected(size_t a, size_t b) { return find(a) == find(b); }

  size_t component_count() {
    size_t roots = 0;
    for (size_t i = 0; i < parent_.size(); ++i)
      if (find(i) == i) ++roots;
    return roots;
  }

 private:
  std::vector<size_t> parent_;
  std::vector<size_t> rank_;
};

// Runs fn(i) for i in [0, n) on `threads` workers.  Static block partition;
// callers that need deterministic output write into per-index slots and
// combine in index order afterwards.
inline void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  if (threads < 1) threads = 1;
  size_t nthreads = std::min<size_t>(static_cast<size_t>(threads), n);
  if (nthreads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  size_t chunk = (n + nthreads - 1) / nthreads;
  for (size_t t = 0; t < nthreads; ++t) {
    size_t lo = t * chunk;
    size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace parabox
