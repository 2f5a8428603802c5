#pragma once

#include <cstddef>
#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

namespace facedup {

// Disjoint sets over [0, n) with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t size() const noexcept { return parent_.size(); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  // Components with at least `min_size` elements; each component lists its
  // elements ascending and components are ordered by smallest element.
  std::vector<std::vector<std::size_t>> components(std::size_t min_size = 1) {
    std::vector<std::vector<std::size_t>> by_root(parent_.size());
    for (std::size_t i = 0; i < parent_.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      if (!by_root[i].empty() && by_root[i].size() >= min_size) {
        out.push_back(std::move(by_root[i]));
      }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace facedup
