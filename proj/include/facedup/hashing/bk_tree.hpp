#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace facedup::hashing {

// Burkhard-Keller tree over 64-bit keys under Hamming distance. Equal keys
// share a node; children are kept as (distance, node) pairs.
class BkTree {
 public:
  void insert(std::uint64_t key, std::size_t value) {
    if (nodes_.empty()) {
      nodes_.emplace_back(key, value);
      return;
    }
    std::size_t cur = 0;
    for (;;) {
      const int d = std::popcount(nodes_[cur].key ^ key);
      if (d == 0) {
        nodes_[cur].values.push_back(value);
        return;
      }
      std::size_t next = kNone;
      for (const auto& [cd, idx] : nodes_[cur].children) {
        if (cd == d) next = idx;
      }
      if (next == kNone) {
        nodes_[cur].children.emplace_back(d, nodes_.size());
        nodes_.emplace_back(key, value);
        return;
      }
      cur = next;
    }
  }

  // Calls fn(value, distance) for every stored value within `radius` of key,
  // in an order that depends only on the insertion sequence.
  template <typename Fn>
  void query(std::uint64_t key, int radius, Fn&& fn) const {
    if (nodes_.empty()) return;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
      const Node& n = nodes_[stack.back()];
      stack.pop_back();
      const int d = std::popcount(n.key ^ key);
      if (d <= radius) {
        for (std::size_t v : n.values) fn(v, d);
      }
      for (const auto& [cd, idx] : n.children) {
        if (cd >= d - radius && cd <= d + radius) stack.push_back(idx);
      }
    }
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Node {
    Node(std::uint64_t k, std::size_t v) : key(k), values{v} {}
    std::uint64_t key;
    std::vector<std::size_t> values;
    std::vector<std::pair<int, std::size_t>> children;
  };
  std::vector<Node> nodes_;
};

}  // namespace facedup::hashing
