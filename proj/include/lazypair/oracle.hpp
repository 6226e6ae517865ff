// Naive reference priority queue used as the correctness oracle.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lazypair/trace.hpp"
#include "lazypair/types.hpp"

namespace lazypair::workload {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-heap sorted multisets of (key, node token) with a heap-token alias map.
class OracleState {
 public:
  void new_heap(std::uint32_t heap);
  void insert(std::uint32_t heap, std::uint32_t node, Key key);
  void decrease(std::uint32_t heap, std::uint32_t node, Key key);
  Key find_min(std::uint32_t heap) const;
  /// Removes a minimum-key entry. Among equal minimum keys `tie_hint` picks
  /// the node to remove; the hint is ignored unless its key is minimal.
  std::pair<std::uint32_t, Key> delete_min(std::uint32_t heap,
                                           std::optional<std::uint32_t> tie_hint = {});
  void meld(std::uint32_t a, std::uint32_t b, std::uint32_t out);

  std::size_t size(std::uint32_t heap) const;
  bool live(std::uint32_t node) const;
  std::optional<Key> key_of(std::uint32_t node) const;
  std::uint32_t resolve(std::uint32_t heap) const;

 private:
  using Entries = std::set<std::pair<Key, std::uint32_t>>;

  struct NodeInfo {
    bool live = false;
    std::uint32_t heap = 0;
    Key key = 0;
  };

  Entries& entries(std::uint32_t heap);
  const Entries& entries(std::uint32_t heap) const;
  NodeInfo& node_info(std::uint32_t node);

  mutable std::vector<std::optional<std::uint32_t>> alias_;
  std::vector<Entries> heaps_;
  std::vector<NodeInfo> nodes_;
};

/// Applies one event; returns the key for findmin/deletemin. Throws
/// OracleError on unknown tokens, key increases or an empty deletemin.
std::optional<Key> oracle_step(OracleState& state, const TraceEvent& event,
                               std::optional<std::uint32_t> tie_hint = {});

}  // namespace lazypair::workload
