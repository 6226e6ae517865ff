#include "lazypair/oracle.hpp"

#include <string>

namespace lazypair::workload {

std::uint32_t OracleState::resolve(std::uint32_t heap) const {
  if (heap >= alias_.size() || !alias_[heap]) {
    throw OracleError("unknown heap token " + std::to_string(heap));
  }
  std::uint32_t root = heap;
  while (*alias_[root] != root) root = *alias_[root];
  while (*alias_[heap] != root) {
    const std::uint32_t next = *alias_[heap];
    alias_[heap] = root;
    heap = next;
  }
  return root;
}

OracleState::Entries& OracleState::entries(std::uint32_t heap) { return heaps_[resolve(heap)]; }

const OracleState::Entries& OracleState::entries(std::uint32_t heap) const {
  return heaps_[resolve(heap)];
}

OracleState::NodeInfo& OracleState::node_info(std::uint32_t node) {
  if (node >= nodes_.size() || !nodes_[node].live) {
    throw OracleError("unknown or deleted node token " + std::to_string(node));
  }
  return nodes_[node];
}

void OracleState::new_heap(std::uint32_t heap) {
  if (heap < alias_.size() && alias_[heap]) {
    throw OracleError("heap token " + std::to_string(heap) + " declared twice");
  }
  if (heap >= alias_.size()) {
    alias_.resize(heap + 1);
    heaps_.resize(heap + 1);
  }
  alias_[heap] = heap;
}

void OracleState::insert(std::uint32_t heap, std::uint32_t node, Key key) {
  const std::uint32_t h = resolve(heap);
  if (node < nodes_.size() && nodes_[node].live) {
    throw OracleError("node token " + std::to_string(node) + " inserted twice");
  }
  if (node >= nodes_.size()) nodes_.resize(node + 1);
  nodes_[node] = NodeInfo{true, h, key};
  heaps_[h].emplace(key, node);
}

void OracleState::decrease(std::uint32_t heap, std::uint32_t node, Key key) {
  const std::uint32_t h = resolve(heap);
  NodeInfo& info = node_info(node);
  if (resolve(info.heap) != h) {
    throw OracleError("node token " + std::to_string(node) + " is not in the heap");
  }
  if (key > info.key) throw OracleError("decrease would increase a key");
  heaps_[h].erase({info.key, node});
  info.key = key;
  heaps_[h].emplace(key, node);
}

Key OracleState::find_min(std::uint32_t heap) const {
  const Entries& e = entries(heap);
  if (e.empty()) throw OracleError("findmin on an empty heap");
  return e.begin()->first;
}

std::pair<std::uint32_t, Key> OracleState::delete_min(std::uint32_t heap,
                                                      std::optional<std::uint32_t> tie_hint) {
  Entries& e = entries(heap);
  if (e.empty()) throw OracleError("deletemin on an empty heap");
  auto it = e.begin();
  if (tie_hint && *tie_hint < nodes_.size() && nodes_[*tie_hint].live) {
    auto hinted = e.find({nodes_[*tie_hint].key, *tie_hint});
    if (hinted != e.end() && hinted->first == it->first) it = hinted;
  }
  const auto [key, node] = *it;
  e.erase(it);
  nodes_[node].live = false;
  return {node, key};
}

void OracleState::meld(std::uint32_t a, std::uint32_t b, std::uint32_t out) {
  const std::uint32_t ra = resolve(a);
  const std::uint32_t rb = resolve(b);
  if (ra == rb) throw OracleError("meld of a heap with itself");
  new_heap(out);
  const bool a_big = heaps_[ra].size() >= heaps_[rb].size();
  Entries merged = std::move(heaps_[a_big ? ra : rb]);
  merged.merge(heaps_[a_big ? rb : ra]);
  heaps_[out] = std::move(merged);
  heaps_[ra].clear();
  heaps_[rb].clear();
  alias_[ra] = out;
  alias_[rb] = out;
}

std::size_t OracleState::size(std::uint32_t heap) const { return entries(heap).size(); }

bool OracleState::live(std::uint32_t node) const {
  return node < nodes_.size() && nodes_[node].live;
}

std::optional<Key> OracleState::key_of(std::uint32_t node) const {
  if (!live(node)) return std::nullopt;
  return nodes_[node].key;
}

std::optional<Key> oracle_step(OracleState& state, const TraceEvent& e,
                               std::optional<std::uint32_t> tie_hint) {
  switch (e.kind) {
    case OpType::NewHeap:
      state.new_heap(e.heap);
      return std::nullopt;
    case OpType::Insert:
      state.insert(e.heap, *e.node, *e.key);
      return std::nullopt;
    case OpType::Decrease:
      state.decrease(e.heap, *e.node, *e.key);
      return std::nullopt;
    case OpType::FindMin:
      return state.find_min(e.heap);
    case OpType::DeleteMin:
      return state.delete_min(e.heap, tie_hint).second;
    case OpType::Meld:
      state.meld(e.heap, *e.heap2, *e.result_heap);
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace lazypair::workload
