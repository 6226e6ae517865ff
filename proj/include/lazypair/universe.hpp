// Pairing heap with lazy decrease-key and a clean-up pass.
//
// Every heap is one heap-ordered multi-way tree stored in the leftmost-child /
// right-sibling form. Decrease-key only rewrites the key and records the node
// in the heap's decreased list; the heap order is repaired by clean_up, which
// runs before every delete-min and on the smaller heap of a meld. A minimum
// pointer is kept because the minimum may sit on a pending decreased node.
//
// All heaps of one Universe share a node arena, a cost counter set and a
// heap-id alias structure. A Universe is single-owner: no member function may
// be called concurrently with another on the same instance.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lazypair/metrics.hpp"
#include "lazypair/types.hpp"

namespace lazypair {

struct MinEntry {
  NodeHandle node;
  Key key = 0;
};

/// Read-only view of one node, as exposed to tests, the auditor and tools.
struct NodeView {
  Key key = 0;
  std::optional<NodeHandle> leftmost_child;
  std::optional<NodeHandle> right_sibling;
  /// Left sibling, or the parent when the node is a leftmost child.
  std::optional<NodeHandle> prev;
  bool is_leftmost = false;
  bool decreased = false;
  LinkOrigin link_origin = LinkOrigin::None;
};

struct Violation {
  std::optional<NodeHandle> node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

class Universe {
 public:
  using CleanupHook = std::function<void(const Universe&, HeapId)>;

  explicit Universe(VariantConfig config = {});

  const VariantConfig& config() const { return config_; }

  // -- heaps ---------------------------------------------------------------

  HeapId make_heap();

  /// Follows meld aliases to the live heap. Throws UnknownHeap.
  HeapId resolve(HeapId id) const;

  std::size_t size(HeapId h) const;
  bool empty(HeapId h) const { return size(h) == 0; }
  std::optional<NodeHandle> root(HeapId h) const;
  std::vector<NodeHandle> decreased_list(HeapId h) const;
  std::vector<HeapId> live_heaps() const;

  NodeHandle insert(HeapId h, Key key);

  /// O(1), no comparisons. Throws EmptyHeap.
  MinEntry find_min(HeapId h) const;

  /// Requires key <= current key of `node` (KeyIncrease otherwise).
  void decrease_key(HeapId h, NodeHandle node, Key key);

  /// Removes and returns the minimum. The returned handle is already stale.
  MinEntry delete_min(HeapId h);

  /// Melds two distinct heaps into a fresh id; both inputs alias the result.
  HeapId meld(HeapId h1, HeapId h2);

  void clean_up(HeapId h);

  /// Checks link consistency, heap order (relaxed above pending decreased
  /// nodes unless `require_clean`), the minimum pointer, the decreased list
  /// and the size. With `require_clean` the decreased list must be empty and
  /// the minimum pointer must be the root.
  ValidationReport validate(HeapId h, bool require_clean = false) const;

  // -- nodes ---------------------------------------------------------------

  bool contains(NodeHandle node) const;
  /// Throws InvalidHandle.
  NodeView inspect(NodeHandle node) const;
  std::vector<NodeHandle> children(NodeHandle node) const;
  std::optional<NodeHandle> parent(NodeHandle node) const;
  /// Heap that owns the node, or nullopt for free-standing trees.
  std::optional<HeapId> owner(NodeHandle node) const;

  // -- tree primitives -----------------------------------------------------
  //
  // These act on bare trees and do not maintain heap bookkeeping. The heap
  // operations are built on them; they are public for tests and tooling.

  /// Allocates a single-node tree owned by no heap.
  NodeHandle make_tree(Key key);

  /// One counted comparison. The root with the larger key becomes the
  /// leftmost child of the other; the first argument wins ties.
  NodeHandle link(NodeHandle r1, NodeHandle r2, LinkOrigin origin = LinkOrigin::PairingLink);

  /// Cuts a flagged node out of its tree, gluing its leftmost child's subtree
  /// into the vacated position. Returns the node as a detached root, or
  /// nullopt (after unflagging it) when it is already a root.
  std::optional<NodeHandle> detach_decreased(NodeHandle node);

  /// Sorts roots by key (ties by arena index) and chains them into a path,
  /// each root the leftmost child of its predecessor. Returns the smallest.
  NodeHandle combine_group(std::span<const NodeHandle> roots);

  /// Standard two-pass pairing over the sibling list headed by `first_child`.
  /// The list is first unhooked from its parent, if it has one.
  std::optional<NodeHandle> two_pass_combine(std::optional<NodeHandle> first_child);

  // -- instrumentation -----------------------------------------------------

  const metrics::CostCounters& counters() const { return counters_; }
  /// Accumulated cost of all clean-up calls (a subset of counters()).
  const metrics::CostCounters& cleanup_costs() const { return cleanup_costs_; }
  std::uint64_t cleanups_run() const { return cleanups_run_; }

  /// Called after every non-trivial clean-up, with the heap it cleaned.
  void set_cleanup_hook(CleanupHook hook) { cleanup_hook_ = std::move(hook); }

  // Fault injection for tests. These bypass every invariant.
  void debug_set_key(NodeHandle node, Key key);
  void debug_set_right_sibling(NodeHandle node, std::optional<NodeHandle> sibling);
  void debug_mark_decreased(NodeHandle node);

 private:
  struct Slot {
    Key key = 0;
    std::uint32_t child = kNil;
    std::uint32_t sibling = kNil;
    std::uint32_t prev = kNil;
    std::uint32_t generation = 0;
    std::uint32_t home = kNil;  // heap id at insertion; resolved through aliases
    bool live = false;
    bool is_leftmost = false;
    bool decreased = false;
    LinkOrigin origin = LinkOrigin::None;
  };

  struct HeapState {
    bool live = false;
    std::uint32_t root = kNil;
    std::uint32_t min = kNil;
    std::size_t size = 0;
    std::vector<std::uint32_t> decreased;
  };

  std::uint32_t find(std::uint32_t raw) const;
  HeapState& heap_at(HeapId h);
  const HeapState& heap_at(HeapId h) const;
  std::uint32_t checked_index(NodeHandle node) const;
  NodeHandle handle_of(std::uint32_t index) const;
  std::optional<NodeHandle> opt_handle(std::uint32_t index) const;

  std::uint32_t allocate(Key key, std::uint32_t home);
  void release(std::uint32_t index);

  bool less(std::uint32_t a, std::uint32_t b);
  std::uint32_t link_roots(std::uint32_t r1, std::uint32_t r2, LinkOrigin origin);
  void cut(std::uint32_t x);
  std::uint32_t detach(std::uint32_t x);
  std::uint32_t combine(std::span<std::uint32_t> roots);
  std::uint32_t two_pass(std::uint32_t first);
  void clean_up_state(HeapId id, HeapState& heap);

  VariantConfig config_;
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_;
  std::vector<HeapState> heaps_;
  mutable std::vector<std::uint32_t> alias_;
  metrics::CostCounters counters_;
  metrics::CostCounters cleanup_costs_;
  std::uint64_t cleanups_run_ = 0;
  CleanupHook cleanup_hook_;

  std::vector<std::uint32_t> scratch_;
  mutable std::vector<std::uint32_t> mark_;
  mutable std::vector<std::uint32_t> validate_stack_;
  mutable std::uint32_t epoch_ = 0;
};

}  // namespace lazypair
