#include "lazypair/universe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace lazypair {

namespace {

std::string describe(NodeHandle h) {
  return "node#" + std::to_string(h.index) + "." + std::to_string(h.generation);
}

std::size_t group_size(std::size_t n) {
  // max(1, floor(log2 n))
  return n < 2 ? 1 : static_cast<std::size_t>(std::bit_width(n) - 1);
}

}  // namespace

std::string ValidationReport::summary() const {
  if (violations.empty()) return "ok";
  std::ostringstream os;
  os << violations.size() << " violation(s)";
  for (const auto& v : violations) {
    os << "; ";
    if (v.node) os << describe(*v.node) << ": ";
    os << v.message;
  }
  return os.str();
}

Universe::Universe(VariantConfig config) : config_(config.normalized()) {}

// -- bookkeeping ------------------------------------------------------------

std::uint32_t Universe::find(std::uint32_t raw) const {
  // path halving
  while (alias_[raw] != raw) {
    alias_[raw] = alias_[alias_[raw]];
    raw = alias_[raw];
  }
  return raw;
}

HeapId Universe::resolve(HeapId id) const {
  if (id.raw >= alias_.size()) {
    throw HeapError(ErrorKind::UnknownHeap, "unknown heap id " + std::to_string(id.raw));
  }
  return HeapId{find(id.raw)};
}

Universe::HeapState& Universe::heap_at(HeapId h) { return heaps_[resolve(h).raw]; }

const Universe::HeapState& Universe::heap_at(HeapId h) const {
  return heaps_[resolve(h).raw];
}

std::uint32_t Universe::checked_index(NodeHandle node) const {
  if (node.index >= slots_.size() || !slots_[node.index].live ||
      slots_[node.index].generation != node.generation) {
    throw HeapError(ErrorKind::InvalidHandle, "invalid or stale handle " + describe(node));
  }
  return node.index;
}

NodeHandle Universe::handle_of(std::uint32_t index) const {
  return NodeHandle{index, slots_[index].generation};
}

std::optional<NodeHandle> Universe::opt_handle(std::uint32_t index) const {
  if (index == kNil) return std::nullopt;
  return handle_of(index);
}

std::uint32_t Universe::allocate(Key key, std::uint32_t home) {
  std::uint32_t index;
  if (!free_.empty()) {
    index = free_.back();
    free_.pop_back();
  } else {
    index = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  Slot& s = slots_[index];
  std::uint32_t gen = s.generation;
  s = Slot{};
  s.generation = gen;
  s.key = key;
  s.home = home;
  s.live = true;
  return index;
}

void Universe::release(std::uint32_t index) {
  Slot& s = slots_[index];
  s.live = false;
  s.decreased = false;
  ++s.generation;
  free_.push_back(index);
}

// -- primitives --------------------------------------------------------------

bool Universe::less(std::uint32_t a, std::uint32_t b) {
  ++counters_.comparisons;
  return slots_[a].key < slots_[b].key;
}

std::uint32_t Universe::link_roots(std::uint32_t r1, std::uint32_t r2, LinkOrigin origin) {
  ++counters_.links;
  std::uint32_t winner = r1;
  std::uint32_t loser = r2;
  if (less(r2, r1)) std::swap(winner, loser);

  Slot& w = slots_[winner];
  Slot& l = slots_[loser];
  l.sibling = w.child;
  if (w.child != kNil) {
    slots_[w.child].prev = loser;
    slots_[w.child].is_leftmost = false;
  }
  w.child = loser;
  l.prev = winner;
  l.is_leftmost = true;
  l.origin = origin;
  return winner;
}

void Universe::cut(std::uint32_t x) {
  Slot& s = slots_[x];
  if (s.is_leftmost) {
    slots_[s.prev].child = s.sibling;
    if (s.sibling != kNil) {
      slots_[s.sibling].prev = s.prev;
      slots_[s.sibling].is_leftmost = true;
    }
  } else {
    slots_[s.prev].sibling = s.sibling;
    if (s.sibling != kNil) slots_[s.sibling].prev = s.prev;
  }
  s.prev = kNil;
  s.sibling = kNil;
  s.is_leftmost = false;
  s.origin = LinkOrigin::None;
  ++counters_.cuts;
}

std::uint32_t Universe::detach(std::uint32_t x) {
  Slot& s = slots_[x];
  s.decreased = false;
  const std::uint32_t c = s.child;
  if (c == kNil) {
    cut(x);
    ++counters_.pool_trees;
    return x;
  }

  // Unhook c from x's child list.
  Slot& cs = slots_[c];
  s.child = cs.sibling;
  if (cs.sibling != kNil) {
    slots_[cs.sibling].prev = x;
    slots_[cs.sibling].is_leftmost = true;
  }

  // c takes over x's position.
  cs.prev = s.prev;
  cs.sibling = s.sibling;
  cs.is_leftmost = s.is_leftmost;
  cs.origin = s.origin;
  if (s.is_leftmost) {
    slots_[s.prev].child = c;
  } else {
    slots_[s.prev].sibling = c;
  }
  if (s.sibling != kNil) slots_[s.sibling].prev = c;

  s.prev = kNil;
  s.sibling = kNil;
  s.is_leftmost = false;
  s.origin = LinkOrigin::None;
  ++counters_.cuts;
  ++counters_.pool_trees;
  return x;
}

std::uint32_t Universe::combine(std::span<std::uint32_t> roots) {
  ++counters_.groups;
  std::sort(roots.begin(), roots.end(), [this](std::uint32_t a, std::uint32_t b) {
    ++counters_.comparisons;
    ++counters_.sort_comparisons;
    const Key ka = slots_[a].key;
    const Key kb = slots_[b].key;
    if (ka != kb) return ka < kb;
    return a < b;
  });
  for (std::size_t i = roots.size() - 1; i > 0; --i) {
    const std::uint32_t parent = roots[i - 1];
    const std::uint32_t child = roots[i];
    Slot& p = slots_[parent];
    Slot& c = slots_[child];
    ++counters_.links;
    c.sibling = p.child;
    if (p.child != kNil) {
      slots_[p.child].prev = child;
      slots_[p.child].is_leftmost = false;
    }
    p.child = child;
    c.prev = parent;
    c.is_leftmost = true;
    c.origin = LinkOrigin::CleanupLink;
  }
  return roots.front();
}

std::uint32_t Universe::two_pass(std::uint32_t first) {
  if (first == kNil) return kNil;
  auto& trees = scratch_;
  trees.clear();
  for (std::uint32_t x = first; x != kNil;) {
    Slot& s = slots_[x];
    const std::uint32_t next = s.sibling;
    s.prev = kNil;
    s.sibling = kNil;
    s.is_leftmost = false;
    s.origin = LinkOrigin::None;
    trees.push_back(x);
    x = next;
  }

  // Pairing pass, left to right; an odd last tree passes through.
  std::size_t kept = 0;
  std::size_t i = 0;
  for (; i + 1 < trees.size(); i += 2) {
    trees[kept++] = link_roots(trees[i], trees[i + 1], LinkOrigin::PairingLink);
  }
  if (i < trees.size()) trees[kept++] = trees[i];

  // Right-to-left incremental linking.
  std::uint32_t acc = trees[kept - 1];
  for (std::size_t j = kept - 1; j-- > 0;) {
    acc = link_roots(trees[j], acc, LinkOrigin::PairingLink);
  }
  return acc;
}

NodeHandle Universe::make_tree(Key key) { return handle_of(allocate(key, kNil)); }

NodeHandle Universe::link(NodeHandle r1, NodeHandle r2, LinkOrigin origin) {
  const std::uint32_t a = checked_index(r1);
  const std::uint32_t b = checked_index(r2);
  if (a == b) throw HeapError(ErrorKind::InvalidArgument, "cannot link a node with itself");
  for (std::uint32_t x : {a, b}) {
    if (slots_[x].prev != kNil || slots_[x].sibling != kNil) {
      throw HeapError(ErrorKind::InvalidArgument, describe(handle_of(x)) + " is not a root");
    }
  }
  return handle_of(link_roots(a, b, origin));
}

std::optional<NodeHandle> Universe::detach_decreased(NodeHandle node) {
  const std::uint32_t x = checked_index(node);
  if (!slots_[x].decreased) {
    throw HeapError(ErrorKind::InvalidArgument, describe(node) + " is not flagged as decreased");
  }
  if (slots_[x].prev == kNil) {
    slots_[x].decreased = false;
    return std::nullopt;
  }
  return handle_of(detach(x));
}

NodeHandle Universe::combine_group(std::span<const NodeHandle> roots) {
  if (roots.empty()) throw HeapError(ErrorKind::InvalidArgument, "empty group");
  std::vector<std::uint32_t> idx;
  idx.reserve(roots.size());
  for (NodeHandle r : roots) {
    const std::uint32_t x = checked_index(r);
    if (slots_[x].prev != kNil || slots_[x].sibling != kNil) {
      throw HeapError(ErrorKind::InvalidArgument, describe(r) + " is not a root");
    }
    idx.push_back(x);
  }
  return handle_of(combine(idx));
}

std::optional<NodeHandle> Universe::two_pass_combine(std::optional<NodeHandle> first_child) {
  if (!first_child) return std::nullopt;
  const std::uint32_t first = checked_index(*first_child);
  Slot& f = slots_[first];
  if (f.prev != kNil) {
    if (!f.is_leftmost) {
      throw HeapError(ErrorKind::InvalidArgument, describe(*first_child) + " is not a leftmost child");
    }
    slots_[f.prev].child = kNil;
  }
  return opt_handle(two_pass(first));
}

// -- heap operations ---------------------------------------------------------

HeapId Universe::make_heap() {
  const auto raw = static_cast<std::uint32_t>(heaps_.size());
  heaps_.emplace_back();
  heaps_.back().live = true;
  alias_.push_back(raw);
  return HeapId{raw};
}

std::size_t Universe::size(HeapId h) const { return heap_at(h).size; }

std::optional<NodeHandle> Universe::root(HeapId h) const { return opt_handle(heap_at(h).root); }

std::vector<NodeHandle> Universe::decreased_list(HeapId h) const {
  std::vector<NodeHandle> out;
  for (std::uint32_t x : heap_at(h).decreased) out.push_back(handle_of(x));
  return out;
}

std::vector<HeapId> Universe::live_heaps() const {
  std::vector<HeapId> out;
  for (std::uint32_t i = 0; i < heaps_.size(); ++i) {
    if (heaps_[i].live) out.push_back(HeapId{i});
  }
  return out;
}

NodeHandle Universe::insert(HeapId h, Key key) {
  const HeapId id = resolve(h);
  const std::uint32_t x = allocate(key, id.raw);
  HeapState& heap = heaps_[id.raw];
  if (heap.root == kNil) {
    heap.root = heap.min = x;
  } else {
    const std::uint32_t old_root = heap.root;
    heap.root = link_roots(old_root, x, LinkOrigin::InsertLink);
    if (heap.min == old_root) {
      heap.min = heap.root;
    } else if (less(x, heap.min)) {
      heap.min = x;
    }
  }
  ++heap.size;
  return handle_of(x);
}

MinEntry Universe::find_min(HeapId h) const {
  const HeapState& heap = heap_at(h);
  if (heap.size == 0) throw HeapError(ErrorKind::EmptyHeap, "find_min on empty heap");
  return MinEntry{handle_of(heap.min), slots_[heap.min].key};
}

void Universe::decrease_key(HeapId h, NodeHandle node, Key key) {
  const HeapId id = resolve(h);
  const std::uint32_t x = checked_index(node);
  Slot& s = slots_[x];
  if (s.home == kNil || find(s.home) != id.raw) {
    throw HeapError(ErrorKind::NotInHeap, describe(node) + " is not in the given heap");
  }
  if (key > s.key) {
    throw HeapError(ErrorKind::KeyIncrease, "decrease_key would increase the key of " +
                                                describe(node));
  }
  HeapState& heap = heaps_[id.raw];
  s.key = key;

  if (config_.mode == Mode::Eager) {
    if (x != heap.root) {
      cut(x);
      heap.root = link_roots(heap.root, x, LinkOrigin::CleanupLink);
    }
    heap.min = heap.root;
    return;
  }

  if (x != heap.min && less(x, heap.min)) heap.min = x;
  if (x != heap.root && !s.decreased) {
    s.decreased = true;
    heap.decreased.push_back(x);
  }
  if (config_.periodic_cleanup && !heap.decreased.empty() &&
      static_cast<double>(heap.decreased.size()) >=
          config_.periodic_factor * std::log2(static_cast<double>(heap.size))) {
    clean_up_state(id, heap);
  }
}

void Universe::clean_up(HeapId h) {
  const HeapId id = resolve(h);
  clean_up_state(id, heaps_[id.raw]);
}

void Universe::clean_up_state(HeapId id, HeapState& heap) {
  if (heap.decreased.empty()) return;
  const metrics::CostCounters before = counters_;

  const std::size_t listed = heap.decreased.size();
  const bool direct =
      config_.direct_relink &&
      static_cast<double>(listed) > config_.direct_relink_fraction * static_cast<double>(heap.size);

  std::vector<std::uint32_t> pool;
  pool.reserve(listed);
  for (std::uint32_t x : heap.decreased) {
    if (!slots_[x].decreased) continue;
    if (slots_[x].prev == kNil) {
      slots_[x].decreased = false;
      continue;
    }
    pool.push_back(detach(x));
  }
  heap.decreased.clear();

  if (direct) {
    for (std::uint32_t t : pool) heap.root = link_roots(heap.root, t, LinkOrigin::CleanupLink);
  } else {
    const std::size_t g = group_size(heap.size);
    std::span<std::uint32_t> rest(pool);
    while (!rest.empty()) {
      const std::size_t take = std::min(g, rest.size());
      const std::uint32_t combined = combine(rest.first(take));
      heap.root = link_roots(heap.root, combined, LinkOrigin::CleanupLink);
      rest = rest.subspan(take);
    }
  }
  heap.min = heap.root;

  cleanup_costs_ += counters_ - before;
  ++cleanups_run_;
  if (cleanup_hook_) cleanup_hook_(*this, id);
}

MinEntry Universe::delete_min(HeapId h) {
  const HeapId id = resolve(h);
  HeapState& heap = heaps_[id.raw];
  if (heap.size == 0) throw HeapError(ErrorKind::EmptyHeap, "delete_min on empty heap");
  clean_up_state(id, heap);

  const std::uint32_t r = heap.root;
  const MinEntry out{handle_of(r), slots_[r].key};
  heap.root = two_pass(slots_[r].child);
  heap.min = heap.root;
  --heap.size;
  release(r);
  return out;
}

HeapId Universe::meld(HeapId h1, HeapId h2) {
  const HeapId a_id = resolve(h1);
  const HeapId b_id = resolve(h2);
  if (a_id == b_id) throw HeapError(ErrorKind::SelfMeld, "cannot meld a heap with itself");

  if (config_.cleanup_on_meld) {
    HeapState& a = heaps_[a_id.raw];
    HeapState& b = heaps_[b_id.raw];
    if (a.size < b.size) {
      clean_up_state(a_id, a);
    } else {
      clean_up_state(b_id, b);
    }
  }

  const HeapId out = make_heap();
  HeapState& a = heaps_[a_id.raw];
  HeapState& b = heaps_[b_id.raw];
  HeapState& r = heaps_[out.raw];

  if (a.root == kNil || b.root == kNil) {
    HeapState& src = a.root == kNil ? b : a;
    r.root = src.root;
    r.min = src.min;
  } else {
    r.root = link_roots(a.root, b.root, LinkOrigin::MeldLink);
    if (a.min == a.root && b.min == b.root) {
      r.min = r.root;
    } else {
      r.min = less(b.min, a.min) ? b.min : a.min;
    }
  }
  r.size = a.size + b.size;
  r.decreased = std::move(a.decreased);
  r.decreased.insert(r.decreased.end(), b.decreased.begin(), b.decreased.end());

  for (HeapState* dead : {&a, &b}) {
    *dead = HeapState{};
  }
  alias_[a_id.raw] = out.raw;
  alias_[b_id.raw] = out.raw;
  return out;
}

// -- inspection --------------------------------------------------------------

bool Universe::contains(NodeHandle node) const {
  return node.index < slots_.size() && slots_[node.index].live &&
         slots_[node.index].generation == node.generation;
}

NodeView Universe::inspect(NodeHandle node) const {
  const Slot& s = slots_[checked_index(node)];
  NodeView v;
  v.key = s.key;
  v.leftmost_child = opt_handle(s.child);
  v.right_sibling = opt_handle(s.sibling);
  v.prev = opt_handle(s.prev);
  v.is_leftmost = s.is_leftmost;
  v.decreased = s.decreased;
  v.link_origin = s.origin;
  return v;
}

std::vector<NodeHandle> Universe::children(NodeHandle node) const {
  std::vector<NodeHandle> out;
  for (std::uint32_t c = slots_[checked_index(node)].child; c != kNil; c = slots_[c].sibling) {
    out.push_back(handle_of(c));
  }
  return out;
}

std::optional<NodeHandle> Universe::parent(NodeHandle node) const {
  std::uint32_t x = checked_index(node);
  while (slots_[x].prev != kNil && !slots_[x].is_leftmost) x = slots_[x].prev;
  return opt_handle(slots_[x].prev);
}

std::optional<HeapId> Universe::owner(NodeHandle node) const {
  const Slot& s = slots_[checked_index(node)];
  if (s.home == kNil) return std::nullopt;
  return HeapId{find(s.home)};
}

void Universe::debug_set_key(NodeHandle node, Key key) { slots_[checked_index(node)].key = key; }

void Universe::debug_set_right_sibling(NodeHandle node, std::optional<NodeHandle> sibling) {
  slots_[checked_index(node)].sibling = sibling ? checked_index(*sibling) : kNil;
}

void Universe::debug_mark_decreased(NodeHandle node) {
  slots_[checked_index(node)].decreased = true;
}

// -- validation --------------------------------------------------------------

ValidationReport Universe::validate(HeapId h, bool require_clean) const {
  const HeapId id = resolve(h);
  const HeapState& heap = heaps_[id.raw];
  ValidationReport report;
  auto fail = [&](std::uint32_t x, std::string msg) {
    report.violations.push_back(
        Violation{x == kNil ? std::nullopt : std::optional<NodeHandle>(handle_of(x)),
                  std::move(msg)});
  };

  if (mark_.size() < slots_.size()) mark_.resize(slots_.size(), 0);
  if (epoch_ > std::numeric_limits<std::uint32_t>::max() - 4) {
    std::fill(mark_.begin(), mark_.end(), 0);
    epoch_ = 0;
  }
  const std::uint32_t reached = ++epoch_;
  const std::uint32_t listed = ++epoch_;

  if (heap.root == kNil) {
    if (heap.size != 0) fail(kNil, "empty tree but size " + std::to_string(heap.size));
    if (heap.min != kNil) fail(heap.min, "minimum pointer set on an empty heap");
    if (!heap.decreased.empty()) fail(kNil, "decreased list not empty on an empty heap");
    return report;
  }

  const Slot& rs = slots_[heap.root];
  if (!rs.live) {
    fail(heap.root, "root is not live");
    return report;
  }
  if (rs.prev != kNil || rs.sibling != kNil || rs.is_leftmost) {
    fail(heap.root, "root has a parent or sibling link");
  }
  if (rs.decreased) fail(heap.root, "root is flagged as decreased");

  std::size_t count = 0;
  std::size_t flagged = 0;
  std::uint32_t min_seen = heap.root;
  std::vector<std::uint32_t>& stack = validate_stack_;
  stack.assign(1, heap.root);
  mark_[heap.root] = reached;
  std::uint32_t home_ok = kNil;  // last home known to resolve to this heap
  while (!stack.empty()) {
    const std::uint32_t p = stack.back();
    stack.pop_back();
    ++count;
    const Slot& ps = slots_[p];
    if (ps.home != home_ok) {
      if (ps.home == kNil || find(ps.home) != id.raw) {
        fail(p, "node is owned by another heap");
      } else {
        home_ok = ps.home;
      }
    }
    if (ps.decreased) ++flagged;
    if (ps.key < slots_[min_seen].key) min_seen = p;

    std::uint32_t expected_prev = p;
    bool leftmost = true;
    for (std::uint32_t c = ps.child; c != kNil; c = slots_[c].sibling) {
      if (c >= slots_.size() || !slots_[c].live) {
        fail(p, "child list reaches a dead node");
        break;
      }
      if (mark_[c] == reached) {
        fail(c, "node reached twice (cycle or shared subtree)");
        break;
      }
      mark_[c] = reached;
      const Slot& cs = slots_[c];
      if (cs.prev != expected_prev) fail(c, "prev link does not match its left neighbour");
      if (cs.is_leftmost != leftmost) fail(c, "leftmost flag is wrong");
      if (cs.origin == LinkOrigin::None) fail(c, "non-root node without link origin");
      if (cs.key < ps.key && (require_clean || !cs.decreased)) {
        fail(c, "heap order violated below " + describe(handle_of(p)));
      }
      stack.push_back(c);
      expected_prev = c;
      leftmost = false;
    }
  }

  if (count != heap.size) {
    fail(kNil, "size is " + std::to_string(heap.size) + " but " + std::to_string(count) +
                   " nodes are reachable");
  }

  if (heap.min == kNil || heap.min >= slots_.size() || mark_[heap.min] != reached) {
    fail(heap.min, "minimum pointer does not name a node of the heap");
  } else {
    if (slots_[heap.min].key != slots_[min_seen].key) {
      fail(heap.min, "minimum pointer key is not the heap minimum");
    }
    if (heap.min != heap.root && !slots_[heap.min].decreased) {
      fail(heap.min, "minimum pointer is neither the root nor a decreased node");
    }
  }

  for (std::uint32_t x : heap.decreased) {
    if (x >= slots_.size() || mark_[x] != reached) {
      fail(x, "decreased list entry is not in the heap");
      continue;
    }
    mark_[x] = listed;
    if (!slots_[x].decreased) fail(x, "decreased list entry is not flagged");
  }
  std::size_t distinct = 0;
  for (std::uint32_t x : heap.decreased) {
    if (x < slots_.size() && mark_[x] == listed) {
      ++distinct;
      mark_[x] = reached;
    }
  }
  if (distinct != heap.decreased.size()) fail(kNil, "decreased list holds duplicates");
  if (flagged != distinct) fail(kNil, "flagged nodes and decreased list disagree");

  if (require_clean) {
    if (!heap.decreased.empty()) fail(kNil, "decreased list not empty after clean-up");
    if (heap.min != heap.root) fail(heap.min, "minimum pointer is not the root after clean-up");
  }
  return report;
}

}  // namespace lazypair
