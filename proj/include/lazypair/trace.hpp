// Operation traces and their line-oriented text format.
//
//   new <heap>
//   insert <heap> <node> <key>
//   decrease <heap> <node> <key>
//   findmin <heap>
//   deletemin <heap>
//   meld <heapA> <heapB> <heapOut>
//   # comment
//
// Tokens match [A-Za-z0-9_]+, keys are decimal signed 64-bit integers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lazypair/metrics.hpp"
#include "lazypair/types.hpp"

namespace lazypair {

/// Heap and node tokens are interned into dense ids owned by the Trace.
struct TraceEvent {
  OpType kind = OpType::NewHeap;
  std::uint32_t heap = 0;
  std::optional<std::uint32_t> heap2;
  std::optional<std::uint32_t> result_heap;
  std::optional<std::uint32_t> node;
  std::optional<Key> key;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A well-formed trace. The builder methods enforce the same rules as the
/// parser: heaps are declared by `new` or produced by `meld` before use, node
/// tokens are inserted once, and decreases name an inserted node.
class Trace {
 public:
  std::uint32_t new_heap(std::string_view name);
  void insert(std::uint32_t heap, std::string_view node, Key key);
  void decrease(std::uint32_t heap, std::uint32_t node, Key key);
  void find_min(std::uint32_t heap);
  void delete_min(std::uint32_t heap);
  std::uint32_t meld(std::uint32_t a, std::uint32_t b, std::string_view out);

  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::size_t heap_count() const { return heap_names_.size(); }
  std::size_t node_count() const { return node_names_.size(); }
  const std::string& heap_name(std::uint32_t id) const { return heap_names_.at(id); }
  const std::string& node_name(std::uint32_t id) const { return node_names_.at(id); }
  std::optional<std::uint32_t> find_heap(std::string_view name) const;
  std::optional<std::uint32_t> find_node(std::string_view name) const;
  /// Id the node token got when inserted, i.e. the id of the n-th insert.
  std::uint32_t last_node() const { return static_cast<std::uint32_t>(node_names_.size() - 1); }

 private:
  std::uint32_t intern_heap(std::string_view name);
  std::uint32_t intern_node(std::string_view name);
  void require_heap(std::uint32_t heap) const;

  std::vector<TraceEvent> events_;
  std::vector<std::string> heap_names_;
  std::vector<std::string> node_names_;
  std::unordered_map<std::string, std::uint32_t> heap_ids_;
  std::unordered_map<std::string, std::uint32_t> node_ids_;
};

/// Throws TraceParseError naming the offending line.
Trace parse_trace(std::istream& source);
Trace parse_trace_text(std::string_view text);

void write_trace(const Trace& trace, std::ostream& sink);
std::string format_trace(const Trace& trace);

}  // namespace lazypair
