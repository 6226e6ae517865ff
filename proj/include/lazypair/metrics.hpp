// Cost instrumentation: exact counters and per-operation records.

#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace lazypair {

enum class OpType : std::uint8_t {
  NewHeap,
  Insert,
  Decrease,
  FindMin,
  DeleteMin,
  Meld,
};

/// Trace keyword for the operation ("new", "insert", ...).
std::string_view to_string(OpType type);
std::optional<OpType> parse_op_type(std::string_view text);

namespace metrics {

/// `comparisons` counts every key-order query, including the ones made while
/// sorting; `sort_comparisons` is the sorting subset.
struct CostCounters {
  std::uint64_t comparisons = 0;
  std::uint64_t links = 0;
  std::uint64_t cuts = 0;
  std::uint64_t sort_comparisons = 0;
  std::uint64_t pool_trees = 0;
  std::uint64_t groups = 0;

  CostCounters& operator+=(const CostCounters& o);
  friend CostCounters operator+(CostCounters a, const CostCounters& b) { return a += b; }
  friend CostCounters operator-(const CostCounters& a, const CostCounters& b);
  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

struct Snapshot {
  const CostCounters* source = nullptr;
  CostCounters at;
  std::chrono::steady_clock::time_point started;
};

struct OpMeta {
  std::uint64_t op_index = 0;
  OpType op_type = OpType::NewHeap;
  std::uint64_t heap_size_before = 0;
};

struct OpRecord {
  std::uint64_t op_index = 0;
  OpType op_type = OpType::NewHeap;
  std::uint64_t heap_size_before = 0;
  CostCounters delta;
  std::chrono::nanoseconds wall_time{0};
  // Part of `delta` spent inside clean-up. Filled by the trace runner; not
  // part of the CSV format.
  CostCounters cleanup_delta;

  friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

Snapshot begin_op(const CostCounters& counters);

/// Throws std::invalid_argument if `snap` was taken from other counters.
OpRecord end_op(const CostCounters& counters, const Snapshot& snap, const OpMeta& meta);

inline constexpr std::string_view kCsvHeader =
    "op_index,op_type,heap_size_before,comparisons,links,cuts,sort_comparisons,"
    "pool_trees,groups,wall_time_ns";

/// Throws std::runtime_error when the sink reports a failure.
void write_csv(const std::vector<OpRecord>& records, std::ostream& sink);

/// Inverse of write_csv (cleanup_delta is not stored and reads back as zero).
std::vector<OpRecord> read_csv(std::istream& source);

}  // namespace metrics
}  // namespace lazypair
