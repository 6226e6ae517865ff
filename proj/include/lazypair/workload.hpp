// Trace generators and the oracle-checked trace runner.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lazypair/metrics.hpp"
#include "lazypair/trace.hpp"
#include "lazypair/types.hpp"
#include "lazypair/universe.hpp"

namespace lazypair::workload {

enum class WorkloadKind : std::uint8_t { Random, Sort, DijkstraLike };

std::optional<WorkloadKind> parse_workload_kind(std::string_view text);

/// Operation probabilities for the Random generator.
struct Mix {
  double insert = 0.35;
  double decrease = 0.25;
  double deletemin = 0.20;
  double findmin = 0.10;
  double meld = 0.10;
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Random;
  /// Random: operations excluding `new`; Sort: keys; DijkstraLike: vertices.
  std::size_t n = 1;
  std::uint64_t seed = 1;
  Mix mix;
  std::size_t heaps = 4;
};

/// Throws std::invalid_argument on n == 0, heaps == 0, negative weights or a
/// mix that does not sum to 1.
void validate_spec(const WorkloadSpec& spec);

/// Deterministic for a fixed spec.
Trace generate(const WorkloadSpec& spec);

struct Graph {
  struct Arc {
    std::uint32_t to = 0;
    std::uint32_t weight = 1;
  };
  std::vector<std::vector<Arc>> adjacency;

  std::size_t vertices() const { return adjacency.size(); }
};

/// Random digraph with `n * average_degree` arcs and weights in [1, 100].
Graph random_graph(std::size_t n, std::uint64_t seed, std::size_t average_degree = 4);

/// Runs Dijkstra from `source` with the oracle as its priority queue and
/// records the queue operations. Keys are `distance * n + vertex` so that no
/// two queued keys are equal.
Trace dijkstra_trace(const Graph& graph, std::uint32_t source = 0);

struct Verdict {
  bool pass = true;
  std::optional<std::size_t> failed_at;
  std::string message;
};

struct RunOptions {
  /// Compare findmin/deletemin against the oracle, validate after every
  /// deletemin and meld and after every clean-up.
  bool check = false;
  /// With `check`, also run validate() after deletemin, meld and clean-up.
  bool validate = true;
  bool record = true;
  /// Called after each event's heap operation, before any checking.
  std::function<void(Universe&, std::size_t)> after_op;
};

struct RunResult {
  std::vector<metrics::OpRecord> records;
  Verdict verdict;
  metrics::CostCounters totals;
  metrics::CostCounters cleanup_totals;
  std::uint64_t events_run = 0;
  std::uint64_t oracle_checks = 0;
  std::uint64_t validations = 0;
  std::uint64_t cleanup_checks = 0;
  std::uint64_t violations = 0;
};

/// Replays the trace on a fresh Universe. Stops at the first failure.
RunResult run_trace(const Trace& trace, const VariantConfig& config, const RunOptions& options = {});

}  // namespace lazypair::workload
