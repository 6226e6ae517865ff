// Offline amortized-analysis auditor.
//
// A trace is replayed on the heap with full knowledge of its future: a node is
// white while a later deletemin of the trace is going to remove it, black if it
// survives the whole trace. Snapshots of the forest are taken between events
// and the potential
//
//   phi = sum over links (x, p(x)) with w(x) > 0 of log2((w(x) + w'(x)) / w(x))
//
// is evaluated on them, where w(x) counts white nodes in x's subtree and w'(x)
// counts white nodes in the subtrees of x's right siblings plus p(x) if white.
// Logarithms are base 2 throughout.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lazypair/trace.hpp"
#include "lazypair/types.hpp"
#include "lazypair/universe.hpp"

namespace lazypair::audit {

class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Color : std::uint8_t { White, Black };

/// Lifetime of every node token of one trace, in event indices.
class ColorMap {
 public:
  ColorMap() = default;
  explicit ColorMap(std::size_t nodes) : inserted_at_(nodes), deleted_at_(nodes) {}

  void set_inserted(std::uint32_t node, std::size_t t) { inserted_at_.at(node) = t; }
  void set_deleted(std::uint32_t node, std::size_t t) { deleted_at_.at(node) = t; }

  std::size_t nodes() const { return inserted_at_.size(); }
  std::optional<std::size_t> inserted_at(std::uint32_t node) const { return inserted_at_.at(node); }
  std::optional<std::size_t> deleted_at(std::uint32_t node) const { return deleted_at_.at(node); }

  /// Color of `node` right after event `t`; nullopt when the node is not in
  /// any heap at that time.
  std::optional<Color> color(std::uint32_t node, std::size_t t) const;

  friend bool operator==(const ColorMap&, const ColorMap&) = default;

 private:
  std::vector<std::optional<std::size_t>> inserted_at_;
  std::vector<std::optional<std::size_t>> deleted_at_;
};

/// Replays the trace on the heap to learn which node each deletemin removes.
/// Throws AuditError if the trace cannot be executed.
ColorMap compute_colors(const Trace& trace, const VariantConfig& config = {});

inline constexpr std::int32_t kNone = -1;

struct SnapNode {
  std::uint32_t token = 0;
  Key key = 0;
  std::int32_t parent = kNone;
  std::int32_t first_child = kNone;
  std::int32_t next_sibling = kNone;
  LinkOrigin origin = LinkOrigin::None;
};

struct SnapTree {
  std::string label;
  std::int32_t root = kNone;
};

/// Immutable copy of all live trees of a Universe after event `time`.
struct ForestSnapshot {
  std::size_t time = 0;
  std::vector<SnapNode> nodes;
  std::vector<SnapTree> trees;
};

/// `token_of_slot` maps arena indices to trace node tokens; `labels` names
/// each live heap.
ForestSnapshot take_snapshot(const Universe& u, std::size_t time,
                             std::span<const std::uint32_t> token_of_slot,
                             const std::vector<std::pair<HeapId, std::string>>& labels);

/// w, w' and the whiteness of every snapshot node.
struct Weights {
  std::vector<bool> white;
  std::vector<std::uint64_t> w;
  std::vector<std::uint64_t> w_prime;  // 0 for roots
};

/// Throws AuditError when a snapshot node has no color at the snapshot time.
Weights compute_weights(const ForestSnapshot& snap, const ColorMap& colors);

struct LinkTerm {
  std::uint32_t child_token = 0;
  std::uint64_t w = 0;
  std::uint64_t w_prime = 0;
  double term = 0.0;
  LinkOrigin origin = LinkOrigin::None;
};

struct PotentialReport {
  std::vector<LinkTerm> links;  // links with w > 0
  double phi = 0.0;
  std::uint64_t active_runs = 0;
  std::uint64_t active_parent_children = 0;
};

PotentialReport compute_potential(const ForestSnapshot& snap, const ColorMap& colors);

struct CheckResult {
  bool ok = true;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  double max_error = 0.0;
  std::string detail;
};

/// Leftmost-child identity w(x) + w'(x) = w(p), exact, over every leftmost
/// child of the snapshot.
CheckResult check_leftmost_identity(const ForestSnapshot& snap, const ColorMap& colors);

struct SpineCheck {
  bool ok = true;
  double sum = 0.0;
  double expected = 0.0;  // log2 w(z) - log2 w(d)
  std::uint64_t w_top = 0;
  std::uint64_t w_deepest = 0;
  /// True when w(d) = 1, i.e. the sum is exactly log2 w(z).
  bool equals_log_w = false;
};

inline constexpr double kTolerance = 1e-9;

/// Sum of potential terms along the left spine of node `z` (snapshot index),
/// over links with w > 0. Throws AuditError when w(z) = 0.
SpineCheck check_left_spine(const ForestSnapshot& snap, const ColorMap& colors, std::int32_t z);

struct SpineSummary {
  CheckResult result;
  std::uint64_t exact_log_w = 0;  // checks where w(d) = 1
};

/// check_left_spine for every node with w > 0, in one bottom-up pass.
SpineSummary check_all_left_spines(const ForestSnapshot& snap, const ColorMap& colors);

struct TreeMargin {
  std::string label;
  std::uint64_t whites = 0;
  double insert_meld_sum = 0.0;
  double bound = 0.0;  // sum_{i=1..k} log2 i
  double margin = 0.0;
};

struct Lemma1Result {
  bool ok = true;
  std::vector<TreeMargin> trees;
  double min_margin = 0.0;
};

/// Potential on insert/meld links of each tree against log2(k!) for its k
/// white nodes.
Lemma1Result check_lemma1(const ForestSnapshot& snap, const ColorMap& colors);

struct PropositionResult {
  bool ok = true;
  double max_value = 0.0;
  std::uint64_t argmax = 0;
  std::uint64_t checked = 0;
};

/// n * (log2 log2 (n+1) - log2 log2 n) < log2 e for every n. Throws
/// std::invalid_argument for n <= 2.
PropositionResult check_proposition(std::span<const std::uint64_t> ns);
PropositionResult check_proposition_range(std::uint64_t lo, std::uint64_t hi);

struct CreditStats {
  std::uint64_t active_runs = 0;
  std::uint64_t active_parent_children = 0;
};

CreditStats count_credit_stats(const ForestSnapshot& snap, const ColorMap& colors);

// -- trace audit -------------------------------------------------------------

enum class SnapshotMode : std::uint8_t { Every, Final };

struct AuditOptions {
  /// Default: Every below 10^4 events, Final above.
  std::optional<SnapshotMode> snapshots;
  VariantConfig config;
};

struct SnapshotAudit {
  std::size_t index = 0;
  std::size_t event = 0;
  std::uint64_t live_nodes = 0;
  std::uint64_t white_nodes = 0;
  double phi = 0.0;
  CheckResult identity;
  SpineSummary spines;
  Lemma1Result lemma1;
  CreditStats credits;
};

struct AuditReport {
  std::vector<SnapshotAudit> snapshots;
  PropositionResult proposition;
  bool pass = true;
};

AuditReport run_audit(const Trace& trace, const AuditOptions& options = {});

/// Line-oriented key=value report, grouped by snapshot index.
void write_report(const AuditReport& report, std::ostream& sink);

}  // namespace lazypair::audit
