#include "lazypair/audit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace lazypair::audit {

std::optional<Color> ColorMap::color(std::uint32_t node, std::size_t t) const {
  const auto& ins = inserted_at_.at(node);
  if (!ins || *ins > t) return std::nullopt;
  const auto& del = deleted_at_.at(node);
  if (!del) return Color::Black;
  if (t >= *del) return std::nullopt;
  return Color::White;
}

namespace {

// Replays a trace on a Universe, keeping token <-> handle maps.
class Replayer {
 public:
  Replayer(const Trace& trace, const VariantConfig& config)
      : trace_(trace), u_(config), heaps_(trace.heap_count()), handles_(trace.node_count()) {}

  /// Returns the token removed by a deletemin.
  std::optional<std::uint32_t> step(std::size_t t) {
    const TraceEvent& e = trace_.events()[t];
    try {
      switch (e.kind) {
        case OpType::NewHeap:
          heaps_[e.heap] = u_.make_heap();
          labels_[heaps_[e.heap]->raw] = trace_.heap_name(e.heap);
          return std::nullopt;
        case OpType::Insert: {
          const NodeHandle h = u_.insert(heap(e.heap), *e.key);
          handles_[*e.node] = h;
          if (token_of_slot_.size() <= h.index) token_of_slot_.resize(h.index + 1);
          token_of_slot_[h.index] = *e.node;
          return std::nullopt;
        }
        case OpType::Decrease:
          u_.decrease_key(heap(e.heap), handles_[*e.node], *e.key);
          return std::nullopt;
        case OpType::FindMin:
          u_.find_min(heap(e.heap));
          return std::nullopt;
        case OpType::DeleteMin:
          return token_of_slot_[u_.delete_min(heap(e.heap)).node.index];
        case OpType::Meld: {
          const HeapId out = u_.meld(heap(e.heap), heap(*e.heap2));
          heaps_[*e.result_heap] = out;
          labels_[out.raw] = trace_.heap_name(*e.result_heap);
          return std::nullopt;
        }
      }
    } catch (const HeapError& err) {
      throw AuditError("event " + std::to_string(t) + ": " + err.what());
    }
    return std::nullopt;
  }

  ForestSnapshot snapshot(std::size_t t) const {
    std::vector<std::pair<HeapId, std::string>> labels;
    for (HeapId h : u_.live_heaps()) labels.emplace_back(h, labels_.at(h.raw));
    return take_snapshot(u_, t, token_of_slot_, labels);
  }

  std::uint64_t live_nodes() const {
    std::uint64_t n = 0;
    for (HeapId h : u_.live_heaps()) n += u_.size(h);
    return n;
  }

 private:
  HeapId heap(std::uint32_t tok) const {
    if (!heaps_[tok]) throw HeapError(ErrorKind::UnknownHeap, "heap token used before creation");
    return *heaps_[tok];
  }

  const Trace& trace_;
  Universe u_;
  std::vector<std::optional<HeapId>> heaps_;
  std::vector<NodeHandle> handles_;
  std::vector<std::uint32_t> token_of_slot_;
  std::unordered_map<std::uint32_t, std::string> labels_;
};

double log_factorial2(std::uint64_t k) {
  static std::vector<double> table{0.0};
  while (table.size() <= k) {
    const auto i = table.size();
    table.push_back(table.back() + std::log2(static_cast<double>(i)));
  }
  return table[k];
}

double link_term(std::uint64_t w, std::uint64_t w_prime) {
  return std::log2(static_cast<double>(w + w_prime) / static_cast<double>(w));
}

bool counts_for_lemma1(LinkOrigin o) {
  return o == LinkOrigin::InsertLink || o == LinkOrigin::MeldLink;
}

}  // namespace

ColorMap compute_colors(const Trace& trace, const VariantConfig& config) {
  ColorMap colors(trace.node_count());
  Replayer r(trace, config);
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const TraceEvent& e = trace.events()[t];
    const auto removed = r.step(t);
    if (e.kind == OpType::Insert) colors.set_inserted(*e.node, t);
    if (removed) colors.set_deleted(*removed, t);
  }
  return colors;
}

ForestSnapshot take_snapshot(const Universe& u, std::size_t time,
                             std::span<const std::uint32_t> token_of_slot,
                             const std::vector<std::pair<HeapId, std::string>>& labels) {
  ForestSnapshot snap;
  snap.time = time;
  std::vector<NodeHandle> handle_at;
  auto add = [&](NodeHandle h, std::int32_t parent) {
    const NodeView v = u.inspect(h);
    SnapNode n;
    n.token = token_of_slot[h.index];
    n.key = v.key;
    n.parent = parent;
    n.origin = v.link_origin;
    snap.nodes.push_back(n);
    handle_at.push_back(h);
    return static_cast<std::int32_t>(snap.nodes.size() - 1);
  };

  for (const auto& [heap, label] : labels) {
    const auto root = u.root(heap);
    if (!root) continue;
    const std::size_t first = snap.nodes.size();
    snap.trees.push_back(SnapTree{label, add(*root, kNone)});
    // Breadth-first: every child gets a larger index than its parent.
    for (std::size_t i = first; i < snap.nodes.size(); ++i) {
      std::int32_t prev = kNone;
      for (NodeHandle c : u.children(handle_at[i])) {
        const std::int32_t ci = add(c, static_cast<std::int32_t>(i));
        if (prev == kNone) {
          snap.nodes[i].first_child = ci;
        } else {
          snap.nodes[prev].next_sibling = ci;
        }
        prev = ci;
      }
    }
  }
  return snap;
}

Weights compute_weights(const ForestSnapshot& snap, const ColorMap& colors) {
  const std::size_t n = snap.nodes.size();
  Weights wt;
  wt.white.resize(n);
  wt.w.assign(n, 0);
  wt.w_prime.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = colors.color(snap.nodes[i].token, snap.time);
    if (!c) {
      throw AuditError("no color for node token " + std::to_string(snap.nodes[i].token) +
                       " at event " + std::to_string(snap.time));
    }
    wt.white[i] = *c == Color::White;
    wt.w[i] = wt.white[i] ? 1 : 0;
  }
  for (std::size_t i = n; i-- > 0;) {
    if (snap.nodes[i].parent != kNone) wt.w[snap.nodes[i].parent] += wt.w[i];
  }
  std::vector<std::int32_t> kids;
  for (std::size_t p = 0; p < n; ++p) {
    kids.clear();
    for (auto c = snap.nodes[p].first_child; c != kNone; c = snap.nodes[c].next_sibling) {
      kids.push_back(c);
    }
    std::uint64_t running = wt.white[p] ? 1 : 0;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      wt.w_prime[*it] = running;
      running += wt.w[*it];
    }
  }
  return wt;
}

CreditStats count_credit_stats(const ForestSnapshot& snap, const ColorMap& colors) {
  const Weights wt = compute_weights(snap, colors);
  CreditStats s;
  for (std::size_t i = 0; i < snap.nodes.size(); ++i) {
    const SnapNode& x = snap.nodes[i];
    if (wt.w[i] > 0 && x.next_sibling != kNone && wt.w[x.next_sibling] == 0) ++s.active_runs;
    if (x.parent != kNone && wt.w[x.parent] > 0) ++s.active_parent_children;
  }
  return s;
}

PotentialReport compute_potential(const ForestSnapshot& snap, const ColorMap& colors) {
  const Weights wt = compute_weights(snap, colors);
  PotentialReport r;
  for (std::size_t i = 0; i < snap.nodes.size(); ++i) {
    const SnapNode& x = snap.nodes[i];
    if (x.parent == kNone || wt.w[i] == 0) continue;
    LinkTerm t{x.token, wt.w[i], wt.w_prime[i], link_term(wt.w[i], wt.w_prime[i]), x.origin};
    r.phi += t.term;
    r.links.push_back(t);
  }
  const CreditStats cs = count_credit_stats(snap, colors);
  r.active_runs = cs.active_runs;
  r.active_parent_children = cs.active_parent_children;
  return r;
}

CheckResult check_leftmost_identity(const ForestSnapshot& snap, const ColorMap& colors) {
  const Weights wt = compute_weights(snap, colors);
  CheckResult r;
  for (std::size_t p = 0; p < snap.nodes.size(); ++p) {
    const auto x = snap.nodes[p].first_child;
    if (x == kNone) continue;
    ++r.checked;
    if (wt.w[x] + wt.w_prime[x] != wt.w[p]) {
      ++r.failures;
      r.ok = false;
      if (r.detail.empty()) {
        r.detail = "token " + std::to_string(snap.nodes[x].token) + ": w+w'=" +
                   std::to_string(wt.w[x] + wt.w_prime[x]) + " but w(parent)=" +
                   std::to_string(wt.w[p]);
      }
    }
  }
  return r;
}

SpineCheck check_left_spine(const ForestSnapshot& snap, const ColorMap& colors, std::int32_t z) {
  if (z < 0 || static_cast<std::size_t>(z) >= snap.nodes.size()) {
    throw AuditError("spine start out of range");
  }
  const Weights wt = compute_weights(snap, colors);
  if (wt.w[z] == 0) throw AuditError("left-spine check needs w(z) > 0");
  SpineCheck c;
  c.w_top = wt.w[z];
  std::int32_t d = z;
  for (auto x = snap.nodes[z].first_child; x != kNone && wt.w[x] > 0; x = snap.nodes[x].first_child) {
    c.sum += link_term(wt.w[x], wt.w_prime[x]);
    d = x;
  }
  c.w_deepest = wt.w[d];
  c.expected = std::log2(static_cast<double>(c.w_top)) - std::log2(static_cast<double>(c.w_deepest));
  c.ok = std::abs(c.sum - c.expected) <= kTolerance;
  c.equals_log_w = c.w_deepest == 1;
  return c;
}

SpineSummary check_all_left_spines(const ForestSnapshot& snap, const ColorMap& colors) {
  const Weights wt = compute_weights(snap, colors);
  const std::size_t n = snap.nodes.size();
  std::vector<double> sum(n, 0.0);
  std::vector<std::uint64_t> deepest(n, 0);
  SpineSummary s;
  for (std::size_t i = n; i-- > 0;) {
    const auto c = snap.nodes[i].first_child;
    if (c != kNone && wt.w[c] > 0) {
      sum[i] = link_term(wt.w[c], wt.w_prime[c]) + sum[c];
      deepest[i] = deepest[c];
    } else {
      deepest[i] = wt.w[i];
    }
    if (wt.w[i] == 0) continue;
    ++s.result.checked;
    const double expected = std::log2(static_cast<double>(wt.w[i])) -
                            std::log2(static_cast<double>(deepest[i]));
    const double err = std::abs(sum[i] - expected);
    s.result.max_error = std::max(s.result.max_error, err);
    if (deepest[i] == 1) ++s.exact_log_w;
    if (err > kTolerance) {
      ++s.result.failures;
      s.result.ok = false;
      if (s.result.detail.empty()) {
        s.result.detail = "token " + std::to_string(snap.nodes[i].token) + ": spine sum " +
                          std::to_string(sum[i]) + " vs " + std::to_string(expected);
      }
    }
  }
  return s;
}

Lemma1Result check_lemma1(const ForestSnapshot& snap, const ColorMap& colors) {
  const Weights wt = compute_weights(snap, colors);
  const std::size_t n = snap.nodes.size();
  std::vector<std::size_t> tree_of(n, 0);
  std::vector<double> sums(snap.trees.size(), 0.0);
  for (std::size_t t = 0; t < snap.trees.size(); ++t) tree_of[snap.trees[t].root] = t;
  for (std::size_t i = 0; i < n; ++i) {
    const SnapNode& x = snap.nodes[i];
    if (x.parent == kNone) continue;
    tree_of[i] = tree_of[x.parent];
    if (wt.w[i] > 0 && counts_for_lemma1(x.origin)) {
      sums[tree_of[i]] += link_term(wt.w[i], wt.w_prime[i]);
    }
  }
  Lemma1Result r;
  bool first = true;
  for (std::size_t t = 0; t < snap.trees.size(); ++t) {
    TreeMargin m;
    m.label = snap.trees[t].label;
    m.whites = wt.w[snap.trees[t].root];
    m.insert_meld_sum = sums[t];
    m.bound = log_factorial2(m.whites);
    m.margin = m.bound - m.insert_meld_sum;
    if (m.margin < -kTolerance) r.ok = false;
    r.min_margin = first ? m.margin : std::min(r.min_margin, m.margin);
    first = false;
    r.trees.push_back(std::move(m));
  }
  return r;
}

PropositionResult check_proposition(std::span<const std::uint64_t> ns) {
  PropositionResult r;
  for (std::uint64_t n : ns) {
    if (n <= 2) throw std::invalid_argument("proposition check needs n > 2");
    // log2 log2 (n+1) - log2 log2 n = log2(1 + ln(1 + 1/n) / ln n), evaluated
    // without cancellation.
    const double x = static_cast<double>(n);
    const double value = x * std::log1p(std::log1p(1.0 / x) / std::log(x)) / std::numbers::ln2;
    ++r.checked;
    if (r.checked == 1 || value > r.max_value) {
      r.max_value = value;
      r.argmax = n;
    }
    if (!(value < std::numbers::log2e)) r.ok = false;
  }
  return r;
}

PropositionResult check_proposition_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> ns;
  ns.reserve(hi >= lo ? hi - lo + 1 : 0);
  for (std::uint64_t n = lo; n <= hi; ++n) ns.push_back(n);
  return check_proposition(ns);
}

AuditReport run_audit(const Trace& trace, const AuditOptions& options) {
  const SnapshotMode mode = options.snapshots.value_or(
      trace.size() < 10'000 ? SnapshotMode::Every : SnapshotMode::Final);
  const ColorMap colors = compute_colors(trace, options.config);

  AuditReport report;
  Replayer r(trace, options.config);
  std::uint64_t peak = 0;
  auto audit_at = [&](std::size_t t) {
    const ForestSnapshot snap = r.snapshot(t);
    const Weights wt = compute_weights(snap, colors);
    SnapshotAudit a;
    a.index = report.snapshots.size();
    a.event = t;
    a.live_nodes = snap.nodes.size();
    a.white_nodes = static_cast<std::uint64_t>(std::count(wt.white.begin(), wt.white.end(), true));
    a.phi = compute_potential(snap, colors).phi;
    a.identity = check_leftmost_identity(snap, colors);
    a.spines = check_all_left_spines(snap, colors);
    a.lemma1 = check_lemma1(snap, colors);
    a.credits = count_credit_stats(snap, colors);
    if (!a.identity.ok || !a.spines.result.ok || !a.lemma1.ok) report.pass = false;
    report.snapshots.push_back(std::move(a));
  };

  for (std::size_t t = 0; t < trace.size(); ++t) {
    r.step(t);
    peak = std::max(peak, r.live_nodes());
    if (mode == SnapshotMode::Every || t + 1 == trace.size()) audit_at(t);
  }
  report.proposition = check_proposition_range(3, std::max<std::uint64_t>(3, peak));
  if (!report.proposition.ok) report.pass = false;
  return report;
}

void write_report(const AuditReport& report, std::ostream& os) {
  const auto old_precision = os.precision(12);
  for (const SnapshotAudit& a : report.snapshots) {
    os << "snapshot=" << a.index << '\n'
       << "event=" << a.event << '\n'
       << "live_nodes=" << a.live_nodes << '\n'
       << "white_nodes=" << a.white_nodes << '\n'
       << "phi=" << a.phi << '\n'
       << "identity_checked=" << a.identity.checked << '\n'
       << "identity_failures=" << a.identity.failures << '\n'
       << "spine_checked=" << a.spines.result.checked << '\n'
       << "spine_failures=" << a.spines.result.failures << '\n'
       << "spine_max_error=" << a.spines.result.max_error << '\n'
       << "spine_exact_log_w=" << a.spines.exact_log_w << '\n';
    for (const TreeMargin& m : a.lemma1.trees) {
      os << "lemma1_margin." << m.label << '=' << m.margin << '\n'
         << "lemma1_whites." << m.label << '=' << m.whites << '\n';
    }
    os << "lemma1_min_margin=" << a.lemma1.min_margin << '\n'
       << "active_runs=" << a.credits.active_runs << '\n'
       << "active_parent_children=" << a.credits.active_parent_children << '\n'
       << '\n';
  }
  os << "summary=1\n"
     << "snapshots=" << report.snapshots.size() << '\n'
     << "proposition_checked=" << report.proposition.checked << '\n'
     << "proposition_max=" << report.proposition.max_value << '\n'
     << "proposition_argmax=" << report.proposition.argmax << '\n'
     << "status=" << (report.pass ? "PASS" : "FAIL") << '\n';
  os.precision(old_precision);
}

}  // namespace lazypair::audit
