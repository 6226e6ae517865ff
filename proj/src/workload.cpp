#include "lazypair/workload.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "lazypair/oracle.hpp"

namespace lazypair::workload {

std::optional<WorkloadKind> parse_workload_kind(std::string_view text) {
  if (text == "random") return WorkloadKind::Random;
  if (text == "sort") return WorkloadKind::Sort;
  if (text == "dijkstra") return WorkloadKind::DijkstraLike;
  return std::nullopt;
}

void validate_spec(const WorkloadSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("workload size must be at least 1");
  if (spec.heaps == 0) throw std::invalid_argument("need at least one heap");
  const Mix& m = spec.mix;
  const std::array<double, 5> p = {m.insert, m.decrease, m.deletemin, m.findmin, m.meld};
  double sum = 0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("mix probabilities must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mix probabilities must sum to 1");
}

namespace {

// Random keys are value * 2^24 + serial: distinct across the whole trace, so
// the element removed by a deletemin never depends on tie-breaking.
constexpr Key kSerialSpan = Key{1} << 24;
constexpr Key kValueSpan = Key{1} << 30;
constexpr Key kMaxDecrease = Key{1} << 16;

class RandomGenerator {
 public:
  explicit RandomGenerator(const WorkloadSpec& spec) : spec_(spec), rng_(spec.seed) {}

  Trace run() {
    for (std::size_t i = 0; i < spec_.heaps; ++i) add_heap();
    const Mix& m = spec_.mix;
    const std::array<double, 5> weights = {m.insert, m.decrease, m.deletemin, m.findmin, m.meld};
    for (std::size_t step = 0; step < spec_.n; ++step) {
      std::array<double, 5> w = weights;
      if (live_.size() < 2) w[4] = 0.0;
      if (total_nodes_ == 0) w[1] = w[2] = w[3] = 0.0;
      if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) w = {1.0, 0.0, 0.0, 0.0, 0.0};
      std::discrete_distribution<int> pick(w.begin(), w.end());
      switch (pick(rng_)) {
        case 0: insert(); break;
        case 1: decrease(); break;
        case 2: delete_min(); break;
        case 3: trace_.find_min(live_[nonempty_slot()].token); break;
        case 4: meld(); break;
      }
    }
    return std::move(trace_);
  }

 private:
  struct HeapState {
    std::uint32_t token = 0;
    std::set<std::pair<Key, std::uint32_t>> entries;
    std::vector<std::uint32_t> nodes;  // same members, for uniform sampling
  };

  Key next_key(Key value) {
    const Key k = value * kSerialSpan + serial_;
    serial_ = (serial_ + 1) % kSerialSpan;
    return k;
  }

  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  void add_heap() {
    HeapState h;
    h.token = trace_.new_heap("h" + std::to_string(heap_names_++));
    live_.push_back(std::move(h));
  }

  void insert() {
    HeapState& h = live_[uniform(live_.size())];
    const Key value = std::uniform_int_distribution<Key>(0, kValueSpan - 1)(rng_);
    const Key key = next_key(value);
    trace_.insert(h.token, "n" + std::to_string(trace_.node_count()), key);
    const std::uint32_t node = trace_.last_node();
    h.entries.emplace(key, node);
    values_.push_back(value);
    keys_.push_back(key);
    pos_.push_back(h.nodes.size());
    h.nodes.push_back(node);
    ++total_nodes_;
  }

  // Uniform over heaps that have nodes; requires total_nodes_ > 0.
  std::size_t nonempty_slot() {
    std::size_t slot = uniform(live_.size());
    while (live_[slot].entries.empty()) slot = (slot + 1) % live_.size();
    return slot;
  }

  void delete_min() {
    HeapState& h = live_[nonempty_slot()];
    trace_.delete_min(h.token);
    const std::uint32_t node = h.entries.begin()->second;
    h.entries.erase(h.entries.begin());
    const std::size_t at = pos_[node];
    h.nodes[at] = h.nodes.back();
    pos_[h.nodes[at]] = at;
    h.nodes.pop_back();
    --total_nodes_;
  }

  void decrease() {
    HeapState& h = live_[nonempty_slot()];
    const std::uint32_t node = h.nodes[uniform(h.nodes.size())];
    const Key value = values_[node] - std::uniform_int_distribution<Key>(1, kMaxDecrease)(rng_);
    const Key key = next_key(value);
    h.entries.erase({keys_[node], node});
    h.entries.emplace(key, node);
    values_[node] = value;
    keys_[node] = key;
    trace_.decrease(h.token, node, key);
  }

  void meld() {
    const std::size_t a = uniform(live_.size());
    std::size_t b = uniform(live_.size() - 1);
    if (b >= a) ++b;
    HeapState out;
    out.token = trace_.meld(live_[a].token, live_[b].token, "h" + std::to_string(heap_names_++));
    const bool a_big = live_[a].nodes.size() >= live_[b].nodes.size();
    HeapState& big = a_big ? live_[a] : live_[b];
    HeapState& small = a_big ? live_[b] : live_[a];
    out.entries = std::move(big.entries);
    out.entries.merge(small.entries);
    out.nodes = std::move(big.nodes);
    for (std::uint32_t node : small.nodes) {
      pos_[node] = out.nodes.size();
      out.nodes.push_back(node);
    }
    const std::size_t hi = std::max(a, b);
    const std::size_t lo = std::min(a, b);
    live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(hi));
    live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(lo));
    live_.push_back(std::move(out));
    while (live_.size() < spec_.heaps) add_heap();
  }

  const WorkloadSpec& spec_;
  std::mt19937_64 rng_;
  Trace trace_;
  std::vector<HeapState> live_;
  std::vector<Key> values_;
  std::vector<Key> keys_;
  std::vector<std::size_t> pos_;
  std::size_t total_nodes_ = 0;
  std::size_t heap_names_ = 0;
  Key serial_ = 0;
};

Trace sort_trace(const WorkloadSpec& spec) {
  std::vector<Key> keys(spec.n);
  std::iota(keys.begin(), keys.end(), Key{1});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(keys.begin(), keys.end(), rng);
  Trace t;
  const std::uint32_t h = t.new_heap("h0");
  for (std::size_t i = 0; i < keys.size(); ++i) t.insert(h, "n" + std::to_string(i), keys[i]);
  for (std::size_t i = 0; i < keys.size(); ++i) t.delete_min(h);
  return t;
}

}  // namespace

Trace generate(const WorkloadSpec& spec) {
  validate_spec(spec);
  switch (spec.kind) {
    case WorkloadKind::Random:
      return RandomGenerator(spec).run();
    case WorkloadKind::Sort:
      return sort_trace(spec);
    case WorkloadKind::DijkstraLike:
      return dijkstra_trace(random_graph(spec.n, spec.seed));
  }
  throw std::invalid_argument("unknown workload kind");
}

Graph random_graph(std::size_t n, std::uint64_t seed, std::size_t average_degree) {
  Graph g;
  g.adjacency.resize(n);
  if (n < 2) return g;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> vertex(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_int_distribution<std::uint32_t> weight(1, 100);
  for (std::size_t i = 0; i < n * average_degree; ++i) {
    const std::uint32_t u = vertex(rng);
    std::uint32_t v = vertex(rng);
    while (v == u) v = vertex(rng);
    g.adjacency[u].push_back(Graph::Arc{v, weight(rng)});
  }
  return g;
}

Trace dijkstra_trace(const Graph& graph, std::uint32_t source) {
  const std::size_t n = graph.vertices();
  if (source >= n) throw std::invalid_argument("source vertex out of range");
  const Key scale = static_cast<Key>(n);

  Trace t;
  const std::uint32_t h = t.new_heap("h0");
  std::vector<std::optional<std::uint32_t>> token(n);
  std::vector<Key> dist(n, 0);
  std::vector<bool> settled(n, false);
  OracleState pq;
  pq.new_heap(h);

  auto push = [&](std::uint32_t v, Key d) {
    const Key key = d * scale + v;
    if (!token[v]) {
      t.insert(h, "v" + std::to_string(v), key);
      token[v] = t.last_node();
      pq.insert(h, *token[v], key);
    } else {
      t.decrease(h, *token[v], key);
      pq.decrease(h, *token[v], key);
    }
    dist[v] = d;
  };

  push(source, 0);
  while (pq.size(h) > 0) {
    t.delete_min(h);
    const Key key = pq.delete_min(h).second;
    const auto v = static_cast<std::uint32_t>(key % scale);
    settled[v] = true;
    for (const Graph::Arc& arc : graph.adjacency[v]) {
      if (settled[arc.to]) continue;
      const Key d = dist[v] + arc.weight;
      if (!token[arc.to] || d < dist[arc.to]) push(arc.to, d);
    }
  }
  return t;
}

RunResult run_trace(const Trace& trace, const VariantConfig& config, const RunOptions& options) {
  RunResult result;
  Universe u(config);
  OracleState oracle;
  std::vector<std::optional<HeapId>> heaps(trace.heap_count());
  std::vector<NodeHandle> handles(trace.node_count());
  std::vector<std::uint32_t> token_of_slot;
  std::size_t current = 0;

  auto fail = [&](std::size_t at, std::string msg) {
    if (!result.verdict.pass) return;
    result.verdict.pass = false;
    result.verdict.failed_at = at;
    result.verdict.message = std::move(msg);
  };

  const bool validating = options.check && options.validate;
  if (validating) {
    u.set_cleanup_hook([&](const Universe& uni, HeapId h) {
      ++result.cleanup_checks;
      ValidationReport rep = uni.validate(h, true);
      if (!rep.ok()) {
        result.violations += rep.violations.size();
        fail(current, "after clean-up: " + rep.summary());
      }
    });
  }
  if (options.record) result.records.reserve(trace.size());

  const auto& events = trace.events();
  for (current = 0; current < events.size() && result.verdict.pass; ++current) {
    const TraceEvent& e = events[current];
    auto heap = [&](std::uint32_t tok) {
      if (!heaps[tok]) throw HeapError(ErrorKind::UnknownHeap, "heap token used before creation");
      return *heaps[tok];
    };
    try {
      std::uint64_t size_before = 0;
      if (e.kind == OpType::Meld) {
        size_before = u.size(heap(e.heap)) + u.size(heap(*e.heap2));
      } else if (e.kind != OpType::NewHeap) {
        size_before = u.size(heap(e.heap));
      }

      const metrics::CostCounters cleanup_before = u.cleanup_costs();
      const metrics::Snapshot snap = metrics::begin_op(u.counters());
      std::optional<Key> got;
      std::optional<std::uint32_t> removed;
      switch (e.kind) {
        case OpType::NewHeap:
          heaps[e.heap] = u.make_heap();
          break;
        case OpType::Insert: {
          const NodeHandle nh = u.insert(heap(e.heap), *e.key);
          handles[*e.node] = nh;
          if (token_of_slot.size() <= nh.index) token_of_slot.resize(nh.index + 1);
          token_of_slot[nh.index] = *e.node;
          break;
        }
        case OpType::Decrease:
          u.decrease_key(heap(e.heap), handles[*e.node], *e.key);
          break;
        case OpType::FindMin:
          got = u.find_min(heap(e.heap)).key;
          break;
        case OpType::DeleteMin: {
          const MinEntry m = u.delete_min(heap(e.heap));
          got = m.key;
          removed = token_of_slot[m.node.index];
          break;
        }
        case OpType::Meld:
          heaps[*e.result_heap] = u.meld(heap(e.heap), heap(*e.heap2));
          break;
      }
      metrics::OpRecord rec = metrics::end_op(
          u.counters(), snap, metrics::OpMeta{current, e.kind, size_before});
      rec.cleanup_delta = u.cleanup_costs() - cleanup_before;
      if (options.record) result.records.push_back(rec);
      ++result.events_run;

      if (options.after_op) options.after_op(u, current);

      if (options.check) {
        const std::optional<Key> expected = oracle_step(oracle, e, removed);
        if (got) {
          ++result.oracle_checks;
          if (got != expected) {
            fail(current, "key mismatch: heap returned " + std::to_string(*got) +
                              ", oracle expected " + std::to_string(*expected));
          }
        }
        if (validating && (e.kind == OpType::DeleteMin || e.kind == OpType::Meld)) {
          ++result.validations;
          const HeapId target = e.kind == OpType::Meld ? heap(*e.result_heap) : heap(e.heap);
          ValidationReport rep = u.validate(target);
          if (!rep.ok()) {
            result.violations += rep.violations.size();
            fail(current, "validate: " + rep.summary());
          }
        }
      }
    } catch (const HeapError& err) {
      fail(current, std::string(to_string(err.kind())) + ": " + err.what());
    } catch (const OracleError& err) {
      fail(current, std::string("oracle: ") + err.what());
    }
  }

  result.totals = u.counters();
  result.cleanup_totals = u.cleanup_costs();
  return result;
}

}  // namespace lazypair::workload
