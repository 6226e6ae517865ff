#include "lazypair/trace.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace lazypair {

namespace {

bool valid_token(std::string_view t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

void require_token(std::string_view t) {
  if (!valid_token(t)) throw std::invalid_argument("malformed token '" + std::string(t) + "'");
}

}  // namespace

std::uint32_t Trace::intern_heap(std::string_view name) {
  require_token(name);
  if (heap_ids_.count(std::string(name))) {
    throw std::invalid_argument("heap token '" + std::string(name) + "' already declared");
  }
  const auto id = static_cast<std::uint32_t>(heap_names_.size());
  heap_names_.emplace_back(name);
  heap_ids_.emplace(std::string(name), id);
  return id;
}

std::uint32_t Trace::intern_node(std::string_view name) {
  require_token(name);
  if (node_ids_.count(std::string(name))) {
    throw std::invalid_argument("node token '" + std::string(name) + "' already inserted");
  }
  const auto id = static_cast<std::uint32_t>(node_names_.size());
  node_names_.emplace_back(name);
  node_ids_.emplace(std::string(name), id);
  return id;
}

void Trace::require_heap(std::uint32_t heap) const {
  if (heap >= heap_names_.size()) throw std::invalid_argument("unknown heap id");
}

std::optional<std::uint32_t> Trace::find_heap(std::string_view name) const {
  auto it = heap_ids_.find(std::string(name));
  if (it == heap_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Trace::find_node(std::string_view name) const {
  auto it = node_ids_.find(std::string(name));
  if (it == node_ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Trace::new_heap(std::string_view name) {
  const std::uint32_t id = intern_heap(name);
  events_.push_back(TraceEvent{OpType::NewHeap, id, {}, {}, {}, {}});
  return id;
}

void Trace::insert(std::uint32_t heap, std::string_view node, Key key) {
  require_heap(heap);
  const std::uint32_t id = intern_node(node);
  events_.push_back(TraceEvent{OpType::Insert, heap, {}, {}, id, key});
}

void Trace::decrease(std::uint32_t heap, std::uint32_t node, Key key) {
  require_heap(heap);
  if (node >= node_names_.size()) throw std::invalid_argument("unknown node id");
  events_.push_back(TraceEvent{OpType::Decrease, heap, {}, {}, node, key});
}

void Trace::find_min(std::uint32_t heap) {
  require_heap(heap);
  events_.push_back(TraceEvent{OpType::FindMin, heap, {}, {}, {}, {}});
}

void Trace::delete_min(std::uint32_t heap) {
  require_heap(heap);
  events_.push_back(TraceEvent{OpType::DeleteMin, heap, {}, {}, {}, {}});
}

std::uint32_t Trace::meld(std::uint32_t a, std::uint32_t b, std::string_view out) {
  require_heap(a);
  require_heap(b);
  const std::uint32_t id = intern_heap(out);
  events_.push_back(TraceEvent{OpType::Meld, a, b, id, {}, {}});
  return id;
}

Trace parse_trace(std::istream& source) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> words;
  while (std::getline(source, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    words.clear();
    std::string_view rest = line;
    while (true) {
      auto b = rest.find_first_not_of(" \t");
      if (b == std::string_view::npos) break;
      rest.remove_prefix(b);
      auto e = rest.find_first_of(" \t");
      words.push_back(rest.substr(0, e));
      if (e == std::string_view::npos) break;
      rest.remove_prefix(e);
    }
    if (words.empty() || words[0].front() == '#') continue;

    auto fail = [&](const std::string& msg) -> TraceParseError {
      return TraceParseError(lineno, msg);
    };
    auto arity = [&](std::size_t n) {
      if (words.size() != n + 1) {
        throw fail("'" + std::string(words[0]) + "' expects " + std::to_string(n) +
                   " argument(s), got " + std::to_string(words.size() - 1));
      }
    };
    auto heap = [&](std::string_view t) {
      if (!valid_token(t)) throw fail("malformed heap token '" + std::string(t) + "'");
      auto id = trace.find_heap(t);
      if (!id) throw fail("unknown heap token '" + std::string(t) + "'");
      return *id;
    };
    auto key = [&](std::string_view t) {
      Key k = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), k);
      if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw fail("expected a 64-bit integer key, got '" + std::string(t) + "'");
      }
      return k;
    };
    auto fresh = [&](std::string_view t, const char* what) {
      if (!valid_token(t)) throw fail(std::string("malformed ") + what + " token '" + std::string(t) + "'");
    };

    auto op = parse_op_type(words[0]);
    if (!op) throw fail("unknown operation '" + std::string(words[0]) + "'");
    try {
      switch (*op) {
        case OpType::NewHeap:
          arity(1);
          fresh(words[1], "heap");
          trace.new_heap(words[1]);
          break;
        case OpType::Insert: {
          arity(3);
          const auto h = heap(words[1]);
          fresh(words[2], "node");
          trace.insert(h, words[2], key(words[3]));
          break;
        }
        case OpType::Decrease: {
          arity(3);
          const auto h = heap(words[1]);
          auto n = trace.find_node(words[2]);
          if (!n) throw fail("unknown node token '" + std::string(words[2]) + "'");
          trace.decrease(h, *n, key(words[3]));
          break;
        }
        case OpType::FindMin:
          arity(1);
          trace.find_min(heap(words[1]));
          break;
        case OpType::DeleteMin:
          arity(1);
          trace.delete_min(heap(words[1]));
          break;
        case OpType::Meld: {
          arity(3);
          const auto a = heap(words[1]);
          const auto b = heap(words[2]);
          fresh(words[3], "heap");
          trace.meld(a, b, words[3]);
          break;
        }
      }
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
  }
  return trace;
}

Trace parse_trace_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

void write_trace(const Trace& trace, std::ostream& sink) {
  for (const TraceEvent& e : trace.events()) {
    sink << to_string(e.kind) << ' ' << trace.heap_name(e.heap);
    switch (e.kind) {
      case OpType::Insert:
      case OpType::Decrease:
        sink << ' ' << trace.node_name(*e.node) << ' ' << *e.key;
        break;
      case OpType::Meld:
        sink << ' ' << trace.heap_name(*e.heap2) << ' ' << trace.heap_name(*e.result_heap);
        break;
      default:
        break;
    }
    sink << '\n';
  }
}

std::string format_trace(const Trace& trace) {
  std::ostringstream os;
  write_trace(trace, os);
  return os.str();
}

}  // namespace lazypair
