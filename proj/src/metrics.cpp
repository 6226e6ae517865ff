#include "lazypair/metrics.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lazypair/types.hpp"

namespace lazypair {

namespace {

constexpr std::array<std::string_view, 6> kOpNames = {
    "new", "insert", "decrease", "findmin", "deletemin", "meld"};

}  // namespace

std::string_view to_string(OpType type) {
  return kOpNames[static_cast<std::size_t>(type)];
}

std::optional<OpType> parse_op_type(std::string_view text) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == text) return static_cast<OpType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(LinkOrigin origin) {
  switch (origin) {
    case LinkOrigin::None: return "none";
    case LinkOrigin::InsertLink: return "insert";
    case LinkOrigin::MeldLink: return "meld";
    case LinkOrigin::PairingLink: return "pairing";
    case LinkOrigin::CleanupLink: return "cleanup";
  }
  return "?";
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidHandle: return "InvalidHandle";
    case ErrorKind::EmptyHeap: return "EmptyHeap";
    case ErrorKind::KeyIncrease: return "KeyIncrease";
    case ErrorKind::NotInHeap: return "NotInHeap";
    case ErrorKind::UnknownHeap: return "UnknownHeap";
    case ErrorKind::SelfMeld: return "SelfMeld";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "?";
}

VariantConfig VariantConfig::normalized() const {
  if (!(periodic_factor > 0.0)) {
    throw std::invalid_argument("periodic factor must be positive");
  }
  if (!(direct_relink_fraction > 0.0 && direct_relink_fraction <= 1.0)) {
    throw std::invalid_argument("direct relink fraction must be in (0, 1]");
  }
  VariantConfig c = *this;
  if (c.mode == Mode::Eager) {
    c.cleanup_on_meld = false;
    c.periodic_cleanup = false;
    c.direct_relink = false;
  }
  return c;
}

namespace metrics {

CostCounters& CostCounters::operator+=(const CostCounters& o) {
  comparisons += o.comparisons;
  links += o.links;
  cuts += o.cuts;
  sort_comparisons += o.sort_comparisons;
  pool_trees += o.pool_trees;
  groups += o.groups;
  return *this;
}

CostCounters operator-(const CostCounters& a, const CostCounters& b) {
  CostCounters d;
  d.comparisons = a.comparisons - b.comparisons;
  d.links = a.links - b.links;
  d.cuts = a.cuts - b.cuts;
  d.sort_comparisons = a.sort_comparisons - b.sort_comparisons;
  d.pool_trees = a.pool_trees - b.pool_trees;
  d.groups = a.groups - b.groups;
  return d;
}

Snapshot begin_op(const CostCounters& counters) {
  return Snapshot{&counters, counters, std::chrono::steady_clock::now()};
}

OpRecord end_op(const CostCounters& counters, const Snapshot& snap, const OpMeta& meta) {
  auto now = std::chrono::steady_clock::now();
  if (snap.source != &counters) {
    throw std::invalid_argument("snapshot was taken from different counters");
  }
  OpRecord r;
  r.op_index = meta.op_index;
  r.op_type = meta.op_type;
  r.heap_size_before = meta.heap_size_before;
  r.delta = counters - snap.at;
  r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(now - snap.started);
  return r;
}

void write_csv(const std::vector<OpRecord>& records, std::ostream& sink) {
  sink << kCsvHeader << '\n';
  for (const auto& r : records) {
    sink << r.op_index << ',' << to_string(r.op_type) << ',' << r.heap_size_before << ','
         << r.delta.comparisons << ',' << r.delta.links << ',' << r.delta.cuts << ','
         << r.delta.sort_comparisons << ',' << r.delta.pool_trees << ',' << r.delta.groups
         << ',' << r.wall_time.count() << '\n';
  }
  sink.flush();
  if (!sink) throw std::runtime_error("metrics CSV: write failed");
}

namespace {

std::uint64_t parse_u64(std::string_view field, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error("metrics CSV line " + std::to_string(line) + ": bad number '" +
                             std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<OpRecord> read_csv(std::istream& source) {
  std::string line;
  if (!std::getline(source, line) || line != kCsvHeader) {
    throw std::runtime_error("metrics CSV: missing or unexpected header");
  }
  std::vector<OpRecord> out;
  std::size_t lineno = 1;
  while (std::getline(source, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 10) {
      throw std::runtime_error("metrics CSV line " + std::to_string(lineno) +
                               ": expected 10 fields");
    }
    auto type = parse_op_type(f[1]);
    if (!type) {
      throw std::runtime_error("metrics CSV line " + std::to_string(lineno) +
                               ": unknown op type");
    }
    OpRecord r;
    r.op_index = parse_u64(f[0], lineno);
    r.op_type = *type;
    r.heap_size_before = parse_u64(f[2], lineno);
    r.delta.comparisons = parse_u64(f[3], lineno);
    r.delta.links = parse_u64(f[4], lineno);
    r.delta.cuts = parse_u64(f[5], lineno);
    r.delta.sort_comparisons = parse_u64(f[6], lineno);
    r.delta.pool_trees = parse_u64(f[7], lineno);
    r.delta.groups = parse_u64(f[8], lineno);
    r.wall_time = std::chrono::nanoseconds(parse_u64(f[9], lineno));
    out.push_back(r);
  }
  return out;
}

}  // namespace metrics
}  // namespace lazypair
