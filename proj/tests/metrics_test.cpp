#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "lazypair/metrics.hpp"
#include "lazypair/universe.hpp"

namespace {

using namespace lazypair;
using metrics::CostCounters;
using metrics::OpRecord;

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST(Counters, ArithmeticIsFieldWise) {
  CostCounters a{5, 4, 3, 2, 1, 1};
  CostCounters b{1, 1, 1, 1, 1, 1};
  EXPECT_EQ(a - b, (CostCounters{4, 3, 2, 1, 0, 0}));
  EXPECT_EQ(a - b + b, a);
}

TEST(Snapshot, DeltaOfOneInsertIntoNonEmptyHeap) {
  Universe u;
  HeapId h = u.make_heap();
  u.insert(h, 5);
  auto snap = metrics::begin_op(u.counters());
  u.insert(h, 2);
  auto rec = metrics::end_op(u.counters(), snap, {7, OpType::Insert, 1});
  EXPECT_EQ(rec.op_index, 7u);
  EXPECT_EQ(rec.op_type, OpType::Insert);
  EXPECT_EQ(rec.heap_size_before, 1u);
  EXPECT_EQ(rec.delta.comparisons, 1u);
  EXPECT_EQ(rec.delta.links, 1u);
  EXPECT_EQ(rec.delta.cuts, 0u);
  EXPECT_GE(rec.wall_time.count(), 0);
}

TEST(Snapshot, FindMinDeltaIsZero) {
  Universe u;
  HeapId h = u.make_heap();
  u.insert(h, 1);
  auto snap = metrics::begin_op(u.counters());
  u.find_min(h);
  auto rec = metrics::end_op(u.counters(), snap, {0, OpType::FindMin, 1});
  EXPECT_EQ(rec.delta, CostCounters{});
}

TEST(Snapshot, MismatchedCountersRejected) {
  CostCounters a;
  CostCounters b;
  auto snap = metrics::begin_op(a);
  EXPECT_THROW(metrics::end_op(b, snap, {}), std::invalid_argument);
}

TEST(Csv, EmptyRecordsGiveHeaderOnly) {
  std::ostringstream out;
  metrics::write_csv({}, out);
  EXPECT_EQ(out.str(), std::string(metrics::kCsvHeader) + "\n");
}

TEST(Csv, ThreeRecordsGiveFourLines) {
  std::vector<OpRecord> recs(3);
  recs[1].op_type = OpType::DeleteMin;
  std::ostringstream out;
  metrics::write_csv(recs, out);
  EXPECT_EQ(count_lines(out.str()), 4);
}

TEST(Csv, RoundTripPreservesEveryField) {
  std::vector<OpRecord> recs;
  for (int i = 0; i < 6; ++i) {
    OpRecord r;
    r.op_index = i;
    r.op_type = static_cast<OpType>(i);
    r.heap_size_before = 10 * i;
    r.delta = {static_cast<std::uint64_t>(i), 2u * i, 3u * i, 4u * i, 5u * i, 6u * i};
    r.wall_time = std::chrono::nanoseconds(1000 + i);
    recs.push_back(r);
  }
  std::stringstream io;
  metrics::write_csv(recs, io);
  EXPECT_EQ(metrics::read_csv(io), recs);
}

TEST(Csv, OpTypeNamesAreTraceKeywords) {
  EXPECT_EQ(to_string(OpType::DeleteMin), "deletemin");
  EXPECT_EQ(parse_op_type("decrease"), OpType::Decrease);
  EXPECT_FALSE(parse_op_type("pop").has_value());
}

TEST(Csv, FailingSinkThrows) {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  std::vector<OpRecord> recs(1);
  EXPECT_THROW(metrics::write_csv(recs, out), std::runtime_error);
}

TEST(Csv, MalformedInputThrows) {
  std::istringstream in(std::string(metrics::kCsvHeader) + "\n1,insert,0,1\n");
  EXPECT_ANY_THROW(metrics::read_csv(in));
}

}  // namespace
