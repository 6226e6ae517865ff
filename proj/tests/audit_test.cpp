#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lazypair/audit.hpp"
#include "lazypair/workload.hpp"

namespace {

using namespace lazypair;
using namespace lazypair::audit;

// Hand-built forests. Snapshot time is 1; white nodes are deleted at 10.
struct Forest {
  ForestSnapshot snap;
  ColorMap colors{64};

  std::int32_t add(bool white, std::int32_t parent = kNone, LinkOrigin origin = LinkOrigin::InsertLink) {
    const auto id = static_cast<std::int32_t>(snap.nodes.size());
    SnapNode n;
    n.token = static_cast<std::uint32_t>(id);
    n.key = id;
    n.parent = parent;
    colors.set_inserted(n.token, 0);
    if (white) colors.set_deleted(n.token, 10);
    if (parent == kNone) {
      snap.trees.push_back({"t" + std::to_string(snap.trees.size()), id});
    } else {
      n.origin = origin;
      auto& p = snap.nodes[parent];
      if (p.first_child == kNone) {
        p.first_child = id;
      } else {
        std::int32_t c = p.first_child;
        while (snap.nodes[c].next_sibling != kNone) c = snap.nodes[c].next_sibling;
        snap.nodes[c].next_sibling = id;
      }
    }
    snap.nodes.push_back(n);
    return id;
  }

  Forest() { snap.time = 1; }
};

TEST(Potential, AllBlackIsZero) {
  Forest f;
  auto r = f.add(false);
  f.add(false, r);
  f.add(false, r);
  auto p = compute_potential(f.snap, f.colors);
  EXPECT_EQ(p.phi, 0.0);
  EXPECT_TRUE(p.links.empty());
}

TEST(Potential, WhiteParentWithOneWhiteChild) {
  Forest f;
  auto r = f.add(true);
  f.add(true, r);
  auto p = compute_potential(f.snap, f.colors);
  EXPECT_DOUBLE_EQ(p.phi, 1.0);
  ASSERT_EQ(p.links.size(), 1u);
  EXPECT_EQ(p.links[0].w, 1u);
  EXPECT_EQ(p.links[0].w_prime, 1u);
}

TEST(Potential, WhiteChainOfThreeIsLogThree) {
  Forest f;
  auto a = f.add(true);
  auto b = f.add(true, a);
  f.add(true, b);
  EXPECT_NEAR(compute_potential(f.snap, f.colors).phi, std::log2(3.0), 1e-12);
}

TEST(Potential, BlackLeafContributesNothing) {
  Forest f;
  auto r = f.add(true);
  f.add(false, r);
  f.add(true, r);
  auto p = compute_potential(f.snap, f.colors);
  // Only the rightmost white child counts: w = 1, w' = 1.
  EXPECT_DOUBLE_EQ(p.phi, 1.0);
}

TEST(Weights, SiblingsAndParentEnterWPrime) {
  Forest f;
  auto r = f.add(false);
  auto x = f.add(true, r);
  auto y = f.add(true, r);
  f.add(true, y);
  auto w = compute_weights(f.snap, f.colors);
  EXPECT_EQ(w.w[r], 3u);
  EXPECT_EQ(w.w[x], 1u);
  EXPECT_EQ(w.w_prime[x], 2u);  // y's subtree, parent black
  EXPECT_EQ(w.w_prime[y], 0u);
  EXPECT_EQ(w.w_prime[r], 0u);
}

TEST(Weights, UncoloredNodeThrows) {
  Forest f;
  f.add(true);
  f.snap.time = 20;  // after its deletion
  EXPECT_THROW(compute_weights(f.snap, f.colors), AuditError);
}

Forest spine_forest(std::int32_t& z) {
  Forest f;
  z = f.add(true);
  auto y = f.add(true, z);
  f.add(true, z);
  auto d = f.add(true, y);
  f.add(false, d);
  f.add(true, d);
  return f;
}

TEST(Spine, TelescopesToLogRatio) {
  std::int32_t z;
  Forest f = spine_forest(z);
  auto s = check_left_spine(f.snap, f.colors, z);
  EXPECT_TRUE(s.ok);
  EXPECT_EQ(s.w_top, 5u);
  EXPECT_EQ(s.w_deepest, 2u);
  EXPECT_FALSE(s.equals_log_w);
  EXPECT_NEAR(s.sum, std::log2(5.0) - 1.0, 1e-12);
  EXPECT_NEAR(s.expected, std::log2(5.0) - 1.0, 1e-12);
}

TEST(Spine, DeepestSingleWhiteGivesLogW) {
  Forest f;
  auto z = f.add(true);
  auto a = f.add(true, z);
  f.add(true, z);
  f.add(true, a);
  auto s = check_left_spine(f.snap, f.colors, z);
  EXPECT_TRUE(s.equals_log_w);
  EXPECT_NEAR(s.sum, std::log2(4.0), 1e-12);
}

TEST(Spine, ZeroWeightTopThrows) {
  Forest f;
  auto z = f.add(false);
  EXPECT_THROW(check_left_spine(f.snap, f.colors, z), AuditError);
}

TEST(Spine, AllSpinesAgreeWithSingleChecks) {
  std::int32_t z;
  Forest f = spine_forest(z);
  auto all = check_all_left_spines(f.snap, f.colors);
  EXPECT_TRUE(all.result.ok);
  EXPECT_EQ(all.result.checked, 5u);
  EXPECT_LE(all.result.max_error, kTolerance);
}

TEST(Identity, HoldsOnHandBuiltForest) {
  std::int32_t z;
  Forest f = spine_forest(z);
  auto r = check_leftmost_identity(f.snap, f.colors);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.checked, 3u);
}

TEST(Lemma1, NoWhitesAndOneWhite) {
  Forest f;
  auto r = f.add(false);
  f.add(false, r);
  auto res = check_lemma1(f.snap, f.colors);
  ASSERT_EQ(res.trees.size(), 1u);
  EXPECT_EQ(res.trees[0].whites, 0u);
  EXPECT_DOUBLE_EQ(res.trees[0].margin, 0.0);

  Forest g;
  g.add(true);
  auto one = check_lemma1(g.snap, g.colors);
  EXPECT_EQ(one.trees[0].whites, 1u);
  EXPECT_DOUBLE_EQ(one.trees[0].bound, 0.0);
  EXPECT_TRUE(one.ok);
}

TEST(Lemma1, PairMeetsBoundExactly) {
  Forest f;
  auto r = f.add(true);
  f.add(true, r, LinkOrigin::MeldLink);
  auto res = check_lemma1(f.snap, f.colors);
  EXPECT_NEAR(res.trees[0].insert_meld_sum, 1.0, 1e-12);
  EXPECT_NEAR(res.trees[0].bound, 1.0, 1e-12);
  EXPECT_NEAR(res.min_margin, 0.0, 1e-12);
}

TEST(Lemma1, PairingLinksAreExcluded) {
  Forest f;
  auto r = f.add(true);
  auto c = f.add(true, r, LinkOrigin::PairingLink);
  f.add(true, c, LinkOrigin::CleanupLink);
  auto res = check_lemma1(f.snap, f.colors);
  EXPECT_DOUBLE_EQ(res.trees[0].insert_meld_sum, 0.0);
  EXPECT_NEAR(res.trees[0].bound, std::log2(6.0), 1e-12);
}

TEST(Proposition, KnownValues) {
  struct Case {
    std::uint64_t n;
    double value;
  };
  for (auto [n, v] : {Case{3, 1.006653877638332}, Case{4, 0.8612931829471505},
                      Case{5, 0.7741002810460681}, Case{1u << 20, 0.10406839584701847},
                      Case{1000000, 0.10442569322908078}}) {
    std::uint64_t ns[] = {n};
    auto r = check_proposition(ns);
    EXPECT_NEAR(r.max_value, v, 1e-12) << "n=" << n;
    EXPECT_TRUE(r.ok);
  }
}

TEST(Proposition, RangeMaximumAtThree) {
  auto r = check_proposition_range(3, 5000);
  EXPECT_EQ(r.argmax, 3u);
  EXPECT_EQ(r.checked, 4998u);
  EXPECT_LT(r.max_value, 1.4426950408889634);
}

TEST(Proposition, SmallArgumentsRejected) {
  std::uint64_t ns[] = {5, 2};
  EXPECT_THROW(check_proposition(ns), std::invalid_argument);
  EXPECT_THROW(check_proposition_range(1, 10), std::invalid_argument);
}

TEST(Credits, RunsAndActiveParents) {
  Forest f;
  auto r = f.add(false);
  f.add(true, r);
  f.add(false, r);
  f.add(true, r);
  f.add(false, r);
  auto s = count_credit_stats(f.snap, f.colors);
  EXPECT_EQ(s.active_runs, 2u);
  EXPECT_EQ(s.active_parent_children, 4u);

  Forest g;
  auto b = g.add(false);
  g.add(false, b);
  auto t = count_credit_stats(g.snap, g.colors);
  EXPECT_EQ(t.active_runs, 0u);
  EXPECT_EQ(t.active_parent_children, 0u);
}

// Brute force: a node is white after event t iff some later deletemin
// removes it, found by scanning the removal log.
TEST(Colors, MatchBruteForce) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    workload::WorkloadSpec spec;
    spec.n = 400;
    spec.seed = seed;
    Trace t = workload::generate(spec);
    ColorMap cm = compute_colors(t);

    Universe u;
    std::vector<HeapId> ids(t.heap_count());
    std::vector<NodeHandle> handles(t.node_count());
    std::vector<std::optional<std::uint32_t>> removed(t.size());
    std::vector<std::optional<std::size_t>> inserted(t.node_count());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& e = t.events()[i];
      switch (e.kind) {
        case OpType::NewHeap: ids[e.heap] = u.make_heap(); break;
        case OpType::Insert:
          handles[*e.node] = u.insert(ids[e.heap], *e.key);
          inserted[*e.node] = i;
          break;
        case OpType::Decrease: u.decrease_key(ids[e.heap], handles[*e.node], *e.key); break;
        case OpType::FindMin: u.find_min(ids[e.heap]); break;
        case OpType::DeleteMin: {
          auto m = u.delete_min(ids[e.heap]);
          for (std::uint32_t n = 0; n < handles.size(); ++n) {
            if (inserted[n] && handles[n] == m.node && !removed[i]) {
              bool gone = false;
              for (std::size_t j = 0; j < i; ++j) gone |= removed[j] == n;
              if (!gone) removed[i] = n;
            }
          }
          break;
        }
        case OpType::Meld: ids[*e.result_heap] = u.meld(ids[e.heap], ids[*e.heap2]); break;
      }
    }
    for (std::uint32_t n = 0; n < t.node_count(); ++n) {
      for (std::size_t time = 0; time < t.size(); time += 7) {
        std::optional<Color> expect;
        if (inserted[n] && *inserted[n] <= time) {
          bool deleted_before = false, deleted_later = false;
          for (std::size_t j = 0; j < t.size(); ++j) {
            if (removed[j] == n) (j <= time ? deleted_before : deleted_later) = true;
          }
          if (!deleted_before) expect = deleted_later ? Color::White : Color::Black;
        }
        ASSERT_EQ(cm.color(n, time), expect) << "seed " << seed << " node " << n << " t " << time;
      }
    }
  }
}

TEST(Snapshot, ParentsPrecedeChildren) {
  Universe u;
  HeapId h = u.make_heap();
  std::vector<std::uint32_t> token_of_slot;
  for (int i = 0; i < 50; ++i) {
    u.insert(h, (i * 31) % 50);
    token_of_slot.push_back(i);
  }
  u.delete_min(h);
  auto snap = take_snapshot(u, 0, token_of_slot, {{h, "h"}});
  EXPECT_EQ(snap.nodes.size(), 49u);
  ASSERT_EQ(snap.trees.size(), 1u);
  EXPECT_EQ(snap.trees[0].label, "h");
  for (std::size_t i = 0; i < snap.nodes.size(); ++i) {
    if (snap.nodes[i].parent != kNone) {
      EXPECT_LT(snap.nodes[i].parent, static_cast<std::int32_t>(i));
      EXPECT_GE(snap.nodes[i].key, snap.nodes[snap.nodes[i].parent].key);
    }
  }
}

std::string rename_tokens(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool token_start = i == 0 || text[i - 1] == ' ' || text[i - 1] == '\n';
    if (token_start && (text[i] == 'n' || text[i] == 'h') && i + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      out += text[i] == 'n' ? "node_" : "heap_";
      continue;
    }
    out += text[i];
  }
  return out;
}

TEST(Audit, RandomTracesPassAllChecks) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    workload::WorkloadSpec spec;
    spec.n = 300;
    spec.seed = seed;
    Trace t = workload::generate(spec);
    auto rep = run_audit(t);
    EXPECT_TRUE(rep.pass) << "seed " << seed;
    EXPECT_EQ(rep.snapshots.size(), t.size());
    for (const auto& s : rep.snapshots) {
      EXPECT_TRUE(s.identity.ok);
      EXPECT_TRUE(s.spines.result.ok);
      EXPECT_GE(s.lemma1.min_margin, -kTolerance);
    }
  }
}

TEST(Audit, PotentialInvariantUnderRelabeling) {
  workload::WorkloadSpec spec;
  spec.n = 300;
  spec.seed = 11;
  Trace t = workload::generate(spec);
  Trace renamed = parse_trace_text(rename_tokens(format_trace(t)));
  ASSERT_NE(format_trace(renamed), format_trace(t));
  auto a = run_audit(t);
  auto b = run_audit(renamed);
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    EXPECT_EQ(a.snapshots[i].phi, b.snapshots[i].phi);
    EXPECT_EQ(a.snapshots[i].white_nodes, b.snapshots[i].white_nodes);
  }
}

TEST(Audit, NoDeleteMinsMeansZeroPotential) {
  Trace t = parse_trace_text("new h\ninsert h a 3\ninsert h b 1\ninsert h c 2\n");
  auto rep = run_audit(t);
  for (const auto& s : rep.snapshots) {
    EXPECT_EQ(s.phi, 0.0);
    EXPECT_EQ(s.white_nodes, 0u);
  }
}

TEST(Audit, SortTraceFinalSnapshotAndReport) {
  workload::WorkloadSpec spec;
  spec.kind = workload::WorkloadKind::Sort;
  spec.n = 64;
  Trace t = workload::generate(spec);
  AuditOptions opt;
  opt.snapshots = SnapshotMode::Final;
  auto rep = run_audit(t, opt);
  ASSERT_EQ(rep.snapshots.size(), 1u);
  EXPECT_TRUE(rep.pass);
  std::ostringstream os;
  write_report(rep, os);
  const std::string text = os.str();
  EXPECT_NE(text.find("snapshot=0\n"), std::string::npos);
  EXPECT_NE(text.find("proposition_argmax=3\n"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 12), "status=PASS\n");
}

TEST(Audit, UnexecutableTraceThrows) {
  Trace t = parse_trace_text("new h\ndeletemin h\n");
  EXPECT_THROW(compute_colors(t), AuditError);
}

}  // namespace
