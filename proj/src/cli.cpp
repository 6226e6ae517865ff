#include "lazypair/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "lazypair/audit.hpp"
#include "lazypair/metrics.hpp"
#include "lazypair/trace.hpp"
#include "lazypair/workload.hpp"

namespace lazypair::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

workload::Mix parse_mix(const std::string& text) {
  std::vector<double> p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--mix: '" + item + "' is not a number");
    }
  }
  if (p.size() != 5) throw UsageError("--mix expects five probabilities i,d,m,f,x");
  return workload::Mix{p[0], p[1], p[2], p[3], p[4]};
}

workload::WorkloadKind parse_kind(const std::string& text) {
  auto k = workload::parse_workload_kind(text);
  if (!k) throw UsageError("unknown workload kind '" + text + "' (random|sort|dijkstra)");
  return *k;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trace '" + path + "'");
  try {
    return parse_trace(in);
  } catch (const TraceParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  return out;
}

struct GenArgs {
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::size_t heaps = 4;
  std::string mix;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  workload::WorkloadSpec spec;
  spec.kind = parse_kind(a.kind);
  spec.n = a.n;
  spec.seed = a.seed;
  spec.heaps = a.heaps;
  if (!a.mix.empty()) spec.mix = parse_mix(a.mix);
  Trace trace;
  try {
    trace = workload::generate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ofstream file = open_out(a.out);
  write_trace(trace, file);
  file.flush();
  if (!file) throw UsageError("write to '" + a.out + "' failed");
  out << "wrote " << trace.size() << " events to " << a.out << '\n';
  return kExitPass;
}

struct RunArgs {
  std::string trace;
  std::string variant = "lazy";
  bool no_meld_cleanup = false;
  std::optional<double> periodic;
  std::optional<double> direct_relink;
  bool check = false;
  std::string metrics;
};

VariantConfig config_from(const RunArgs& a) {
  VariantConfig c;
  if (a.variant == "eager") {
    if (a.no_meld_cleanup || a.periodic || a.direct_relink) {
      throw UsageError("clean-up policy flags apply to --variant lazy only");
    }
    return VariantConfig::eager();
  }
  if (a.variant != "lazy") throw UsageError("unknown variant '" + a.variant + "' (lazy|eager)");
  c.cleanup_on_meld = !a.no_meld_cleanup;
  if (a.periodic) {
    c.periodic_cleanup = true;
    c.periodic_factor = *a.periodic;
  }
  if (a.direct_relink) {
    c.direct_relink = true;
    c.direct_relink_fraction = *a.direct_relink;
  }
  try {
    return c.normalized();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_run(const RunArgs& a, std::ostream& out) {
  const VariantConfig config = config_from(a);
  const Trace trace = load_trace(a.trace);
  workload::RunOptions opts;
  opts.check = a.check;
  opts.record = !a.metrics.empty();
  const workload::RunResult r = workload::run_trace(trace, config, opts);
  if (!a.metrics.empty()) {
    std::ofstream file = open_out(a.metrics);
    metrics::write_csv(r.records, file);
  }
  if (!r.verdict.pass) {
    out << "FAIL at op " << *r.verdict.failed_at << ": " << r.verdict.message << '\n';
    return kExitCheckFailed;
  }
  out << "PASS, ops=" << r.events_run << '\n';
  out << "comparisons=" << r.totals.comparisons << " links=" << r.totals.links
      << " cuts=" << r.totals.cuts << '\n';
  return kExitPass;
}

struct AuditArgs {
  std::string trace;
  std::string out;
  std::string snapshots;
};

int cmd_audit(const AuditArgs& a, std::ostream& out) {
  audit::AuditOptions opts;
  if (a.snapshots == "every") {
    opts.snapshots = audit::SnapshotMode::Every;
  } else if (a.snapshots == "final") {
    opts.snapshots = audit::SnapshotMode::Final;
  } else if (!a.snapshots.empty()) {
    throw UsageError("--snapshots must be 'every' or 'final'");
  }
  const Trace trace = load_trace(a.trace);
  audit::AuditReport report;
  try {
    report = audit::run_audit(trace, opts);
  } catch (const audit::AuditError& e) {
    out << "FAIL: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  std::ofstream file = open_out(a.out);
  audit::write_report(report, file);
  out << (report.pass ? "PASS" : "FAIL") << ", snapshots=" << report.snapshots.size() << '\n';
  return report.pass ? kExitPass : kExitCheckFailed;
}

struct BenchArgs {
  std::string kind = "sort";
  std::vector<std::size_t> sizes;
  std::size_t reps = 1;
  std::vector<std::string> variants{"lazy", "eager"};
  std::uint64_t seed = 1;
  std::size_t heaps = 4;
  std::string mix;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const workload::WorkloadKind kind = parse_kind(a.kind);
  std::vector<std::pair<std::string, VariantConfig>> variants;
  for (const auto& name : a.variants) {
    auto v = parse_variant(name);
    if (!v) throw UsageError("unknown variant '" + name + "'");
    variants.emplace_back(name, *v);
  }
  if (a.sizes.empty()) throw UsageError("--sizes needs at least one size");

  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out.empty()) {
    file = open_out(a.out);
    sink = &file;
  }
  std::ostream& os = *sink;
  os << "kind,size,variant,rep,events,insert_cmp,decrease_cmp,deletemin_cmp,findmin_cmp,"
        "meld_cmp,total_comparisons,cmp_per_nlog2n,wall_ns\n";
  os << std::setprecision(6);
  for (std::size_t n : a.sizes) {
    workload::WorkloadSpec spec;
    spec.kind = kind;
    spec.n = n;
    spec.seed = a.seed;
    spec.heaps = a.heaps;
    if (!a.mix.empty()) spec.mix = parse_mix(a.mix);
    Trace trace;
    try {
      trace = workload::generate(spec);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    for (const auto& [name, config] : variants) {
      for (std::size_t rep = 0; rep < a.reps; ++rep) {
        const workload::RunResult r = workload::run_trace(trace, config);
        if (!r.verdict.pass) {
          out << "FAIL at op " << *r.verdict.failed_at << ": " << r.verdict.message << '\n';
          return kExitCheckFailed;
        }
        std::map<OpType, std::pair<std::uint64_t, std::uint64_t>> per;  // sum, count
        std::int64_t wall = 0;
        for (const auto& rec : r.records) {
          auto& [sum, count] = per[rec.op_type];
          sum += rec.delta.comparisons;
          ++count;
          wall += rec.wall_time.count();
        }
        auto mean = [&](OpType t) {
          auto it = per.find(t);
          if (it == per.end() || it->second.second == 0) return 0.0;
          return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
        };
        const double nlogn = static_cast<double>(n) * std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
        os << a.kind << ',' << n << ',' << name << ',' << rep << ',' << r.events_run << ','
           << mean(OpType::Insert) << ',' << mean(OpType::Decrease) << ','
           << mean(OpType::DeleteMin) << ',' << mean(OpType::FindMin) << ','
           << mean(OpType::Meld) << ',' << r.totals.comparisons << ','
           << static_cast<double>(r.totals.comparisons) / nlogn << ',' << wall << '\n';
      }
    }
  }
  return kExitPass;
}

}  // namespace

std::optional<VariantConfig> parse_variant(std::string_view name) {
  VariantConfig c;
  if (name == "lazy") return c;
  if (name == "eager") return VariantConfig::eager();
  if (name == "lazy-nomeld") {
    c.cleanup_on_meld = false;
    return c;
  }
  if (name == "lazy-periodic") {
    c.periodic_cleanup = true;
    return c;
  }
  if (name == "lazy-direct") {
    c.direct_relink = true;
    return c;
  }
  return std::nullopt;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairing heap with lazy decrease-key: trace generator, runner, auditor, bench"};
  app.name("lazypair");
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a deterministic trace");
  g->add_option("--kind", gen.kind, "random|sort|dijkstra")->required();
  g->add_option("--n", gen.n, "Operations (random), keys (sort) or vertices (dijkstra)")->required();
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--heaps", gen.heaps, "Concurrent heaps (random)");
  g->add_option("--mix", gen.mix, "Probabilities insert,decrease,deletemin,findmin,meld");
  g->add_option("--out", gen.out, "Output trace path")->required();

  RunArgs runa;
  auto* r = app.add_subcommand("run", "Replay a trace on one variant");
  r->add_option("--trace", runa.trace, "Trace path")->required();
  r->add_option("--variant", runa.variant, "lazy|eager");
  r->add_flag("--no-meld-cleanup", runa.no_meld_cleanup, "Skip clean-up before meld");
  r->add_option("--periodic", runa.periodic, "Clean up once decreased >= C*log2(n)");
  r->add_option("--direct-relink", runa.direct_relink,
                "Relink pool trees directly when decreased > F*n");
  r->add_flag("--check", runa.check, "Check against the oracle and validate invariants");
  r->add_option("--metrics", runa.metrics, "Per-operation CSV output path");

  AuditArgs auda;
  auto* au = app.add_subcommand("audit", "Check potential-function claims on a trace");
  au->add_option("--trace", auda.trace, "Trace path")->required();
  au->add_option("--out", auda.out, "Report path")->required();
  au->add_option("--snapshots", auda.snapshots, "every|final");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Comparison counts across sizes and variants");
  b->add_option("--kind", bench.kind, "random|sort|dijkstra");
  b->add_option("--sizes", bench.sizes, "Comma-separated sizes")->required()->delimiter(',');
  b->add_option("--reps", bench.reps, "Repetitions per cell");
  b->add_option("--variants", bench.variants, "Comma-separated variant names")->delimiter(',');
  b->add_option("--seed", bench.seed, "RNG seed");
  b->add_option("--heaps", bench.heaps, "Concurrent heaps (random)");
  b->add_option("--mix", bench.mix, "Probabilities insert,decrease,deletemin,findmin,meld");
  b->add_option("--out", bench.out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*r) return cmd_run(runa, out);
    if (*au) return cmd_audit(auda, out);
    if (*b) return cmd_bench(bench, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("lazypair");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lazypair::cli
