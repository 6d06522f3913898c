#include "trafficlens/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "trafficlens/config.hpp"
#include "trafficlens/evalkit.hpp"
#include "trafficlens/fixtures.hpp"
#include "trafficlens/ingest_frontend.hpp"
#include "trafficlens/orchestrator.hpp"
#include "trafficlens/rag.hpp"

namespace trafficlens {
namespace {

// Flag values plus the CLI11 options that carry them; an option overrides the
// config file only when it appeared on the command line.
struct Flags {
  std::string config_path;
  std::vector<std::string> manifests;
  std::string mode;
  std::string base_camera;
  int t_r = 0;
  int t_l = 0;
  int baseline_limit = 0;
  double delta = 0.0;
  std::size_t k = 0;
  std::string backend;
  std::string endpoint;
  int workers = 0;
  std::uint64_t seed = 0;
  int clips = 0;
  std::string out;
};

bool given(const CLI::App& cmd, const std::string& name) {
  const CLI::Option* opt = cmd.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

void add_config_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config_path, "JSON run configuration");
  cmd.add_option("--workers", f.workers, "Worker threads");
}

void add_backend_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--backend", f.backend, "Model backend")
      ->check(CLI::IsMember({"mock", "http"}));
  cmd.add_option("--endpoint", f.endpoint, "OpenAI-compatible base URL");
}

void add_schedule_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--base-camera", f.base_camera, "Base camera id");
  cmd.add_option("--t-r", f.t_r, "Token limit for the base camera");
  cmd.add_option("--t-l", f.t_l, "Token limit for follow-up cameras");
  cmd.add_option("--baseline-limit", f.baseline_limit,
                 "Token limit for every call in baseline mode");
  cmd.add_option("--delta", f.delta, "Similarity threshold for skipping");
}

void add_fixture_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--seed", f.seed, "Seed for the synthetic fixture feed");
  cmd.add_option("--clips", f.clips, "Clip windows in the synthetic fixture");
}

RunConfig resolve_config(const CLI::App& cmd, const Flags& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig{} : RunConfig::load_file(f.config_path);
  if (given(cmd, "--mode")) cfg.mode = ingest_mode_from_string(f.mode);
  if (given(cmd, "--base-camera")) cfg.base_camera = f.base_camera;
  if (given(cmd, "--t-r")) cfg.schedule.base_limit = f.t_r;
  if (given(cmd, "--t-l")) cfg.schedule.followup_limit = f.t_l;
  if (given(cmd, "--baseline-limit")) cfg.schedule.baseline_limit = f.baseline_limit;
  if (given(cmd, "--delta")) cfg.delta = f.delta;
  if (given(cmd, "--k")) cfg.k = f.k;
  if (given(cmd, "--backend")) cfg.backend = f.backend;
  if (given(cmd, "--endpoint")) cfg.endpoint = f.endpoint;
  if (given(cmd, "--workers")) cfg.workers = f.workers;
  if (given(cmd, "--seed")) cfg.seed = f.seed;
  if (given(cmd, "--clips")) cfg.fixture_clips = f.clips;
  cfg.validate();
  return cfg;
}

std::vector<CameraFeedManifest> load_feeds(const std::vector<std::string>& paths) {
  std::vector<CameraFeedManifest> feeds;
  for (const std::string& p : paths) feeds.push_back(parse_manifest_file(p));
  return feeds;
}

std::vector<CameraFeedManifest> feeds_or_fixture(const Flags& f, const RunConfig& cfg) {
  if (!f.manifests.empty()) return load_feeds(f.manifests);
  FixtureOptions opts;
  opts.seed = cfg.seed;
  opts.clips = cfg.fixture_clips;
  return make_fixture(opts).feeds;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

int cmd_ingest(const CLI::App& cmd, const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve_config(cmd, f);
  const auto feeds = load_feeds(f.manifests);
  Backends backends = make_backends(cfg);
  const IngestionReport report = ingest(feeds, cfg.ingestion(), *backends.vision);
  write_report_file(report, f.out, cfg.backend);
  out << "wrote " << f.out << ": " << report.document.entries.size() << " entries, "
      << report.vlm_calls << " VLM calls, " << report.skipped_clips << " skipped, total "
      << format_timestamp(report.total_latency_ms) << " (" << report.total_latency_ms
      << " ms)\n";
  return kExitOk;
}

int cmd_index(const CLI::App& cmd, const Flags& f, const std::string& report_path, std::ostream& out) {
  const RunConfig cfg = resolve_config(cmd, f);
  const IngestionReport report = read_report_file(report_path);
  Backends backends = make_backends(cfg);
  const VectorIndex index = build_index(chunk_document(report.document, cfg.chunk_max_chars),
                                        *backends.embedder, cfg.workers);
  index.save_file(f.out);
  out << "wrote " << f.out << ": " << index.size() << " chunks, dim " << index.dimension() << "\n";
  return kExitOk;
}

int cmd_query(const CLI::App& cmd, const Flags& f, const std::string& index_path, const std::string& question,
              std::ostream& out) {
  const RunConfig cfg = resolve_config(cmd, f);
  const VectorIndex index = VectorIndex::load_file(index_path);
  if (index.empty()) throw Error(ErrorKind::kEmptyIndex, "index " + index_path + " has no entries");
  Backends backends = make_backends(cfg);
  const Answer a = answer(question, index, cfg.k, *backends.embedder, *backends.llm,
                          cfg.answer_max_tokens);
  out << a.text << "\nsources:\n";
  for (const RetrievalResult& r : a.used_chunks) {
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", r.score);
    out << "  " << format_timestamp(r.chunk.start_ms) << "-" << format_timestamp(r.chunk.end_ms)
        << "  score=" << score << "\n";
  }
  return kExitOk;
}

int cmd_bench(const CLI::App& cmd, const Flags& f, std::ostream& out) {
  RunConfig cfg = resolve_config(cmd, f);
  cfg.backend = "mock";
  const auto feeds = feeds_or_fixture(f, cfg);
  MockBackend mock(cfg.latency);

  IngestionConfig base_cfg = cfg.ingestion();
  base_cfg.mode = IngestMode::kBaseline;
  IngestionConfig tl_cfg = cfg.ingestion();
  tl_cfg.mode = IngestMode::kTrafficLens;
  const std::vector<IngestionReport> reports = {ingest(feeds, base_cfg, mock),
                                                ingest(feeds, tl_cfg, mock)};
  const SpeedupSummary s = summarize_speedup(reports[0], reports[1]);
  out << "baseline_ms\ttrafficlens_ms\tratio\n"
      << s.baseline_ms << "\t" << s.trafficlens_ms << "\t" << two_decimals(s.ratio) << "\n\n"
      << ingestion_time_table(reports);
  return kExitOk;
}

int cmd_sweep(const CLI::App& cmd, const Flags& f, const std::vector<double>& deltas, std::ostream& out) {
  RunConfig cfg = resolve_config(cmd, f);
  cfg.backend = "mock";
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (deltas[i] < deltas[i - 1]) throw Error(ErrorKind::kConfig, "--deltas must be ascending");
  }
  const auto feeds = feeds_or_fixture(f, cfg);
  const auto points = delta_sweep(feeds, cfg.ingestion(), deltas, cfg.latency);
  out << sweep_table(points);
  return kExitOk;
}

int cmd_fixture(const CLI::App& cmd, const Flags& f, const std::string& out_dir, std::ostream& out) {
  const RunConfig cfg = resolve_config(cmd, f);
  FixtureOptions opts;
  opts.seed = cfg.seed;
  opts.clips = cfg.fixture_clips;
  const FixturePlan plan = make_fixture(opts);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());
  for (const CameraFeedManifest& feed : plan.feeds) {
    const std::string path = (std::filesystem::path(out_dir) / (feed.camera.value() + ".jsonl")).string();
    write_manifest_file(feed, path);
    out << "wrote " << path << ": " << feed.frames.size() << " frames\n";
  }
  return kExitOk;
}

int cmd_demo_index(const CLI::App& cmd, const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve_config(cmd, f);
  Backends backends = make_backends(cfg);
  const VectorIndex index = build_index(chunk_document(make_street_document(), cfg.chunk_max_chars),
                                        *backends.embedder, cfg.workers);
  index.save_file(f.out);
  out << "wrote " << f.out << ": " << index.size() << " chunks, dim " << index.dimension() << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& paths, std::ostream& out) {
  std::vector<IngestionReport> reports;
  for (const std::string& p : paths) reports.push_back(read_report_file(p));
  for (const IngestionReport& r : reports) {
    out << "# token statistics: " << to_string(r.config.mode) << "\n" << token_table(r) << "\n";
  }
  out << "# ingestion time\n" << ingestion_time_table(reports) << "\n" << divergence_table(reports);
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kBudgetInvalid:
    case ErrorKind::kMissingBaseCamera:
      return kExitConfig;
    case ErrorKind::kBackendUnreachable:
    case ErrorKind::kBackendError:
      return kExitBackend;
    case ErrorKind::kMalformedRecord:
    case ErrorKind::kNonMonotoneTimestamps:
    case ErrorKind::kEmptyFeed:
    case ErrorKind::kEmptyPriorText:
    case ErrorKind::kEmptyText:
    case ErrorKind::kMissingBaseSegment:
    case ErrorKind::kEmptyDocument:
    case ErrorKind::kEmptyIndex:
    case ErrorKind::kEmptyList:
    case ErrorKind::kNoPairs:
    case ErrorKind::kIo:
      return kExitInput;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-camera traffic video to text ingestion and retrieval", "trafficlens"};
  app.require_subcommand(1);
  Flags f;
  std::string report_path;
  std::string index_path;
  std::string question;
  std::string out_dir = "fixture";
  std::vector<std::string> report_paths;
  std::vector<double> deltas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Convert camera manifests into an ingestion report");
  ingest_cmd->add_option("manifests", f.manifests, "Per-camera manifest files (base camera first)")
      ->required();
  add_config_flags(*ingest_cmd, f);
  add_backend_flags(*ingest_cmd, f);
  add_schedule_flags(*ingest_cmd, f);
  ingest_cmd->add_option("--mode", f.mode, "Ingestion mode")
      ->check(CLI::IsMember({"baseline", "trafficlens"}));
  ingest_cmd->add_option("--out", f.out, "Report JSON path")->required();

  CLI::App* index_cmd = app.add_subcommand("index", "Chunk and embed a report's document");
  index_cmd->add_option("--report", report_path, "Ingestion report")->required();
  index_cmd->add_option("--out", f.out, "Index file path")->required();
  add_config_flags(*index_cmd, f);
  add_backend_flags(*index_cmd, f);

  CLI::App* demo_cmd = app.add_subcommand("demo-index", "Index a small built-in street document");
  demo_cmd->add_option("--out", f.out, "Index file path")->required();
  add_config_flags(*demo_cmd, f);
  add_backend_flags(*demo_cmd, f);

  CLI::App* query_cmd = app.add_subcommand("query", "Answer a question from an index");
  query_cmd->add_option("--index", index_path, "Index file")->required();
  query_cmd->add_option("question", question, "Question text")->required();
  query_cmd->add_option("--k", f.k, "Chunks to retrieve")->check(CLI::PositiveNumber);
  add_config_flags(*query_cmd, f);
  add_backend_flags(*query_cmd, f);

  CLI::App* bench_cmd = app.add_subcommand("bench", "Compare baseline and trafficlens latency on the mock backend");
  bench_cmd->add_option("manifests", f.manifests, "Manifest files; synthetic fixture when omitted");
  add_config_flags(*bench_cmd, f);
  add_schedule_flags(*bench_cmd, f);
  add_fixture_flags(*bench_cmd, f);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep the similarity threshold");
  sweep_cmd->add_option("manifests", f.manifests, "Manifest files; synthetic fixture when omitted");
  sweep_cmd->add_option("--deltas", deltas, "Ascending thresholds")->delimiter(',');
  add_config_flags(*sweep_cmd, f);
  add_schedule_flags(*sweep_cmd, f);
  add_fixture_flags(*sweep_cmd, f);

  CLI::App* fixture_cmd = app.add_subcommand("fixture", "Write the synthetic two-camera manifests");
  fixture_cmd->add_option("--out-dir", out_dir, "Output directory");
  add_config_flags(*fixture_cmd, f);
  add_fixture_flags(*fixture_cmd, f);

  CLI::App* report_cmd = app.add_subcommand("report", "Token, time and divergence tables from reports");
  report_cmd->add_option("reports", report_paths, "Ingestion report files")->required();

  std::vector<std::string> argv_store = {"trafficlens"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(*ingest_cmd, f, out);
    if (*index_cmd) return cmd_index(*index_cmd, f, report_path, out);
    if (*demo_cmd) return cmd_demo_index(*demo_cmd, f, out);
    if (*query_cmd) return cmd_query(*query_cmd, f, index_path, question, out);
    if (*bench_cmd) return cmd_bench(*bench_cmd, f, out);
    if (*sweep_cmd) return cmd_sweep(*sweep_cmd, f, deltas, out);
    if (*fixture_cmd) return cmd_fixture(*fixture_cmd, f, out_dir, out);
    if (*report_cmd) return cmd_report(report_paths, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace trafficlens
