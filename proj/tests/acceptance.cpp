// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "trafficlens/cli.hpp"
#include "trafficlens/evalkit.hpp"
#include "trafficlens/fixtures.hpp"
#include "trafficlens/orchestrator.hpp"
#include "trafficlens/rag.hpp"
#include "trafficlens/similarity.hpp"

using namespace trafficlens;

namespace {

// Pinned tolerances.
constexpr double kMinSpeedup = 2.0;
constexpr double kMaxRealSeconds = 10.0;
constexpr double kIouTolerance = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* what, const Outcome& o) {
  std::printf("%s %-28s %s  %s\n", id, what, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename F>
void criterion(const char* id, const char* what, F&& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, what, o);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

class TableEmbedder : public EmbeddingModel {
 public:
  explicit TableEmbedder(std::size_t dim) : dim_(dim) {}
  std::map<std::string, std::vector<double>> table;
  std::vector<double> embed(std::string_view text) override { return table.at(std::string(text)); }
  std::size_t dimension() const override { return dim_; }

 private:
  std::size_t dim_;
};

Outcome speedup() {
  const auto start = std::chrono::steady_clock::now();
  const FixturePlan plan = make_fixture();
  int similar = 0;
  for (bool s : plan.similar) similar += s;
  IngestionConfig baseline, trafficlens;
  baseline.schedule = {256, 256, 256};
  trafficlens.schedule = {80, 32, 256};
  trafficlens.similarity.delta = 0.21;
  MockBackend mock(MockLatencyModel{500, 50.0});
  const SpeedupSummary s = compare_modes(plan.feeds, baseline, trafficlens, mock);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.pass = s.ratio >= kMinSpeedup && secs < kMaxRealSeconds && plan.similar.size() == 200 &&
           similar == 100;
  o.detail = "ratio=" + fmt("%.2f", s.ratio) + " baseline_ms=" + std::to_string(s.baseline_ms) +
             " trafficlens_ms=" + std::to_string(s.trafficlens_ms) + " similar=" +
             std::to_string(similar) + "/200 real=" + fmt("%.2fs", secs);
  return o;
}

Outcome delta_monotone() {
  const FixturePlan plan = make_fixture();
  std::vector<double> deltas;
  for (int i = 1; i <= 9; ++i) deltas.push_back(i / 10.0);
  const auto pts = delta_sweep(plan.feeds, IngestionConfig{}, deltas);
  int violations = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    violations += pts[i].processed_clips < pts[i - 1].processed_clips;
    violations += pts[i].total_latency_ms < pts[i - 1].total_latency_ms;
  }
  return {violations == 0 && pts.size() == 9,
          "violations=" + std::to_string(violations) + " processed " +
              std::to_string(pts.front().processed_clips) + ".." + std::to_string(pts.back().processed_clips)};
}

Outcome iou_oracle() {
  std::mt19937_64 rng(1001);
  auto coord = [&] { return static_cast<int>(rng() % 64); };
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    int c[8];
    for (int& v : c) v = coord();
    if (c[0] == c[2] || c[1] == c[3] || c[4] == c[6] || c[5] == c[7]) continue;
    for (int i : {0, 1, 4, 5}) {
      if (c[i] > c[i + 2]) std::swap(c[i], c[i + 2]);
    }
    const double got = iou(BoundingBox::make(c[0], c[1], c[2], c[3]), BoundingBox::make(c[4], c[5], c[6], c[7]));
    const double want = testing::pixel_iou(c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]);
    worst = std::max(worst, std::abs(got - want));
    ++done;
  }
  return {worst <= kIouTolerance, "pairs=1000 max_err=" + fmt("%.3g", worst)};
}

Outcome rouge_oracle() {
  std::mt19937_64 rng(1002);
  const std::vector<std::string> vocab = {"a", "car", "bus", "red", "white", "suv", "stops", "near", "the", "curb"};
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> a, b;
    std::string sa, sb;
    const int na = 1 + static_cast<int>(rng() % 30), nb = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < na; ++i) { a.push_back(vocab[rng() % vocab.size()]); sa += a.back() + " "; }
    for (int i = 0; i < nb; ++i) { b.push_back(vocab[rng() % vocab.size()]); sb += b.back() + " "; }
    const double l = static_cast<double>(testing::memo_lcs(a, b));
    const double p = l / na, r = l / nb;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    const RougeScore got = rouge_l(sa, sb);
    mismatches += got.precision != p || got.recall != r || got.f1 != f;
  }
  const RougeScore fixed = rouge_l("the cat sat", "the cat");
  const bool fixed_ok = std::abs(fixed.f1 - 0.8) < 1e-12;
  return {mismatches == 0 && fixed_ok,
          "mismatches=" + std::to_string(mismatches) + "/100 fixed_f1=" + fmt("%.4f", fixed.f1)};
}

Outcome budgets() {
  const FixturePlan plan = make_fixture();
  int bad = 0;
  std::size_t seen = 0;
  for (IngestMode mode : {IngestMode::kTrafficLens, IngestMode::kBaseline}) {
    IngestionConfig cfg;
    cfg.mode = mode;
    MockBackend mock;
    ingest(plan.feeds, cfg, mock);
    for (const auto& req : mock.requests()) {
      const int want = mode == IngestMode::kBaseline ? 256 : (req.tag.rank == 0 ? 80 : 32);
      bad += req.max_output_tokens != want;
      ++seen;
    }
  }
  return {bad == 0 && seen > 0, "requests=" + std::to_string(seen) + " wrong_budget=" + std::to_string(bad)};
}

Outcome redundancy() {
  using testing::det;
  using testing::static_feed;
  const std::vector<Detection> base_dets = {det("car", 0, 0, 50, 50), det("person", 80, 80, 100, 140)};
  const std::vector<CameraFeedManifest> disjoint = {
      static_feed("right", 10000, 2000, base_dets),
      static_feed("left", 10000, 2000, {det("bicycle", 0, 0, 40, 40), det("dog", 60, 60, 70, 70)})};
  MockBackend m1;
  const auto r1 = ingest(disjoint, IngestionConfig{}, m1);
  const std::string& base_text = r1.segments.at(0).text;
  const std::string& follow_text = r1.segments.at(1).text;
  bool leaked = false;
  for (const auto& d : base_dets) {
    if (base_text.find(d.label) != std::string::npos && follow_text.find(d.label) != std::string::npos) leaked = true;
  }
  const bool new_labels = follow_text.find("bicycle") != std::string::npos && follow_text.find("dog") != std::string::npos;

  const std::vector<CameraFeedManifest> same = {static_feed("right", 10000, 2000, base_dets),
                                                static_feed("left", 10000, 2000, base_dets)};
  IngestionConfig cfg;
  cfg.similarity.delta = 0.21;
  MockBackend m2;
  const auto r2 = ingest(same, cfg, m2);
  const bool skipped = r2.segments.at(1).skipped && m2.requests().size() == 1;
  return {!leaked && new_labels && skipped,
          std::string("disjoint_followup_clean=") + (!leaked && new_labels ? "yes" : "no") +
              " identical_skipped=" + (skipped ? "yes" : "no")};
}

Outcome retrieval() {
  std::mt19937_64 rng(1007);
  const std::size_t dim = 64;
  TableEmbedder table(dim);
  IntersectionDocument doc;
  std::vector<std::vector<double>> rows;
  std::vector<Millis> starts;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = "chunk-" + std::to_string(i);
    rows.push_back(testing::random_unit(rng, dim));
    table.table[text] = rows.back();
    starts.push_back(static_cast<Millis>(i) * 10000);
    doc.entries.push_back({starts.back(), starts.back() + 10000, text});
  }
  const VectorIndex index = build_index(chunk_document(doc), table, 4);
  int agree = 0;
  for (int q = 0; q < 100; ++q) {
    const std::string qtext = "query-" + std::to_string(q);
    table.table[qtext] = testing::random_unit(rng, dim);
    const auto got = retrieve(qtext, index, table, 4);
    const auto want = testing::brute_rank(rows, starts, table.table[qtext], 4);
    bool same = got.size() == want.size();
    for (std::size_t r = 0; same && r < got.size(); ++r) same = got[r].chunk.chunk_id == static_cast<int>(want[r]);
    agree += same;
  }
  std::ostringstream first, second;
  index.save(first);
  std::istringstream in(first.str());
  VectorIndex::load(in).save(second);
  const bool round_trip = first.str() == second.str();
  return {agree == 100 && round_trip, "agreement=" + std::to_string(agree) + "/100 round_trip=" +
                                          (round_trip ? "identical" : "differs")};
}

Outcome query_shape() {
  const std::string path = "acceptance_street.idx";
  std::ostringstream out, err;
  if (run_cli({"demo-index", "--out", path}, out, err) != 0) return {false, "demo-index failed: " + err.str()};
  std::ostringstream qout, qerr;
  const int code = run_cli({"query", "--index", path, "Is there any white SUV?"}, qout, qerr);
  std::remove(path.c_str());
  const std::string text = qout.str();
  const auto src = text.find("\nsources:\n");
  const bool ok = code == 0 && text.starts_with("Yes,") && text.find("white SUV") < src &&
                  src != std::string::npos && text.find("00:07:23", src) != std::string::npos;
  return {ok, "answer=\"" + text.substr(0, std::min<std::size_t>(60, text.find('\n'))) + "...\""};
}

Outcome document_format() {
  const std::regex header(R"(^\d{2,}:\d{2}:\d{2} :\n)");
  std::vector<IntersectionDocument> docs = {make_street_document()};
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    FixtureOptions opts;
    opts.seed = seed;
    opts.clips = seed == 7 ? 200 : 50;
    const auto plan = make_fixture(opts);
    for (IngestMode mode : {IngestMode::kBaseline, IngestMode::kTrafficLens}) {
      IngestionConfig cfg;
      cfg.mode = mode;
      MockBackend mock;
      docs.push_back(ingest(plan.feeds, cfg, mock).document);
    }
  }
  int bad = 0;
  std::size_t entries = 0;
  for (const auto& d : docs) {
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
      bad += !std::regex_search(d.entries[i].text(), header);
      if (i > 0) bad += d.entries[i - 1].start_ms > d.entries[i].start_ms;
      ++entries;
    }
  }
  return {bad == 0, "documents=" + std::to_string(docs.size()) + " entries=" + std::to_string(entries) +
                        " violations=" + std::to_string(bad)};
}

}  // namespace

int main() {
  criterion("A1", "speedup ratio", speedup);
  criterion("A2", "delta monotonicity", delta_monotone);
  criterion("A3", "IoU oracle", iou_oracle);
  criterion("A4", "ROUGE-L oracle", rouge_oracle);
  criterion("A5", "budget enforcement", budgets);
  criterion("A6", "redundancy semantics", redundancy);
  criterion("A7", "retrieval exactness", retrieval);
  criterion("A8", "end-to-end query shape", query_shape);
  criterion("A9", "document format", document_format);
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
