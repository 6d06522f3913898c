#include "trafficlens/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>

namespace trafficlens {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool made_call(const NarrativeSegment& s) { return !s.skipped && s.max_output_tokens > 0; }

}  // namespace

TokenStats token_stats(std::span<const ModelUsage> usages) {
  if (usages.empty()) throw Error(ErrorKind::kEmptyList, "token_stats needs at least one usage");
  TokenStats out{usages.front().output_tokens, usages.front().output_tokens, 0.0};
  long double sum = 0;
  for (const ModelUsage& u : usages) {
    out.max = std::max(out.max, u.output_tokens);
    out.min = std::min(out.min, u.output_tokens);
    sum += u.output_tokens;
  }
  out.avg = static_cast<double>(sum / static_cast<long double>(usages.size()));
  return out;
}

std::vector<std::string> rouge_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
    std::size_t b = 0;
    std::size_t e = tok.size();
    while (b < e && is_punct(tok[b])) ++b;
    while (e > b && is_punct(tok[e - 1])) --e;
    if (b == e) continue;
    std::string t = tok.substr(b, e - b);
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(t));
  }
  return out;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto cand = rouge_tokens(candidate);
  const auto ref = rouge_tokens(reference);
  if (cand.empty() && ref.empty()) return {1.0, 1.0, 1.0};
  const auto lcs = static_cast<double>(lcs_length(cand, ref));
  RougeScore s;
  s.precision = cand.empty() ? 0.0 : lcs / static_cast<double>(cand.size());
  s.recall = ref.empty() ? 0.0 : lcs / static_cast<double>(ref.size());
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

std::vector<SegmentPair> divergence_pairs(std::span<const NarrativeSegment> segments) {
  std::map<int, const NarrativeSegment*> base_by_clip;
  for (const NarrativeSegment& s : segments) {
    if (s.role == SegmentRole::kBase) base_by_clip[s.base_clip_id] = &s;
  }
  std::vector<SegmentPair> out;
  for (const NarrativeSegment& s : segments) {
    if (s.role != SegmentRole::kFollowup || s.skipped) continue;
    auto base = base_by_clip.find(s.base_clip_id);
    if (base == base_by_clip.end()) continue;
    out.push_back({base->second, &s});
  }
  return out;
}

double divergence_report(std::span<const SegmentPair> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::kNoPairs, "no follow-up segments to compare");
  double sum = 0.0;
  for (const SegmentPair& p : pairs) sum += rouge_l(p.followup->text, p.base->text).f1;
  return sum / static_cast<double>(pairs.size());
}

std::vector<SweepPoint> delta_sweep(std::span<const CameraFeedManifest> feeds,
                                    const IngestionConfig& cfg, std::span<const double> deltas,
                                    const MockLatencyModel& latency) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    SimilarityConfig{deltas[i]}.validate();
    if (i > 0 && deltas[i] < deltas[i - 1]) {
      throw Error(ErrorKind::kConfig, "sweep deltas must be sorted ascending");
    }
  }
  IngestionConfig base_cfg = cfg;
  base_cfg.mode = IngestMode::kTrafficLens;
  base_cfg.workers = 1;
  base_cfg = base_cfg.resolved(feeds);
  const PreparedClips prepared = prepare_clips(feeds, base_cfg);

  std::vector<SweepPoint> points(deltas.size());
  std::vector<std::exception_ptr> errors(deltas.size());
  const auto n = static_cast<std::ptrdiff_t>(deltas.size());
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      IngestionConfig point_cfg = base_cfg;
      point_cfg.similarity.delta = deltas[i];
      MockBackend mock(latency);
      const IngestionReport r = ingest_prepared(prepared, point_cfg, mock);
      points[i] = {deltas[i], r.total_latency_ms,
                   r.vlm_calls - static_cast<int>(prepared.pairs.size()), r.skipped_clips};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

std::string token_table(const IngestionReport& report, const std::string& model) {
  std::map<std::string, std::vector<ModelUsage>> by_camera;
  std::map<std::string, int> limit;
  for (const NarrativeSegment& s : report.segments) {
    if (!made_call(s)) continue;
    by_camera[s.camera.value()].push_back({s.prompt_tokens, s.output_tokens, s.latency_ms});
    limit[s.camera.value()] = std::max(limit[s.camera.value()], s.max_output_tokens);
  }
  std::string out = "camera\tmodel\tmax_token_limit\tmax_output_tokens\tmin_output_tokens\tavg_output_tokens\n";
  for (const CameraId& cam : report.config.camera_order) {
    auto it = by_camera.find(cam.value());
    if (it == by_camera.end()) continue;
    const TokenStats st = token_stats(it->second);
    out += cam.value() + "\t" + model + "\t" + std::to_string(limit[cam.value()]) + "\t" +
           std::to_string(st.max) + "\t" + std::to_string(st.min) + "\t" + fixed(st.avg, 2) + "\n";
  }
  return out;
}

std::string ingestion_time_table(std::span<const IngestionReport> reports) {
  std::string out =
      "mode\tt_r\tt_l\tdelta\ttotal_time\ttotal_latency_ms\tvlm_calls\tskipped_clips\n";
  for (const IngestionReport& r : reports) {
    const bool tl = r.config.mode == IngestMode::kTrafficLens;
    out += std::string(to_string(r.config.mode)) + "\t" +
           (tl ? std::to_string(r.config.schedule.base_limit)
               : std::to_string(r.config.schedule.baseline_limit)) +
           "\t" +
           (tl ? std::to_string(r.config.schedule.followup_limit)
               : std::to_string(r.config.schedule.baseline_limit)) +
           "\t" + (tl ? fixed(r.config.similarity.delta, 2) : std::string("-")) + "\t" +
           format_timestamp(r.total_latency_ms) + "\t" + std::to_string(r.total_latency_ms) +
           "\t" + std::to_string(r.vlm_calls) + "\t" + std::to_string(r.skipped_clips) + "\n";
  }
  return out;
}

std::string divergence_table(std::span<const IngestionReport> reports) {
  std::string out = "# ROUGE-L f1 of follow-up text against base text, averaged per clip\n";
  out += "mode\tpairs\tbertscore\trouge_l\n";
  for (const IngestionReport& r : reports) {
    const auto pairs = divergence_pairs(r.segments);
    out += std::string(to_string(r.config.mode)) + "\t" + std::to_string(pairs.size()) +
           "\tn/a\t" + (pairs.empty() ? std::string("n/a") : fixed(divergence_report(pairs), 4)) +
           "\n";
  }
  return out;
}

std::string sweep_table(std::span<const SweepPoint> points, bool with_counts) {
  std::string out = with_counts ? "delta\ttotal_latency_ms\tprocessed_clips\tskipped_clips\n"
                                : "delta\ttotal_latency_ms\n";
  for (const SweepPoint& p : points) {
    out += fixed(p.delta, 2) + "\t" + std::to_string(p.total_latency_ms);
    if (with_counts) {
      out += "\t" + std::to_string(p.processed_clips) + "\t" + std::to_string(p.skipped_clips);
    }
    out += "\n";
  }
  return out;
}

}  // namespace trafficlens
