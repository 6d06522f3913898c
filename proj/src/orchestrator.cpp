#include "trafficlens/orchestrator.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <map>
#include <queue>
#include <set>

#include "trafficlens/kernels.hpp"
#include "trafficlens/similarity.hpp"

namespace trafficlens {
namespace {

const CameraFeedManifest& feed_for(std::span<const CameraFeedManifest> feeds, const CameraId& cam) {
  for (const CameraFeedManifest& f : feeds) {
    if (f.camera == cam) return f;
  }
  throw Error(ErrorKind::kInvalidArgument, "no manifest for camera '" + cam.value() + "'");
}

std::string where(const CameraId& camera, int clip_id) {
  return "camera '" + camera.value() + "' clip " + std::to_string(clip_id) + ": ";
}

DescribeRequest request_for(const ClipRecord& clip, PromptText prompt, int budget, int rank) {
  DescribeRequest req;
  req.media_ref = clip.key_frame.media_ref;
  req.detections = clip.detections;
  req.prompt = std::move(prompt);
  req.max_output_tokens = budget;
  req.tag = {clip.camera.value(), clip.clip_id, rank};
  return req;
}

NarrativeSegment segment_from(const ClipRecord& clip, SegmentRole role, int budget,
                              const ModelReply& reply) {
  NarrativeSegment seg;
  seg.clip_id = clip.clip_id;
  seg.camera = clip.camera;
  seg.role = role;
  seg.start_ms = clip.start_ms;
  seg.text = reply.text;
  seg.max_output_tokens = budget;
  seg.prompt_tokens = reply.usage.prompt_tokens;
  seg.output_tokens = reply.usage.output_tokens;
  seg.latency_ms = reply.usage.latency_ms;
  return seg;
}

// Base calls abort the run with (camera, clip) context.
ModelReply describe_or_throw(VisionModel& vlm, const DescribeRequest& req, const ClipRecord& clip) {
  try {
    return vlm.describe(req);
  } catch (const BackendError& e) {
    throw BackendError(e.status(), where(clip.camera, clip.clip_id) + e.body());
  } catch (const Error& e) {
    throw Error(e.kind(), where(clip.camera, clip.clip_id) + e.what());
  }
}

// Everything one clip's camera chain produced; filled by exactly one worker.
struct ChainResult {
  std::vector<NarrativeSegment> segments;
  int calls = 0;
  int skipped = 0;
  int absent = 0;
  int failed = 0;
  Millis latency_ms = 0;
  std::exception_ptr error;
};

ChainResult run_trafficlens_chain(const AlignedClipPair& pair, std::span<const double> similarity,
                                  const IngestionConfig& cfg, VisionModel& vlm) {
  ChainResult out;
  const int base_budget = budget_for(0, cfg.schedule, IngestMode::kTrafficLens);
  const ModelReply base =
      describe_or_throw(vlm, request_for(pair.base, base_prompt(), base_budget, 0), pair.base);
  ++out.calls;
  out.segments.push_back(segment_from(pair.base, SegmentRole::kBase, base_budget, base));

  std::string prior = base.text;
  for (std::size_t r = 0; r < pair.others.size(); ++r) {
    const int rank = static_cast<int>(r) + 1;
    const std::optional<ClipRecord>& clip = pair.others[r].clip;
    if (!clip) {
      ++out.absent;
      continue;
    }
    const double score = similarity[r];
    if (should_skip(ClipSimilarity{score, {}}, cfg.similarity)) {
      NarrativeSegment seg;
      seg.clip_id = clip->clip_id;
      seg.camera = clip->camera;
      seg.role = SegmentRole::kFollowup;
      seg.start_ms = clip->start_ms;
      seg.skipped = true;
      seg.similarity = score;
      out.segments.push_back(std::move(seg));
      ++out.skipped;
      continue;
    }

    const int budget = budget_for(rank, cfg.schedule, IngestMode::kTrafficLens);
    const std::string& context =
        cfg.accumulation.mode == AccumulationMode::kAccumulate ? prior : base.text;
    ++out.calls;
    try {
      const DescribeRequest req =
          request_for(*clip, followup_prompt(context, cfg.accumulation), budget, rank);
      const ModelReply reply = vlm.describe(req);
      NarrativeSegment seg = segment_from(*clip, SegmentRole::kFollowup, budget, reply);
      seg.similarity = score;
      if (!reply.text.empty()) {
        if (!prior.empty()) prior += ' ';
        prior += reply.text;
      }
      out.segments.push_back(std::move(seg));
    } catch (const Error& e) {
      // A failed follow-up degrades to a skip and the run carries on.
      NarrativeSegment seg;
      seg.clip_id = clip->clip_id;
      seg.camera = clip->camera;
      seg.role = SegmentRole::kFollowup;
      seg.start_ms = clip->start_ms;
      seg.max_output_tokens = budget;
      seg.skipped = true;
      seg.similarity = score;
      seg.error = where(clip->camera, clip->clip_id) + e.what();
      out.segments.push_back(std::move(seg));
      ++out.failed;
    }
  }
  for (NarrativeSegment& s : out.segments) {
    s.base_clip_id = pair.base.clip_id;
    out.latency_ms += s.latency_ms;
  }
  return out;
}

ChainResult run_baseline_chain(const ClipRecord& base, std::span<const ClipRecord* const> others,
                               const IngestionConfig& cfg, VisionModel& vlm) {
  ChainResult out;
  const int budget = cfg.schedule.baseline_limit;
  auto call = [&](const ClipRecord& clip, SegmentRole role, int rank) {
    const ModelReply reply = describe_or_throw(
        vlm, request_for(clip, base_prompt(PromptRole::kBaseline), budget, rank), clip);
    ++out.calls;
    out.segments.push_back(segment_from(clip, role, budget, reply));
  };
  call(base, SegmentRole::kBase, 0);
  for (std::size_t r = 0; r < others.size(); ++r) {
    if (others[r] == nullptr) {
      ++out.absent;
      continue;
    }
    call(*others[r], SegmentRole::kFollowup, static_cast<int>(r) + 1);
  }
  for (NarrativeSegment& s : out.segments) {
    s.base_clip_id = base.clip_id;
    out.latency_ms += s.latency_ms;
  }
  return out;
}

// Runs `count` independent jobs on up to `workers` threads; results land in
// their own slots so output order never depends on completion order.
void run_parallel(std::size_t count, int workers, const std::function<ChainResult(std::size_t)>& job,
                  std::vector<ChainResult>& results) {
  results.assign(count, ChainResult{});
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = job(static_cast<std::size_t>(i));
    } catch (...) {
      results[static_cast<std::size_t>(i)].error = std::current_exception();
    }
  }
  for (const ChainResult& r : results) {
    if (r.error) std::rethrow_exception(r.error);
  }
}

Millis list_schedule_makespan(const std::vector<ChainResult>& chains, int workers) {
  std::priority_queue<Millis, std::vector<Millis>, std::greater<>> free_at;
  for (int w = 0; w < std::max(1, workers); ++w) free_at.push(0);
  Millis makespan = 0;
  for (const ChainResult& c : chains) {
    const Millis start = free_at.top();
    free_at.pop();
    const Millis end = start + c.latency_ms;
    makespan = std::max(makespan, end);
    free_at.push(end);
  }
  return makespan;
}

}  // namespace

IngestionConfig IngestionConfig::resolved(std::span<const CameraFeedManifest> feeds) const {
  IngestionConfig cfg = *this;
  schedule.validate();
  similarity.validate();
  accumulation.validate();
  segmenter.validate();
  if (workers < 1) throw Error(ErrorKind::kInvalidArgument, "workers must be >= 1");
  if (feeds.empty()) throw Error(ErrorKind::kInvalidArgument, "no camera feeds");

  if (cfg.camera_order.empty()) {
    for (const CameraFeedManifest& f : feeds) cfg.camera_order.push_back(f.camera);
  }
  std::set<CameraId> seen;
  for (const CameraId& cam : cfg.camera_order) {
    if (!seen.insert(cam).second) {
      throw Error(ErrorKind::kInvalidArgument, "camera '" + cam.value() + "' listed twice");
    }
    feed_for(feeds, cam);
  }
  const CameraId base = cfg.base_camera.value_or(cfg.camera_order.front());
  auto it = std::find(cfg.camera_order.begin(), cfg.camera_order.end(), base);
  if (it == cfg.camera_order.end()) {
    throw Error(ErrorKind::kMissingBaseCamera, "base camera '" + base.value() + "' has no feed");
  }
  std::rotate(cfg.camera_order.begin(), it, it + 1);
  cfg.base_camera = base;
  return cfg;
}

PreparedClips prepare_clips(std::span<const CameraFeedManifest> feeds,
                            const IngestionConfig& resolved_cfg) {
  PreparedClips out;
  out.camera_order = resolved_cfg.camera_order;
  out.clips.resize(out.camera_order.size());
  const auto n = static_cast<std::ptrdiff_t>(out.camera_order.size());
  std::vector<std::exception_ptr> errors(out.clips.size());
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    try {
      out.clips[c] = segment_clips(feed_for(feeds, out.camera_order[c]), resolved_cfg.segmenter);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::vector<ClipRecord>& base = out.clips.front();
  out.pairs.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out.pairs[i].base = base[i];
  for (std::size_t c = 1; c < out.clips.size(); ++c) {
    std::vector<AlignedClipPair> aligned = align_clips(base, out.clips[c]);
    for (std::size_t i = 0; i < base.size(); ++i) {
      AlignedOther other = std::move(aligned[i].others.front());
      other.camera = out.camera_order[c];
      out.pairs[i].others.push_back(std::move(other));
    }
  }
  return out;
}

IngestionReport ingest(std::span<const CameraFeedManifest> feeds, const IngestionConfig& cfg,
                       VisionModel& vlm) {
  const IngestionConfig resolved = cfg.resolved(feeds);
  return ingest_prepared(prepare_clips(feeds, resolved), resolved, vlm);
}

IngestionReport ingest_prepared(const PreparedClips& prepared, const IngestionConfig& cfg,
                                VisionModel& vlm) {
  IngestionReport report;
  report.config = cfg;
  const std::vector<AlignedClipPair>& pairs = prepared.pairs;
  const std::size_t others = prepared.camera_order.size() - 1;
  std::vector<ChainResult> chains;

  if (cfg.mode == IngestMode::kTrafficLens) {
    // Similarity for every (base, other) slot up front; absent slots score 0.
    std::vector<kernels::DetectionSetPair> jobs;
    jobs.reserve(pairs.size() * others);
    for (const AlignedClipPair& p : pairs) {
      for (const AlignedOther& o : p.others) {
        jobs.push_back({p.base.detections, o.clip ? std::span<const Detection>(o.clip->detections)
                                                  : std::span<const Detection>()});
      }
    }
    const std::vector<double> scores = kernels::similarity_scores(jobs);
    run_parallel(
        pairs.size(), cfg.workers,
        [&](std::size_t i) {
          return run_trafficlens_chain(
              pairs[i], std::span<const double>(scores).subspan(i * others, others), cfg, vlm);
        },
        chains);
  } else {
    // Baseline describes every clip of every camera. Aligned clips ride along
    // with their base clip; the rest run as their own single-call chains.
    std::vector<std::vector<const ClipRecord*>> aligned(pairs.size());
    std::vector<const ClipRecord*> unaligned;
    for (std::size_t c = 1; c < prepared.clips.size(); ++c) {
      std::set<int> used;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& clip = pairs[i].others[c - 1].clip;
        aligned[i].push_back(clip ? &*clip : nullptr);
        if (clip) used.insert(clip->clip_id);
      }
      for (const ClipRecord& clip : prepared.clips[c]) {
        if (!used.contains(clip.clip_id)) unaligned.push_back(&clip);
      }
    }
    std::vector<ChainResult> extra;
    run_parallel(
        pairs.size(), cfg.workers,
        [&](std::size_t i) { return run_baseline_chain(pairs[i].base, aligned[i], cfg, vlm); },
        chains);
    run_parallel(
        unaligned.size(), cfg.workers,
        [&](std::size_t i) {
          ChainResult r;
          const ClipRecord& clip = *unaligned[i];
          const int budget = cfg.schedule.baseline_limit;
          const ModelReply reply = describe_or_throw(
              vlm, request_for(clip, base_prompt(PromptRole::kBaseline), budget, 1), clip);
          r.calls = 1;
          r.segments.push_back(segment_from(clip, SegmentRole::kFollowup, budget, reply));
          r.latency_ms = reply.usage.latency_ms;
          return r;
        },
        extra);
    for (ChainResult& r : extra) chains.push_back(std::move(r));
  }

  for (ChainResult& chain : chains) {
    report.vlm_calls += chain.calls;
    report.skipped_clips += chain.skipped;
    report.absent_pairs += chain.absent;
    report.failed_calls += chain.failed;
    report.total_latency_ms += chain.latency_ms;
    for (NarrativeSegment& s : chain.segments) report.segments.push_back(std::move(s));
  }
  report.parallel_latency_ms = list_schedule_makespan(chains, cfg.workers);
  report.document = assemble_document(pairs, report.segments);
  return report;
}

IntersectionDocument assemble_document(std::span<const AlignedClipPair> pairs,
                                       std::span<const NarrativeSegment> segments) {
  std::map<std::pair<CameraId, int>, const NarrativeSegment*> base_by_clip;
  std::map<std::pair<CameraId, int>, const NarrativeSegment*> followup_by_clip;
  for (const NarrativeSegment& s : segments) {
    auto& index = s.role == SegmentRole::kBase ? base_by_clip : followup_by_clip;
    index[{s.camera, s.clip_id}] = &s;
  }

  IntersectionDocument doc;
  for (const AlignedClipPair& pair : pairs) {
    auto base = base_by_clip.find({pair.base.camera, pair.base.clip_id});
    if (base == base_by_clip.end()) {
      throw Error(ErrorKind::kMissingBaseSegment,
                  "no base segment for " + where(pair.base.camera, pair.base.clip_id));
    }
    DocumentEntry entry{pair.base.start_ms, pair.base.end_ms, base->second->text};
    for (const AlignedOther& other : pair.others) {
      if (!other.clip) continue;
      auto f = followup_by_clip.find({other.clip->camera, other.clip->clip_id});
      if (f == followup_by_clip.end() || f->second->skipped || f->second->text.empty()) continue;
      if (!entry.body.empty()) entry.body += ' ';
      entry.body += f->second->text;
    }
    doc.entries.push_back(std::move(entry));
  }
  std::stable_sort(doc.entries.begin(), doc.entries.end(),
                   [](const DocumentEntry& a, const DocumentEntry& b) { return a.start_ms < b.start_ms; });
  return doc;
}

SpeedupSummary summarize_speedup(const IngestionReport& baseline,
                                const IngestionReport& trafficlens) {
  SpeedupSummary out;
  out.baseline_ms = baseline.total_latency_ms;
  out.trafficlens_ms = trafficlens.total_latency_ms;
  out.ratio = out.trafficlens_ms > 0
                  ? static_cast<double>(out.baseline_ms) / static_cast<double>(out.trafficlens_ms)
                  : 0.0;
  return out;
}

SpeedupSummary compare_modes(std::span<const CameraFeedManifest> feeds,
                             const IngestionConfig& baseline_cfg,
                             const IngestionConfig& trafficlens_cfg, VisionModel& vlm) {
  IngestionConfig b = baseline_cfg;
  b.mode = IngestMode::kBaseline;
  IngestionConfig t = trafficlens_cfg;
  t.mode = IngestMode::kTrafficLens;
  return summarize_speedup(ingest(feeds, b, vlm), ingest(feeds, t, vlm));
}

}  // namespace trafficlens
