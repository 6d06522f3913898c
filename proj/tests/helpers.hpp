#pragma once

// Shared builders and independent oracles for the test binaries. The oracles
// deliberately avoid the library's code paths (different algorithms or
// different loop structure) so agreement means something.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "trafficlens/core_types.hpp"
#include "trafficlens/ingest_frontend.hpp"

namespace testing {

using namespace trafficlens;

inline Detection det(const std::string& label, double x0, double y0, double x1, double y1,
                     double conf = 0.9) {
  return Detection::make(label, BoundingBox::make(x0, y0, x1, y1), conf);
}

/// Feed with one frame every `gap_ms` over [0, duration_ms), all frames
/// carrying `dets_at(ts)`.
inline CameraFeedManifest make_feed(const std::string& camera, Millis duration_ms, Millis gap_ms,
                                    const std::function<std::vector<Detection>(Millis)>& dets_at,
                                    Millis offset_ms = 0) {
  CameraFeedManifest feed;
  feed.camera = CameraId(camera);
  feed.frame_rate_hz = 1000.0 / static_cast<double>(gap_ms);
  for (Millis t = offset_ms; t < offset_ms + duration_ms; t += gap_ms) {
    FrameRecord f;
    f.camera = feed.camera;
    f.timestamp_ms = t;
    f.detections = dets_at(t);
    feed.frames.push_back(std::move(f));
  }
  return feed;
}

inline CameraFeedManifest static_feed(const std::string& camera, Millis duration_ms, Millis gap_ms,
                                      std::vector<Detection> dets, Millis offset_ms = 0) {
  return make_feed(camera, duration_ms, gap_ms, [dets](Millis) { return dets; }, offset_ms);
}

inline ClipRecord clip(const std::string& camera, int id, Millis start, Millis end,
                       std::vector<Detection> dets = {}) {
  ClipRecord c;
  c.clip_id = id;
  c.camera = CameraId(camera);
  c.start_ms = start;
  c.end_ms = end;
  c.key_frame.camera = c.camera;
  c.key_frame.timestamp_ms = start;
  c.key_frame.detections = dets;
  c.detections = std::move(dets);
  return c;
}

// --- oracles ----------------------------------------------------------------

/// IoU of integer-coordinate boxes by counting unit pixel cells.
inline double pixel_iou(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1, int by1) {
  long inter = 0, uni = 0;
  const int lo_x = std::min(ax0, bx0), hi_x = std::max(ax1, bx1);
  const int lo_y = std::min(ay0, by0), hi_y = std::max(ay1, by1);
  for (int x = lo_x; x < hi_x; ++x) {
    for (int y = lo_y; y < hi_y; ++y) {
      const bool in_a = x >= ax0 && x < ax1 && y >= ay0 && y < ay1;
      const bool in_b = x >= bx0 && x < bx1 && y >= by0 && y < by1;
      inter += (in_a && in_b);
      uni += (in_a || in_b);
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Top-down memoized LCS; the library uses a bottom-up table.
inline std::size_t memo_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    if (i == a.size() || j == b.size()) return std::size_t{0};
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    std::size_t r = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[{i, j}] = r;
    return r;
  };
  return go(0, 0);
}

/// Exhaustive LCS over all subsequences of the shorter sequence; tiny inputs only.
inline std::size_t enumerate_lcs(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    std::size_t j = 0, len = 0;
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < t.size() && t[j] != s[i]) ++j;
      if (j == t.size()) ok = false;
      else { ++j; ++len; }
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

/// FNV-1a term-hash embedding written straight from its definition.
inline std::vector<double> fnv_embedding(const std::string& text, std::size_t dim = 256) {
  std::vector<double> v(dim, 0.0);
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    std::uint32_t h = 2166136261u;
    for (unsigned char c : tok) { h ^= c; h *= 16777619u; }
    v[h % dim] += 1.0;
    tok.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) tok += static_cast<char>(std::tolower(c));
    else flush();
  }
  flush();
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return (na == 0.0 || nb == 0.0) ? 0.0 : dot / std::sqrt(na * nb);
}

/// Brute-force ranking: full sort by (score desc, start asc, position asc).
inline std::vector<std::size_t> brute_rank(const std::vector<std::vector<double>>& rows,
                                           const std::vector<Millis>& starts,
                                           const std::vector<double>& q, std::size_t k) {
  std::vector<double> s(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) s[i] = cosine(rows[i], q);
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    if (starts[a] != starts[b]) return starts[a] < starts[b];
    return a < b;
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> v(dim);
  double n = 0.0;
  for (double& x : v) { x = nd(rng); n += x * x; }
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace testing
