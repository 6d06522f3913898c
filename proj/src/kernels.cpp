#include "trafficlens/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trafficlens/similarity.hpp"

namespace trafficlens::kernels {
namespace {

inline double cosine_row(const double* row, const double* q, std::size_t dim) {
  double dot = 0.0;
  double nr = 0.0;
  double nq = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    dot += row[d] * q[d];
    nr += row[d] * row[d];
    nq += q[d] * q[d];
  }
  if (nr == 0.0 || nq == 0.0) return 0.0;
  return dot / (std::sqrt(nr) * std::sqrt(nq));
}

void check_shape(std::span<const double> rows, std::size_t dim, std::span<const double> query) {
  if (dim == 0 || rows.size() % dim != 0 || query.size() != dim) {
    throw Error(ErrorKind::kInvalidArgument, "cosine_scores: dimension mismatch");
  }
}

}  // namespace

std::vector<double> cosine_scores(std::span<const double> rows, std::size_t dim,
                                  std::span<const double> query) {
  check_shape(rows, dim, query);
  const auto n = static_cast<std::ptrdiff_t>(rows.size() / dim);
  std::vector<double> out(static_cast<std::size_t>(n));
  const double* base = rows.data();
  const double* q = query.data();
#pragma omp parallel for schedule(static) if (n > 512)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = cosine_row(base + static_cast<std::size_t>(i) * dim, q, dim);
  }
  return out;
}

std::vector<double> cosine_scores_serial(std::span<const double> rows, std::size_t dim,
                                         std::span<const double> query) {
  check_shape(rows, dim, query);
  const std::size_t n = rows.size() / dim;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cosine_row(rows.data() + i * dim, query.data(), dim);
  return out;
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k,
                               std::span<const Millis> tiebreak) {
  if (tiebreak.size() != scores.size()) {
    throw Error(ErrorKind::kInvalidArgument, "top_k: tiebreak size mismatch");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      if (tiebreak[a] != tiebreak[b]) return tiebreak[a] < tiebreak[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

std::vector<double> iou_matrix(std::span<const BoundingBox> a, std::span<const BoundingBox> b) {
  const auto rows = static_cast<std::ptrdiff_t>(a.size());
  const std::size_t cols = b.size();
  std::vector<double> out(a.size() * cols);
#pragma omp parallel for schedule(static) if (rows * static_cast<std::ptrdiff_t>(cols) > 4096)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[static_cast<std::size_t>(i) * cols + j] = iou(a[i], b[j]);
  }
  return out;
}

std::vector<double> iou_matrix_serial(std::span<const BoundingBox> a,
                                      std::span<const BoundingBox> b) {
  std::vector<double> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = iou(a[i], b[j]);
  }
  return out;
}

std::vector<double> similarity_scores(std::span<const DetectionSetPair> pairs) {
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
  std::vector<double> out(pairs.size());
#pragma omp parallel for schedule(dynamic, 16) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = detection_similarity(pairs[i].base, pairs[i].other).score;
  }
  return out;
}

std::vector<double> similarity_scores_serial(std::span<const DetectionSetPair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const DetectionSetPair& p : pairs) out.push_back(detection_similarity(p.base, p.other).score);
  return out;
}

}  // namespace trafficlens::kernels
