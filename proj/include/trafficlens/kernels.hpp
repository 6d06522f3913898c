#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin with the
// same per-element arithmetic; tests hold the two to bitwise agreement and
// bench_kernels times them against each other.

#include <cstddef>
#include <span>
#include <vector>

#include "trafficlens/core_types.hpp"

namespace trafficlens::kernels {

/// Cosine similarity of `query` against each row of a row-major matrix
/// holding `rows.size() / dim` vectors. Zero-norm rows score 0.
std::vector<double> cosine_scores(std::span<const double> rows, std::size_t dim,
                                  std::span<const double> query);
std::vector<double> cosine_scores_serial(std::span<const double> rows, std::size_t dim,
                                         std::span<const double> query);

/// Indices of the k best scores, descending; ties go to the smaller
/// `tiebreak` value, then the smaller index.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k,
                               std::span<const Millis> tiebreak);

/// Row-major |a| x |b| matrix of pairwise IoU.
std::vector<double> iou_matrix(std::span<const BoundingBox> a, std::span<const BoundingBox> b);
std::vector<double> iou_matrix_serial(std::span<const BoundingBox> a,
                                      std::span<const BoundingBox> b);

struct DetectionSetPair {
  std::span<const Detection> base;
  std::span<const Detection> other;
};

/// Clip-similarity score for every pair.
std::vector<double> similarity_scores(std::span<const DetectionSetPair> pairs);
std::vector<double> similarity_scores_serial(std::span<const DetectionSetPair> pairs);

}  // namespace trafficlens::kernels
