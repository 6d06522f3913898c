// Serial vs OpenMP timings for the data-parallel kernels, plus one mock
// ingestion of the standard fixture. Results also cross-check that both
// variants agree.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "trafficlens/fixtures.hpp"
#include "trafficlens/kernels.hpp"
#include "trafficlens/orchestrator.hpp"

using namespace trafficlens;
namespace k = trafficlens::kernels;

namespace {

template <typename F>
double best_ms(F&& f, int reps = 5) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool agree) {
  std::printf("%-18s %10.2f %10.2f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              agree ? "agree" : "MISMATCH");
}

BoundingBox random_box(std::mt19937_64& rng) {
  const double x = static_cast<double>(rng() % 1800), y = static_cast<double>(rng() % 1000);
  return BoundingBox::make(x, y, x + 4 + static_cast<double>(rng() % 120), y + 4 + static_cast<double>(rng() % 120));
}

}  // namespace

int main() {
  std::mt19937_64 rng(42);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-18s %10s %10s %9s\n", "kernel", "serial_ms", "omp_ms", "speedup");

  {
    const std::size_t dim = 256, n = 100000;
    std::normal_distribution<double> nd;
    std::vector<double> rows(n * dim), query(dim);
    for (double& x : rows) x = nd(rng);
    for (double& x : query) x = nd(rng);
    std::vector<double> a, b;
    const double s = best_ms([&] { a = k::cosine_scores_serial(rows, dim, query); });
    const double p = best_ms([&] { b = k::cosine_scores(rows, dim, query); });
    row("cosine 100k x 256", s, p, a == b);
  }
  {
    std::vector<BoundingBox> a(2000), b(2000);
    for (auto& x : a) x = random_box(rng);
    for (auto& x : b) x = random_box(rng);
    std::vector<double> m1, m2;
    const double s = best_ms([&] { m1 = k::iou_matrix_serial(a, b); });
    const double p = best_ms([&] { m2 = k::iou_matrix(a, b); });
    row("iou 2000 x 2000", s, p, m1 == m2);
  }
  {
    const auto& labels = fixture_labels();
    std::vector<std::vector<Detection>> sets(40000);
    for (auto& set : sets) {
      const int n = 10 + static_cast<int>(rng() % 15);
      for (int i = 0; i < n; ++i) set.push_back(Detection::make(labels[rng() % 4], random_box(rng), 0.9));
    }
    std::vector<k::DetectionSetPair> pairs;
    for (std::size_t i = 0; i + 1 < sets.size(); i += 2) pairs.push_back({sets[i], sets[i + 1]});
    std::vector<double> r1, r2;
    const double s = best_ms([&] { r1 = k::similarity_scores_serial(pairs); });
    const double p = best_ms([&] { r2 = k::similarity_scores(pairs); });
    row("similarity 20k", s, p, r1 == r2);
  }
  {
    const FixturePlan plan = make_fixture();
    IngestionConfig one, many;
    many.workers = omp_get_max_threads();
    IngestionReport r1, r2;
    const double s = best_ms([&] { MockBackend m; r1 = ingest(plan.feeds, one, m); }, 3);
    const double p = best_ms([&] { MockBackend m; r2 = ingest(plan.feeds, many, m); }, 3);
    row("ingest fixture", s, p, r1.document.render() == r2.document.render());
    std::printf("logical clock: total %lld ms, %d-worker makespan %lld ms\n",
                static_cast<long long>(r2.total_latency_ms), many.workers,
                static_cast<long long>(r2.parallel_latency_ms));
  }
  return 0;
}
