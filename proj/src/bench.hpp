#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "image.hpp"
#include "index.hpp"
#include "match.hpp"

namespace simx {

enum class CropPolicy { exact_piece, random_crop };

struct QuerySpec {
  uint32_t source_id = 0;
  int x = 0;
  int y = 0;
  int edge = 0;
  CropPolicy policy = CropPolicy::exact_piece;
};

struct GeneratedQuery {
  RgbImage patch;  // raw crop; the matcher resizes it to the piece size
  QuerySpec truth;
};

// Deterministic in seed. Exact-piece crops land precisely on piece
// boundaries; random crops sample a uniform origin and an edge in [48, 96].
std::vector<GeneratedQuery> generate_queries(
    const EncodingIndex& index, const std::filesystem::path& image_root,
    int count, CropPolicy policy, SliceMode mode, uint64_t seed);

struct DistStats {
  int n = 0;
  double mean = 0, stddev = 0;
  double min = 0, p5 = 0, p50 = 0, p95 = 0, max = 0;
};

struct CalibrationResult {
  double recommended_tau = 0;
  DistStats true_dist;      // jittered crops against their own image
  DistStats impostor_dist;  // the same crops against a different image
  bool overlap = false;     // p95(true) >= p5(impostor)
};

// Recommends tau as the midpoint between the 95th percentile of genuine
// composite distances and the 5th percentile of impostor distances, sampled
// from `holdout_fraction` of the corpus.
CalibrationResult calibrate(const std::filesystem::path& corpus_dir,
                            SliceMode mode, double holdout_fraction,
                            uint64_t seed, int threads);

struct BenchRow {
  std::string method;  // cnn-quad | cnn-grid16 | kmeans | knn-L1 | knn-L2
  int correct = 0;
  int total = 0;
  double accuracy_percent = 0;
  double tolerance = 0;  // 0 for baselines
  double wall_seconds = 0;
};

struct BenchReport {
  int corpus_size = 0;
  int query_count = 0;
  uint64_t seed = 0;
  CropPolicy policy = CropPolicy::random_crop;
  double index_build_seconds = 0;
  std::vector<BenchRow> rows;
};

// Builds the index, generates queries, runs each requested method. A negative
// tolerance_override means "calibrate per cnn mode".
BenchReport run_bench(const std::filesystem::path& corpus_dir, int query_count,
                      const std::vector<std::string>& methods,
                      CropPolicy policy, uint64_t seed,
                      double tolerance_override, int threads);

// Mean best-distance of jittered true-source crops per jitter offset;
// offsets are diagonal shifts of the exact-piece origin, in pixels.
std::vector<double> jitter_sweep(QuerySession& session,
                                 const EncodingIndex& index,
                                 const std::filesystem::path& image_root,
                                 const std::vector<int>& offsets,
                                 int queries_per_offset, SliceMode mode,
                                 uint64_t seed);

std::string format_report_text(const BenchReport& report);
std::string format_report_tsv(const BenchReport& report);
void write_report(const BenchReport& report, const std::filesystem::path& path);

double accuracy_percent(int correct, int total);

}  // namespace simx
