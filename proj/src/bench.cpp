#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "baselines.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace simx {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

RgbImage load_sized(const fs::path& root, const EncodingIndex& index,
                    uint32_t id) {
  return resize(load_image(root / index.entries[id].source_path), 128, 128);
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  size_t rank = static_cast<size_t>(
      std::ceil(p / 100.0 * static_cast<double>(v.size())));
  rank = std::clamp<size_t>(rank, 1, v.size());
  return v[rank - 1];
}

DistStats dist_stats(const std::vector<double>& v) {
  DistStats s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0, sum2 = 0;
  for (double x : v) {
    sum += x;
    sum2 += x * x;
  }
  s.mean = sum / s.n;
  s.stddev = std::sqrt(std::max(0.0, sum2 / s.n - s.mean * s.mean));
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.p5 = percentile(v, 5);
  s.p50 = percentile(v, 50);
  s.p95 = percentile(v, 95);
  return s;
}

// Exact-piece origin with a clamped diagonal jitter.
QuerySpec jittered_piece(SplitMix64& rng, int n_images, SliceMode mode,
                         int jitter) {
  const int side = grid_side(mode);
  const int edge = piece_edge(mode);
  QuerySpec q;
  q.source_id = static_cast<uint32_t>(rng.next() % n_images);
  int piece = static_cast<int>(rng.next() % (side * side));
  int dx = jitter > 0 ? static_cast<int>(rng.next() % (2 * jitter + 1)) - jitter : 0;
  int dy = jitter > 0 ? static_cast<int>(rng.next() % (2 * jitter + 1)) - jitter : 0;
  q.x = std::clamp((piece % side) * edge + dx, 0, 128 - edge);
  q.y = std::clamp((piece / side) * edge + dy, 0, 128 - edge);
  q.edge = edge;
  q.policy = CropPolicy::exact_piece;
  return q;
}

}  // namespace

double accuracy_percent(int correct, int total) {
  if (total <= 0) return 0.0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<GeneratedQuery> generate_queries(const EncodingIndex& index,
                                             const fs::path& image_root,
                                             int count, CropPolicy policy,
                                             SliceMode mode, uint64_t seed) {
  if (count < 1)
    throw Error(Status::invalid_argument, "query count must be >= 1");
  const int n = static_cast<int>(index.entries.size());
  SplitMix64 rng(seed);
  std::vector<GeneratedQuery> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    QuerySpec q;
    if (policy == CropPolicy::exact_piece) {
      q = jittered_piece(rng, n, mode, 0);
    } else {
      q.source_id = static_cast<uint32_t>(rng.next() % n);
      q.edge = 48 + static_cast<int>(rng.next() % 49);  // [48, 96]
      q.x = static_cast<int>(rng.next() % (128 - q.edge + 1));
      q.y = static_cast<int>(rng.next() % (128 - q.edge + 1));
      q.policy = CropPolicy::random_crop;
    }
    RgbImage src = load_sized(image_root, index, q.source_id);
    out.push_back({crop(src, q.x, q.y, q.edge, q.edge), q});
  }
  return out;
}

CalibrationResult calibrate(const fs::path& corpus_dir, SliceMode mode,
                            double holdout_fraction, uint64_t seed,
                            int threads) {
  Network net(seed);
  BuildResult built = build_index(corpus_dir, net);
  const EncodingIndex& index = built.index;
  const int n = static_cast<int>(index.entries.size());
  if (n < 10)
    throw Error(Status::empty_corpus,
                "calibration needs >= 10 images, got " + std::to_string(n));

  int samples = std::max(
      10, static_cast<int>(std::lround(holdout_fraction * n)));
  QuerySession session(net, index, corpus_dir);
  MatchConfig config;
  config.mode = mode;
  config.threads = threads;

  SplitMix64 rng(seed ^ 0xCA11B8A7E0ULL);
  std::vector<double> true_d, imp_d;
  true_d.reserve(samples);
  imp_d.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    QuerySpec q = jittered_piece(rng, n, mode, 8);
    RgbImage src = load_sized(corpus_dir, index, q.source_id);
    RgbImage patch = crop(src, q.x, q.y, q.edge, q.edge);

    std::vector<double> d = session.distances_for(q.source_id, patch, config);
    true_d.push_back(*std::min_element(d.begin(), d.end()));

    uint32_t other =
        static_cast<uint32_t>((q.source_id + 1 + rng.next() % (n - 1)) % n);
    d = session.distances_for(other, patch, config);
    imp_d.push_back(*std::min_element(d.begin(), d.end()));
  }

  CalibrationResult r;
  r.true_dist = dist_stats(true_d);
  r.impostor_dist = dist_stats(imp_d);
  r.recommended_tau = 0.5 * (r.true_dist.p95 + r.impostor_dist.p5);
  r.overlap = r.true_dist.p95 >= r.impostor_dist.p5;
  return r;
}

std::vector<double> jitter_sweep(QuerySession& session,
                                 const EncodingIndex& index,
                                 const fs::path& image_root,
                                 const std::vector<int>& offsets,
                                 int queries_per_offset, SliceMode mode,
                                 uint64_t seed) {
  const int n = static_cast<int>(index.entries.size());
  const int edge = piece_edge(mode);
  const int side = grid_side(mode);
  MatchConfig config;
  config.mode = mode;

  std::vector<double> means;
  for (int offset : offsets) {
    SplitMix64 rng(seed);  // same sources/pieces at every offset
    double sum = 0;
    for (int i = 0; i < queries_per_offset; ++i) {
      uint32_t id = static_cast<uint32_t>(rng.next() % n);
      int piece = static_cast<int>(rng.next() % (side * side));
      int x = std::clamp((piece % side) * edge + offset, 0, 128 - edge);
      int y = std::clamp((piece / side) * edge + offset, 0, 128 - edge);
      RgbImage src = load_sized(image_root, index, id);
      RgbImage patch = crop(src, x, y, edge, edge);
      std::vector<double> d = session.distances_for(id, patch, config);
      sum += *std::min_element(d.begin(), d.end());
    }
    means.push_back(sum / queries_per_offset);
  }
  return means;
}

BenchReport run_bench(const fs::path& corpus_dir, int query_count,
                      const std::vector<std::string>& methods,
                      CropPolicy policy, uint64_t seed,
                      double tolerance_override, int threads) {
  BenchReport report;
  report.query_count = query_count;
  report.seed = seed;
  report.policy = policy;

  Network net(seed);
  auto t0 = clock_type::now();
  BuildResult built = build_index(corpus_dir, net);
  report.index_build_seconds = seconds_since(t0);
  const EncodingIndex& index = built.index;
  report.corpus_size = static_cast<int>(index.entries.size());
  if (report.corpus_size < 2)
    throw Error(Status::empty_corpus, "bench needs >= 2 corpus images");

  QuerySession session(net, index, corpus_dir);

  // Baselines share the quad-mode query set.
  std::vector<GeneratedQuery> quad_queries;
  auto quad_set = [&]() -> const std::vector<GeneratedQuery>& {
    if (quad_queries.empty())
      quad_queries = generate_queries(index, corpus_dir, query_count, policy,
                                      SliceMode::quad, seed);
    return quad_queries;
  };

  std::vector<PixelVector> corpus_vectors;
  auto vectors = [&]() -> const std::vector<PixelVector>& {
    if (corpus_vectors.empty())
      for (const IndexEntry& e : index.entries)
        corpus_vectors.push_back(
            to_pixel_vector(load_image(corpus_dir / e.source_path)));
    return corpus_vectors;
  };

  for (const std::string& method : methods) {
    BenchRow row;
    row.method = method;
    row.total = query_count;
    auto start = clock_type::now();

    if (method == "cnn-quad" || method == "cnn-grid16") {
      SliceMode mode =
          method == "cnn-quad" ? SliceMode::quad : SliceMode::grid16;
      double tau = tolerance_override;
      if (tau < 0)
        tau = calibrate(corpus_dir, mode, 0.25, seed, threads).recommended_tau;
      row.tolerance = tau;
      MatchConfig config{mode, tau, threads};
      const auto& queries =
          mode == SliceMode::quad
              ? quad_set()
              : generate_queries(index, corpus_dir, query_count, policy,
                                 SliceMode::grid16, seed);
      for (const GeneratedQuery& q : queries) {
        QueryOutcome out = session.run(q.patch, config);
        if (out.answer && out.answer->image_id == q.truth.source_id)
          ++row.correct;
      }
    } else if (method == "kmeans") {
      KMeansConfig config{report.corpus_size, 100, seed};
      for (const GeneratedQuery& q : quad_set()) {
        auto predicted = kmeans_baseline_query(vectors(), q.patch, config);
        if (predicted && static_cast<uint32_t>(*predicted) == q.truth.source_id)
          ++row.correct;
      }
    } else if (method == "knn-L1" || method == "knn-L2") {
      Metric metric = method == "knn-L1" ? Metric::L1 : Metric::L2;
      for (const GeneratedQuery& q : quad_set()) {
        auto neighbors = knn_baseline_query(vectors(), q.patch, metric);
        if (static_cast<uint32_t>(neighbors[0]) == q.truth.source_id)
          ++row.correct;
      }
    } else {
      throw Error(Status::invalid_argument, "unknown method: " + method);
    }

    row.wall_seconds = seconds_since(start);
    row.accuracy_percent = accuracy_percent(row.correct, row.total);
    report.rows.push_back(row);
  }
  return report;
}

std::string format_report_text(const BenchReport& report) {
  std::ostringstream out;
  out << "corpus_size=" << report.corpus_size
      << " queries=" << report.query_count << " seed=" << report.seed
      << " policy="
      << (report.policy == CropPolicy::exact_piece ? "exact" : "random")
      << " index_build_s=" << report.index_build_seconds << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %8s %8s %10s %12s %10s\n", "method",
                "correct", "total", "accuracy", "tolerance", "wall_s");
  out << line;
  for (const BenchRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-12s %8d %8d %9.1f%% %12.4f %10.2f\n",
                  r.method.c_str(), r.correct, r.total, r.accuracy_percent,
                  r.tolerance, r.wall_seconds);
    out << line;
  }
  out << "reference run: corpus 4000, 100 queries, accuracy 95.5%\n";
  return out.str();
}

std::string format_report_tsv(const BenchReport& report) {
  std::ostringstream out;
  out << "# corpus_size\t" << report.corpus_size << "\n";
  out << "# queries\t" << report.query_count << "\n";
  out << "# seed\t" << report.seed << "\n";
  out << "# policy\t"
      << (report.policy == CropPolicy::exact_piece ? "exact" : "random")
      << "\n";
  out << "# index_build_seconds\t" << report.index_build_seconds << "\n";
  out << "# reference_row\t4000\t100\t95.5\n";
  out << "method\tcorrect\ttotal\taccuracy_percent\ttolerance\twall_seconds\n";
  for (const BenchRow& r : report.rows)
    out << r.method << "\t" << r.correct << "\t" << r.total << "\t"
        << r.accuracy_percent << "\t" << r.tolerance << "\t" << r.wall_seconds
        << "\n";
  return out.str();
}

void write_report(const BenchReport& report, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Status::io, "cannot write report: " + path.string());
  out << format_report_tsv(report);
}

}  // namespace simx
