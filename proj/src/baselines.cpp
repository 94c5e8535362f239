#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace simx {

PixelVector to_pixel_vector(const RgbImage& img) {
  RgbImage sized = resize(img, 128, 128);
  PixelVector v(kPixelVectorLength);
  for (size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<float>(sized.pixels[i]) / 255.0f;
  return v;
}

namespace {

double sq_dist(const PixelVector& a, const PixelVector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

double l1_dist(const PixelVector& a, const PixelVector& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    s += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return s;
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<PixelVector>& vectors,
                            const KMeansConfig& config) {
  const int n = static_cast<int>(vectors.size());
  if (n == 0)
    throw Error(Status::invalid_argument, "kmeans: no input vectors");
  if (config.k < 1 || config.k > n)
    throw Error(Status::invalid_argument,
                "kmeans: k must be in [1, vector count]");

  KMeansResult r;
  r.centroids.assign(vectors.begin(), vectors.begin() + config.k);
  r.assignment.assign(n, -1);

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    r.iterations = iter + 1;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(vectors[i], r.centroids[0]);
      for (int c = 1; c < config.k; ++c) {
        double d = sq_dist(vectors[i], r.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::vector<size_t> counts(config.k, 0);
    std::vector<std::vector<double>> sums(
        config.k, std::vector<double>(vectors[0].size(), 0.0));
    for (int i = 0; i < n; ++i) {
      ++counts[r.assignment[i]];
      const PixelVector& v = vectors[i];
      std::vector<double>& s = sums[r.assignment[i]];
      for (size_t j = 0; j < v.size(); ++j) s[j] += v[j];
    }
    for (int c = 0; c < config.k; ++c) {
      if (counts[c] == 0) continue;  // stale centroid is kept
      for (size_t j = 0; j < r.centroids[c].size(); ++j)
        r.centroids[c][j] =
            static_cast<float>(sums[c][j] / static_cast<double>(counts[c]));
    }
  }
  return r;
}

std::optional<int> kmeans_baseline_query(
    const std::vector<PixelVector>& corpus, const RgbImage& patch,
    const KMeansConfig& config) {
  std::vector<PixelVector> all = corpus;
  all.push_back(to_pixel_vector(patch));
  KMeansResult r = kmeans_cluster(all, config);

  const int patch_i = static_cast<int>(all.size()) - 1;
  const int patch_cluster = r.assignment[patch_i];
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < patch_i; ++i) {
    if (r.assignment[i] != patch_cluster) continue;
    double d = sq_dist(all[i], all[patch_i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

std::array<int, 2> knn_baseline_query(const std::vector<PixelVector>& corpus,
                                      const RgbImage& patch, Metric metric) {
  if (corpus.size() < 2)
    throw Error(Status::invalid_argument, "knn: corpus must have >= 2 images");
  PixelVector q = to_pixel_vector(patch);
  std::vector<std::pair<double, int>> d(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    double dist =
        metric == Metric::L2 ? std::sqrt(sq_dist(corpus[i], q)) : l1_dist(corpus[i], q);
    d[i] = {dist, static_cast<int>(i)};
  }
  std::partial_sort(d.begin(), d.begin() + 2, d.end());
  return {d[0].second, d[1].second};
}

}  // namespace simx
