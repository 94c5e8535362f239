#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "image.hpp"

namespace simx {

// Flattened row-major RGB values of a 128x128 image, scaled to [0,1].
using PixelVector = std::vector<float>;
constexpr size_t kPixelVectorLength = 128 * 128 * 3;

// Resizes to 128x128 first when needed.
PixelVector to_pixel_vector(const RgbImage& img);

struct KMeansConfig {
  int k = 1;
  int max_iterations = 100;
  uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> assignment;        // per input vector
  std::vector<PixelVector> centroids;
  int iterations = 0;
};

// Lloyd's iteration under squared Euclidean distance. Initialization is the
// first k input vectors in order; empty clusters keep their previous
// centroid; ties assign to the lower centroid index.
KMeansResult kmeans_cluster(const std::vector<PixelVector>& vectors,
                            const KMeansConfig& config);

// Clusters corpus + patch together; predicts the patch's cluster-mate
// (nearest by squared Euclidean if several), or nothing if the patch sits in
// a singleton cluster.
std::optional<int> kmeans_baseline_query(
    const std::vector<PixelVector>& corpus, const RgbImage& patch,
    const KMeansConfig& config);

enum class Metric { L1, L2 };

// The two corpus ids nearest to the patch vector, ascending distance, ties by
// lower id.
std::array<int, 2> knn_baseline_query(const std::vector<PixelVector>& corpus,
                                      const RgbImage& patch, Metric metric);

}  // namespace simx
