#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "image.hpp"
#include "index.hpp"

namespace simx {

struct MatchConfig {
  SliceMode mode = SliceMode::quad;
  double tolerance = 100.0;  // inclusive
  int threads = 0;           // 0 = hardware concurrency

  static MatchConfig quad_defaults() { return {SliceMode::quad, 100.0, 0}; }
  static MatchConfig grid16_defaults() {
    return {SliceMode::grid16, 200.0, 0};
  }
};

struct MatchResult {
  uint32_t image_id = 0;
  int best_placement = 0;
  double best_distance = 0.0;
  bool matched = false;
};

double frobenius_distance(const Tensor3& a, const Tensor3& b);

// Distance from the stored encoding to the re-encoded composite, one value
// per placement. Candidate must already be 128x128 and the patch already the
// mode's piece size.
std::vector<double> candidate_distances(const RgbImage& candidate,
                                        const Tensor3& stored_encoding,
                                        const RgbImage& patch,
                                        const Network& net,
                                        const MatchConfig& config);

struct QueryOutcome {
  std::vector<MatchResult> ranked;  // ascending distance, ties by id
  std::optional<MatchResult> answer;  // best matched entry, if any
};

// Holds the loaded candidate images and their forward activations so
// consecutive queries against the same index skip the per-candidate base
// pass. Safe to reuse across queries, not across networks.
class QuerySession {
 public:
  QuerySession(const Network& net, const EncodingIndex& index,
               std::filesystem::path image_root);
  ~QuerySession();

  QueryOutcome run(const RgbImage& patch, const MatchConfig& config);

  // Distances against a single candidate (used by calibration/benchmarks).
  std::vector<double> distances_for(uint32_t image_id, const RgbImage& patch,
                                    const MatchConfig& config);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

QueryOutcome query(const EncodingIndex& index,
                   const std::filesystem::path& image_root,
                   const RgbImage& patch, const Network& net,
                   const MatchConfig& config);

}  // namespace simx
