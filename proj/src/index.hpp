#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "image.hpp"
#include "nn.hpp"
#include "tensor.hpp"

namespace simx {

// Network configuration plus its deterministically generated weights.
struct Network {
  NetworkSpec spec;
  WeightSet weights;

  explicit Network(uint64_t seed)
      : spec(NetworkSpec::standard(seed)), weights(init_weights(spec)) {}
};

struct IndexEntry {
  uint32_t image_id = 0;
  std::string source_path;  // relative to the corpus root
  Tensor3 encoding;
};

struct EncodingIndex {
  uint32_t format_version = 1;
  uint64_t network_seed = 0;
  // Pixel preprocessing the encodings were produced under; version 1 always
  // scales bytes to [0, 1].
  std::string normalization_tag = "unit-scale";
  std::vector<IndexEntry> entries;
};

// resize to 128x128 (identity when already there), scale to [0,1], forward.
Tensor3 encode_image(const Network& net, const RgbImage& img);

struct BuildResult {
  EncodingIndex index;
  uint32_t skipped = 0;  // undecodable files
};

// One entry per decodable image under dir (non-recursive), ids assigned in
// lexicographic order of the relative path.
BuildResult build_index(const std::filesystem::path& dir, const Network& net);

void save_index(const EncodingIndex& index, const std::filesystem::path& path);
EncodingIndex load_index(const std::filesystem::path& path);

}  // namespace simx
