#include "index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace simx {

namespace fs = std::filesystem;

Tensor3 encode_image(const Network& net, const RgbImage& img) {
  return forward(net.weights, net.spec, to_tensor(resize(img, 128, 128)));
}

BuildResult build_index(const fs::path& dir, const Network& net) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(Status::empty_corpus, "not a directory: " + dir.string());

  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());

  BuildResult result;
  result.index.network_seed = net.spec.seed;
  for (const std::string& name : names) {
    RgbImage img;
    try {
      img = load_image(dir / name);
    } catch (const Error&) {
      ++result.skipped;
      continue;
    }
    IndexEntry entry;
    entry.image_id = static_cast<uint32_t>(result.index.entries.size());
    entry.source_path = name;
    entry.encoding = encode_image(net, img);
    result.index.entries.push_back(std::move(entry));
  }
  if (result.index.entries.empty())
    throw Error(Status::empty_corpus,
                "empty corpus: no decodable images in " + dir.string());
  return result;
}

namespace {

constexpr char kMagic[4] = {'S', 'I', 'M', 'X'};

static_assert(std::endian::native == std::endian::little,
              "index serialization assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw Error(Status::corrupt, "index file truncated");
  return v;
}

}  // namespace

void save_index(const EncodingIndex& index, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Status::io, "cannot write index: " + path.string());
  out.write(kMagic, 4);
  put<uint32_t>(out, index.format_version);
  put<uint64_t>(out, index.network_seed);
  put<uint32_t>(out, static_cast<uint32_t>(index.entries.size()));
  for (const IndexEntry& e : index.entries) {
    put<uint32_t>(out, e.image_id);
    if (e.source_path.size() > 0xFFFF)
      throw Error(Status::invalid_argument, "source path too long");
    put<uint16_t>(out, static_cast<uint16_t>(e.source_path.size()));
    out.write(e.source_path.data(),
              static_cast<std::streamsize>(e.source_path.size()));
    put<uint16_t>(out, static_cast<uint16_t>(e.encoding.height));
    put<uint16_t>(out, static_cast<uint16_t>(e.encoding.width));
    put<uint16_t>(out, static_cast<uint16_t>(e.encoding.channels));
    out.write(reinterpret_cast<const char*>(e.encoding.data.data()),
              static_cast<std::streamsize>(e.encoding.size() * sizeof(float)));
  }
  if (!out) throw Error(Status::io, "write failed: " + path.string());
}

EncodingIndex load_index(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Status::io, "cannot open index: " + path.string());
  char magic[4] = {0};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(Status::format, "not an index file (bad magic): " + path.string());

  EncodingIndex index;
  index.format_version = take<uint32_t>(in);
  if (index.format_version != 1)
    throw Error(Status::version_mismatch,
                "index version " + std::to_string(index.format_version) +
                    " unsupported, expected 1");
  index.network_seed = take<uint64_t>(in);
  uint32_t count = take<uint32_t>(in);
  index.entries.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.image_id = take<uint32_t>(in);
    uint16_t len = take<uint16_t>(in);
    e.source_path.resize(len);
    in.read(e.source_path.data(), len);
    uint16_t h = take<uint16_t>(in);
    uint16_t w = take<uint16_t>(in);
    uint16_t c = take<uint16_t>(in);
    e.encoding = Tensor3(h, w, c);
    in.read(reinterpret_cast<char*>(e.encoding.data.data()),
            static_cast<std::streamsize>(e.encoding.size() * sizeof(float)));
    if (!in) throw Error(Status::corrupt, "index file truncated");
    index.entries.push_back(std::move(e));
  }
  return index;
}

}  // namespace simx
