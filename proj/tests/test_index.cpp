#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <vector>

#include "error.hpp"
#include "index.hpp"
#include "rng.hpp"
#include "synth.hpp"

using namespace simx;
using namespace simx::test;

namespace {

std::vector<char> read_all(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& p, const std::vector<char>& b) {
  std::ofstream f(p, std::ios::binary);
  f.write(b.data(), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("build_index: ids follow lexicographic file order") {
  TempDir tmp("idx_order");
  // Deliberately created in non-sorted order.
  save_png(synth_image(3), tmp.path() / "charlie.png");
  save_png(synth_image(1), tmp.path() / "alpha.png");
  save_png(synth_image(2), tmp.path() / "bravo.png");
  Network net(7);
  BuildResult r = build_index(tmp.path(), net);
  REQUIRE(r.index.entries.size() == 3);
  CHECK(r.skipped == 0);
  CHECK(r.index.network_seed == 7);
  CHECK(r.index.entries[0].source_path == "alpha.png");
  CHECK(r.index.entries[1].source_path == "bravo.png");
  CHECK(r.index.entries[2].source_path == "charlie.png");
  for (uint32_t i = 0; i < 3; ++i) CHECK(r.index.entries[i].image_id == i);
}

TEST_CASE("build_index: undecodable files are skipped and counted") {
  TempDir tmp("idx_skip");
  make_corpus(tmp.path(), 3, 50);
  {
    std::ofstream f(tmp.path() / "notes.txt");
    f << "not an image";
  }
  Network net(7);
  BuildResult r = build_index(tmp.path(), net);
  CHECK(r.index.entries.size() == 3);
  CHECK(r.skipped == 1);
}

TEST_CASE("build_index: empty directory is an error") {
  TempDir tmp("idx_empty");
  Network net(7);
  CHECK_THROWS_AS(build_index(tmp.path(), net), Error);
  try {
    build_index(tmp.path(), net);
  } catch (const Error& e) {
    CHECK(e.status() == Status::empty_corpus);
  }
}

TEST_CASE("build_index: entries reproduce direct per-image encodings") {
  TempDir tmp("idx_reencode");
  make_corpus(tmp.path(), 4, 11);
  Network net(42);
  BuildResult r = build_index(tmp.path(), net);
  REQUIRE(r.index.entries.size() == 4);
  for (const IndexEntry& e : r.index.entries) {
    Tensor3 direct = encode_image(net, load_image(tmp.path() / e.source_path));
    REQUIRE(e.encoding.same_shape(direct));
    CHECK(e.encoding.data == direct.data);
  }
}

TEST_CASE("encode_image: resizes non-128 inputs and yields 32x32x10") {
  Network net(5);
  Tensor3 enc = encode_image(net, synth_image(9, 200, 150));
  CHECK(enc.height == 32);
  CHECK(enc.width == 32);
  CHECK(enc.channels == 10);
}

TEST_CASE("save/load: round-trip preserves the index exactly") {
  TempDir tmp("idx_rt");
  make_corpus(tmp.path() / "corpus", 3, 17);
  Network net(1234);
  EncodingIndex idx = build_index(tmp.path() / "corpus", net).index;
  save_index(idx, tmp.path() / "a.simx");
  EncodingIndex back = load_index(tmp.path() / "a.simx");
  CHECK(back.format_version == idx.format_version);
  CHECK(back.network_seed == idx.network_seed);
  CHECK(back.normalization_tag == idx.normalization_tag);
  REQUIRE(back.entries.size() == idx.entries.size());
  for (size_t i = 0; i < idx.entries.size(); ++i) {
    CHECK(back.entries[i].image_id == idx.entries[i].image_id);
    CHECK(back.entries[i].source_path == idx.entries[i].source_path);
    CHECK(back.entries[i].encoding.data == idx.entries[i].encoding.data);
  }
}

TEST_CASE("save: double build then save is byte-identical") {
  TempDir tmp("idx_repro");
  make_corpus(tmp.path() / "corpus", 5, 77);
  auto build_once = [&](const std::filesystem::path& out) {
    Network net(42);
    save_index(build_index(tmp.path() / "corpus", net).index, out);
  };
  build_once(tmp.path() / "x.simx");
  build_once(tmp.path() / "y.simx");
  CHECK(read_all(tmp.path() / "x.simx") == read_all(tmp.path() / "y.simx"));
}

TEST_CASE("save/load: random small indices survive the round trip") {
  TempDir tmp("idx_prop");
  SplitMix64 rng(404);
  for (int it = 0; it < 10; ++it) {
    EncodingIndex idx;
    idx.network_seed = rng.next();
    int n = 1 + static_cast<int>(rng.next() % 5);
    for (int i = 0; i < n; ++i) {
      IndexEntry e;
      e.image_id = static_cast<uint32_t>(i);
      e.source_path = "img_" + std::to_string(rng.next() % 1000) + ".png";
      e.encoding = Tensor3(2 + int(rng.next() % 4), 2 + int(rng.next() % 4),
                           1 + int(rng.next() % 3));
      for (float& v : e.encoding.data)
        v = static_cast<float>(rng.next_unit() * 2.0 - 1.0);
      idx.entries.push_back(std::move(e));
    }
    auto p = tmp.path() / ("r" + std::to_string(it) + ".simx");
    save_index(idx, p);
    EncodingIndex back = load_index(p);
    CHECK(back.network_seed == idx.network_seed);
    REQUIRE(back.entries.size() == idx.entries.size());
    for (size_t i = 0; i < idx.entries.size(); ++i) {
      CHECK(back.entries[i].source_path == idx.entries[i].source_path);
      REQUIRE(back.entries[i].encoding.same_shape(idx.entries[i].encoding));
      CHECK(back.entries[i].encoding.data == idx.entries[i].encoding.data);
    }
  }
}

TEST_CASE("load: wrong magic is a format error") {
  TempDir tmp("idx_badmagic");
  EncodingIndex idx;
  idx.network_seed = 1;
  idx.entries.push_back({0, "a.png", Tensor3(2, 2, 1)});
  auto p = tmp.path() / "bad.simx";
  save_index(idx, p);
  auto bytes = read_all(p);
  bytes[0] = 'X';
  write_all(p, bytes);
  try {
    load_index(p);
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::format);
  }
}

TEST_CASE("load: unknown version names both versions") {
  TempDir tmp("idx_badver");
  EncodingIndex idx;
  idx.network_seed = 1;
  idx.entries.push_back({0, "a.png", Tensor3(2, 2, 1)});
  auto p = tmp.path() / "v9.simx";
  save_index(idx, p);
  auto bytes = read_all(p);
  bytes[4] = 9;  // little-endian u32 version right after the magic
  write_all(p, bytes);
  try {
    load_index(p);
    FAIL("expected version error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::version_mismatch);
    CHECK(std::string(e.what()).find('9') != std::string::npos);
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("load: truncated file is corrupt") {
  TempDir tmp("idx_trunc");
  EncodingIndex idx;
  idx.network_seed = 1;
  idx.entries.push_back({0, "a.png", Tensor3(4, 4, 2)});
  auto p = tmp.path() / "t.simx";
  save_index(idx, p);
  auto bytes = read_all(p);
  for (size_t keep : {bytes.size() - 1, bytes.size() / 2, size_t{20}}) {
    std::vector<char> cut(bytes.begin(), bytes.begin() + keep);
    write_all(p, cut);
    try {
      load_index(p);
      FAIL("expected corrupt error at size ", keep);
    } catch (const Error& e) {
      CHECK(e.status() == Status::corrupt);
    }
  }
}

TEST_CASE("load: missing file is an io error") {
  TempDir tmp("idx_missing");
  try {
    load_index(tmp.path() / "absent.simx");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::io);
  }
}
