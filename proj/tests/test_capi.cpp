#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <simx.h>

#include <cstring>
#include <string>

#include "image.hpp"
#include "synth.hpp"

using namespace simx;
using namespace simx::test;

TEST_CASE("status names are stable strings") {
  CHECK(std::string(simx_status_name(SIMX_OK)) == "ok");
  CHECK(simx_status_name(SIMX_ERR_IO) != nullptr);
  CHECK(simx_status_name(SIMX_ERR_EMPTY_CORPUS) != nullptr);
  CHECK(simx_status_name(SIMX_ERR_INTERNAL) != nullptr);
}

TEST_CASE("net create/destroy and null-argument handling") {
  simx_net* net = nullptr;
  REQUIRE(simx_net_create(42, &net) == SIMX_OK);
  REQUIRE(net != nullptr);
  simx_net_destroy(net);

  CHECK(simx_net_create(42, nullptr) == SIMX_ERR_INVALID_ARGUMENT);
  CHECK(simx_last_error()[0] != '\0');
  simx_net_destroy(nullptr);  // must be a no-op
}

TEST_CASE("index build, properties, save and load") {
  TempDir tmp("capi_index");
  make_corpus(tmp.path() / "corpus", 4, 8);
  {
    std::ofstream f(tmp.path() / "corpus" / "stray.txt");
    f << "not an image";
  }

  simx_net* net = nullptr;
  REQUIRE(simx_net_create(42, &net) == SIMX_OK);

  simx_index* idx = nullptr;
  uint32_t skipped = 0;
  REQUIRE(simx_index_build(net, (tmp.path() / "corpus").c_str(), &idx,
                           &skipped) == SIMX_OK);
  CHECK(simx_index_size(idx) == 4);
  CHECK(simx_index_seed(idx) == 42);
  CHECK(skipped == 1);
  CHECK(std::string(simx_index_entry_path(idx, 0)) == "0000.png");
  CHECK(simx_index_entry_path(idx, 99) == nullptr);

  std::string path = (tmp.path() / "a.simx").string();
  REQUIRE(simx_index_save(idx, path.c_str()) == SIMX_OK);
  simx_index* back = nullptr;
  REQUIRE(simx_index_load(path.c_str(), &back) == SIMX_OK);
  CHECK(simx_index_size(back) == 4);
  CHECK(simx_index_seed(back) == 42);
  CHECK(std::string(simx_index_entry_path(back, 3)) == "0003.png");

  simx_index_destroy(back);
  simx_index_destroy(idx);
  simx_net_destroy(net);
}

TEST_CASE("index error statuses surface through the C boundary") {
  TempDir tmp("capi_errs");
  simx_net* net = nullptr;
  REQUIRE(simx_net_create(42, &net) == SIMX_OK);

  simx_index* idx = nullptr;
  uint32_t skipped = 0;
  std::filesystem::create_directories(tmp.path() / "empty");
  CHECK(simx_index_build(net, (tmp.path() / "empty").c_str(), &idx, &skipped) ==
        SIMX_ERR_EMPTY_CORPUS);
  CHECK(idx == nullptr);

  simx_index* missing = nullptr;
  CHECK(simx_index_load((tmp.path() / "no.simx").c_str(), &missing) ==
        SIMX_ERR_IO);
  CHECK(std::string(simx_last_error()).size() > 0);

  simx_net_destroy(net);
}

TEST_CASE("session query: exact piece is rank 0, distance ~0, matched") {
  TempDir tmp("capi_query");
  make_corpus(tmp.path() / "corpus", 5, 60);

  simx_net* net = nullptr;
  REQUIRE(simx_net_create(42, &net) == SIMX_OK);
  simx_index* idx = nullptr;
  REQUIRE(simx_index_build(net, (tmp.path() / "corpus").c_str(), &idx,
                           nullptr) == SIMX_OK);
  simx_session* session = nullptr;
  REQUIRE(simx_session_create(net, idx, (tmp.path() / "corpus").c_str(),
                              &session) == SIMX_OK);

  // Write quadrant 1 of image 2 as the query patch.
  RgbImage target =
      resize(load_image(tmp.path() / "corpus" / "0002.png"), 128, 128);
  RgbImage piece = slice(target, SliceMode::quad)[1];
  save_png(piece, tmp.path() / "patch.png");

  simx_match_list* list = nullptr;
  REQUIRE(simx_session_query(session, (tmp.path() / "patch.png").c_str(),
                             SIMX_MODE_QUAD, -1.0, 1, &list) == SIMX_OK);
  REQUIRE(list != nullptr);
  CHECK(simx_match_count(list) == 5);
  CHECK(simx_match_answer_rank(list) == 0);

  uint32_t id = 0, placement = 0;
  double distance = -1.0;
  int matched = 0;
  REQUIRE(simx_match_get(list, 0, &id, &placement, &distance, &matched) ==
          SIMX_OK);
  CHECK(id == 2);
  CHECK(placement == 1);
  CHECK(distance <= 1e-4);
  CHECK(matched == 1);
  CHECK(simx_match_get(list, 99, &id, &placement, &distance, &matched) ==
        SIMX_ERR_INVALID_ARGUMENT);

  // A zero tolerance on a foreign patch gives a clean no-match.
  save_png(synth_image(424242, 64, 64), tmp.path() / "foreign.png");
  simx_match_list* miss = nullptr;
  REQUIRE(simx_session_query(session, (tmp.path() / "foreign.png").c_str(),
                             SIMX_MODE_QUAD, 0.0, 1, &miss) == SIMX_OK);
  CHECK(simx_match_answer_rank(miss) == -1);

  simx_match_list_destroy(miss);
  simx_match_list_destroy(list);
  simx_session_destroy(session);
  simx_index_destroy(idx);
  simx_net_destroy(net);
}

TEST_CASE("calibrate through the C boundary") {
  TempDir tmp("capi_cal");
  make_corpus(tmp.path() / "corpus", 12, 2024);
  simx_calibration cal;
  std::memset(&cal, 0, sizeof cal);
  REQUIRE(simx_calibrate(42, (tmp.path() / "corpus").c_str(), SIMX_MODE_QUAD,
                         0.5, 1, &cal) == SIMX_OK);
  CHECK(cal.recommended_tolerance > 0.0);
  CHECK(cal.sample_count >= 10);
  CHECK(cal.true_mean < cal.impostor_mean);
}

TEST_CASE("bench smoke test through the C boundary") {
  TempDir tmp("capi_bench");
  make_corpus(tmp.path() / "corpus", 6, 31);
  simx_bench_report* report = nullptr;
  std::string out = (tmp.path() / "report.tsv").string();
  REQUIRE(simx_bench_run(42, (tmp.path() / "corpus").c_str(), 4,
                         "cnn-quad,knn-L2", 1, 100.0, 1, out.c_str(),
                         &report) == SIMX_OK);
  REQUIRE(report != nullptr);
  REQUIRE(simx_bench_row_count(report) == 2);

  const char* method = nullptr;
  int correct = 0, total = 0;
  double acc = 0, tol = 0, secs = 0;
  REQUIRE(simx_bench_row_get(report, 0, &method, &correct, &total, &acc, &tol,
                             &secs) == SIMX_OK);
  CHECK(std::string(method) == "cnn-quad");
  CHECK(total == 4);
  CHECK(correct == 4);  // exact pieces always resolve
  CHECK(acc == 100.0);

  CHECK(simx_bench_report_text(report) != nullptr);
  CHECK(std::filesystem::exists(out));
  CHECK(simx_bench_row_get(report, 9, &method, &correct, &total, &acc, &tol,
                           &secs) == SIMX_ERR_INVALID_ARGUMENT);
  simx_bench_report_destroy(report);
}
