#include "simx.h"

#include <cstring>
#include <string>

#include "bench.hpp"
#include "error.hpp"
#include "image.hpp"
#include "index.hpp"
#include "match.hpp"

namespace {

thread_local std::string g_last_error;

simx_status to_c_status(simx::Status s) {
  using simx::Status;
  switch (s) {
    case Status::ok: return SIMX_OK;
    case Status::invalid_argument: return SIMX_ERR_INVALID_ARGUMENT;
    case Status::io: return SIMX_ERR_IO;
    case Status::decode: return SIMX_ERR_DECODE;
    case Status::format: return SIMX_ERR_FORMAT;
    case Status::corrupt: return SIMX_ERR_CORRUPT;
    case Status::version_mismatch: return SIMX_ERR_VERSION;
    case Status::empty_corpus: return SIMX_ERR_EMPTY_CORPUS;
    case Status::geometry: return SIMX_ERR_GEOMETRY;
    case Status::lookup: return SIMX_ERR_LOOKUP;
    case Status::internal: return SIMX_ERR_INTERNAL;
  }
  return SIMX_ERR_INTERNAL;
}

template <typename Fn>
simx_status guarded(Fn&& fn) {
  try {
    fn();
    return SIMX_OK;
  } catch (const simx::Error& e) {
    g_last_error = e.what();
    return to_c_status(e.status());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SIMX_ERR_INTERNAL;
  }
}

simx_status require(bool ok, const char* message) {
  if (!ok) {
    g_last_error = message;
    return SIMX_ERR_INVALID_ARGUMENT;
  }
  return SIMX_OK;
}

simx::SliceMode to_mode(simx_mode m) {
  return m == SIMX_MODE_QUAD ? simx::SliceMode::quad
                             : simx::SliceMode::grid16;
}

}  // namespace

extern "C" {

struct simx_net {
  simx::Network net;
};

struct simx_index {
  simx::EncodingIndex index;
};

struct simx_session {
  simx::QuerySession session;
};

struct simx_match_list {
  std::vector<simx::MatchResult> ranked;
  int32_t answer_rank = -1;
};

struct simx_bench_report {
  simx::BenchReport report;
  std::string text;
};

const char* simx_status_name(simx_status status) {
  switch (status) {
    case SIMX_OK: return "ok";
    case SIMX_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SIMX_ERR_IO: return "io";
    case SIMX_ERR_DECODE: return "decode";
    case SIMX_ERR_FORMAT: return "format";
    case SIMX_ERR_CORRUPT: return "corrupt";
    case SIMX_ERR_VERSION: return "version-mismatch";
    case SIMX_ERR_EMPTY_CORPUS: return "empty-corpus";
    case SIMX_ERR_GEOMETRY: return "geometry";
    case SIMX_ERR_LOOKUP: return "lookup";
    case SIMX_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* simx_last_error(void) { return g_last_error.c_str(); }

simx_status simx_net_create(uint64_t seed, simx_net** out) {
  if (auto s = require(out != nullptr, "out must not be null")) return s;
  return guarded([&] { *out = new simx_net{simx::Network(seed)}; });
}

void simx_net_destroy(simx_net* net) { delete net; }

simx_status simx_index_build(const simx_net* net, const char* corpus_dir,
                             simx_index** out, uint32_t* skipped_files) {
  if (auto s = require(net && corpus_dir && out, "null argument")) return s;
  return guarded([&] {
    simx::BuildResult r = simx::build_index(corpus_dir, net->net);
    if (skipped_files) *skipped_files = r.skipped;
    *out = new simx_index{std::move(r.index)};
  });
}

simx_status simx_index_save(const simx_index* index, const char* path) {
  if (auto s = require(index && path, "null argument")) return s;
  return guarded([&] { simx::save_index(index->index, path); });
}

simx_status simx_index_load(const char* path, simx_index** out) {
  if (auto s = require(path && out, "null argument")) return s;
  return guarded([&] { *out = new simx_index{simx::load_index(path)}; });
}

void simx_index_destroy(simx_index* index) { delete index; }

uint32_t simx_index_size(const simx_index* index) {
  return index ? static_cast<uint32_t>(index->index.entries.size()) : 0;
}

uint64_t simx_index_seed(const simx_index* index) {
  return index ? index->index.network_seed : 0;
}

const char* simx_index_entry_path(const simx_index* index, uint32_t image_id) {
  if (!index || image_id >= index->index.entries.size()) return nullptr;
  return index->index.entries[image_id].source_path.c_str();
}

simx_status simx_session_create(const simx_net* net, const simx_index* index,
                                const char* image_root, simx_session** out) {
  if (auto s = require(net && index && image_root && out, "null argument"))
    return s;
  return guarded([&] {
    *out = new simx_session{
        simx::QuerySession(net->net, index->index, image_root)};
  });
}

void simx_session_destroy(simx_session* session) { delete session; }

simx_status simx_session_query(simx_session* session, const char* patch_path,
                               simx_mode mode, double tolerance, int threads,
                               simx_match_list** out) {
  if (auto s = require(session && patch_path && out, "null argument"))
    return s;
  return guarded([&] {
    simx::MatchConfig config = mode == SIMX_MODE_QUAD
                                   ? simx::MatchConfig::quad_defaults()
                                   : simx::MatchConfig::grid16_defaults();
    if (tolerance >= 0) config.tolerance = tolerance;
    config.threads = threads;
    simx::RgbImage patch = simx::load_image(patch_path);
    simx::QueryOutcome outcome = session->session.run(patch, config);

    auto* list = new simx_match_list;
    list->ranked = std::move(outcome.ranked);
    if (outcome.answer)
      for (size_t i = 0; i < list->ranked.size(); ++i)
        if (list->ranked[i].image_id == outcome.answer->image_id) {
          list->answer_rank = static_cast<int32_t>(i);
          break;
        }
    *out = list;
  });
}

void simx_match_list_destroy(simx_match_list* list) { delete list; }

uint32_t simx_match_count(const simx_match_list* list) {
  return list ? static_cast<uint32_t>(list->ranked.size()) : 0;
}

simx_status simx_match_get(const simx_match_list* list, uint32_t rank,
                           uint32_t* image_id, uint32_t* placement,
                           double* distance, int* matched) {
  if (auto s = require(list && rank < list->ranked.size(),
                       "match rank out of range"))
    return s;
  const simx::MatchResult& r = list->ranked[rank];
  if (image_id) *image_id = r.image_id;
  if (placement) *placement = static_cast<uint32_t>(r.best_placement);
  if (distance) *distance = r.best_distance;
  if (matched) *matched = r.matched ? 1 : 0;
  return SIMX_OK;
}

int32_t simx_match_answer_rank(const simx_match_list* list) {
  return list ? list->answer_rank : -1;
}

simx_status simx_calibrate(uint64_t seed, const char* corpus_dir,
                           simx_mode mode, double holdout_fraction,
                           int threads, simx_calibration* out) {
  if (auto s = require(corpus_dir && out, "null argument")) return s;
  return guarded([&] {
    simx::CalibrationResult r =
        simx::calibrate(corpus_dir, to_mode(mode), holdout_fraction, seed,
                        threads);
    out->recommended_tolerance = r.recommended_tau;
    out->true_p95 = r.true_dist.p95;
    out->true_mean = r.true_dist.mean;
    out->true_max = r.true_dist.max;
    out->impostor_p5 = r.impostor_dist.p5;
    out->impostor_mean = r.impostor_dist.mean;
    out->impostor_min = r.impostor_dist.min;
    out->sample_count = r.true_dist.n;
    out->overlap = r.overlap ? 1 : 0;
  });
}

simx_status simx_bench_run(uint64_t seed, const char* corpus_dir,
                           int query_count, const char* methods,
                           int exact_piece, double tolerance, int threads,
                           const char* report_path, simx_bench_report** out) {
  if (auto s = require(corpus_dir && methods && out, "null argument"))
    return s;
  return guarded([&] {
    std::vector<std::string> method_list;
    const char* p = methods;
    while (*p) {
      const char* comma = std::strchr(p, ',');
      size_t len = comma ? static_cast<size_t>(comma - p) : std::strlen(p);
      if (len) method_list.emplace_back(p, len);
      p += len + (comma ? 1 : 0);
    }
    if (method_list.empty())
      throw simx::Error(simx::Status::invalid_argument, "no methods given");

    simx::BenchReport report = simx::run_bench(
        corpus_dir, query_count, method_list,
        exact_piece ? simx::CropPolicy::exact_piece
                    : simx::CropPolicy::random_crop,
        seed, tolerance, threads);
    if (report_path) simx::write_report(report, report_path);
    auto* result = new simx_bench_report;
    result->text = simx::format_report_text(report);
    result->report = std::move(report);
    *out = result;
  });
}

void simx_bench_report_destroy(simx_bench_report* report) { delete report; }

uint32_t simx_bench_row_count(const simx_bench_report* report) {
  return report ? static_cast<uint32_t>(report->report.rows.size()) : 0;
}

simx_status simx_bench_row_get(const simx_bench_report* report, uint32_t row,
                               const char** method, int* correct, int* total,
                               double* accuracy_percent, double* tolerance,
                               double* wall_seconds) {
  if (auto s = require(report && row < report->report.rows.size(),
                       "bench row out of range"))
    return s;
  const simx::BenchRow& r = report->report.rows[row];
  if (method) *method = r.method.c_str();
  if (correct) *correct = r.correct;
  if (total) *total = r.total;
  if (accuracy_percent) *accuracy_percent = r.accuracy_percent;
  if (tolerance) *tolerance = r.tolerance;
  if (wall_seconds) *wall_seconds = r.wall_seconds;
  return SIMX_OK;
}

const char* simx_bench_report_text(const simx_bench_report* report) {
  return report ? report->text.c_str() : "";
}

}  // extern "C"
