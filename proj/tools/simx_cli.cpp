// Command-line front end; talks to the core exclusively through the C API.
//
// Exit codes: 0 success (query: match found), 2 clean no-match, 1 error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "simx.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoMatch = 2;

int fail(simx_status status) {
  std::fprintf(stderr, "error (%s): %s\n", simx_status_name(status),
               simx_last_error());
  return kExitError;
}

simx_mode parse_mode(const std::string& mode) {
  return mode == "grid16" ? SIMX_MODE_GRID16 : SIMX_MODE_QUAD;
}

int cmd_index(const std::string& corpus, const std::string& out_path,
              uint64_t seed) {
  simx_net* net = nullptr;
  if (simx_status s = simx_net_create(seed, &net)) return fail(s);
  simx_index* index = nullptr;
  uint32_t skipped = 0;
  simx_status s = simx_index_build(net, corpus.c_str(), &index, &skipped);
  if (s == SIMX_OK) s = simx_index_save(index, out_path.c_str());
  if (s == SIMX_OK)
    std::printf("indexed %u images (%u files skipped) -> %s\n",
                simx_index_size(index), skipped, out_path.c_str());
  simx_index_destroy(index);
  simx_net_destroy(net);
  return s == SIMX_OK ? kExitOk : fail(s);
}

int cmd_query(const std::string& index_path, const std::string& image_root,
              const std::string& patch, const std::string& mode,
              double tolerance, int threads, int top) {
  simx_index* index = nullptr;
  if (simx_status s = simx_index_load(index_path.c_str(), &index))
    return fail(s);
  simx_net* net = nullptr;
  simx_session* session = nullptr;
  simx_match_list* matches = nullptr;
  simx_status s = simx_net_create(simx_index_seed(index), &net);
  if (s == SIMX_OK)
    s = simx_session_create(net, index, image_root.c_str(), &session);
  if (s == SIMX_OK)
    s = simx_session_query(session, patch.c_str(), parse_mode(mode), tolerance,
                           threads, &matches);

  int exit_code = kExitError;
  if (s == SIMX_OK) {
    uint32_t count = simx_match_count(matches);
    uint32_t shown = count < static_cast<uint32_t>(top) ? count : top;
    for (uint32_t rank = 0; rank < shown; ++rank) {
      uint32_t id = 0, placement = 0;
      double distance = 0;
      int matched = 0;
      simx_match_get(matches, rank, &id, &placement, &distance, &matched);
      std::printf("%u\t%u\t%s\t%u\t%.6f\t%s\n", rank, id,
                  simx_index_entry_path(index, id), placement, distance,
                  matched ? "true" : "false");
    }
    int32_t answer = simx_match_answer_rank(matches);
    if (answer >= 0) {
      uint32_t id = 0;
      simx_match_get(matches, static_cast<uint32_t>(answer), &id, nullptr,
                     nullptr, nullptr);
      std::printf("match\t%u\t%s\n", id, simx_index_entry_path(index, id));
      exit_code = kExitOk;
    } else {
      std::printf("no-match\n");
      exit_code = kExitNoMatch;
    }
  } else {
    fail(s);
  }

  simx_match_list_destroy(matches);
  simx_session_destroy(session);
  simx_net_destroy(net);
  simx_index_destroy(index);
  return exit_code;
}

int cmd_bench(const std::string& corpus, int queries,
              const std::string& methods, const std::string& crop_policy,
              double tolerance, uint64_t seed, int threads,
              const std::string& out_path) {
  simx_bench_report* report = nullptr;
  simx_status s = simx_bench_run(
      seed, corpus.c_str(), queries, methods.c_str(),
      crop_policy == "exact" ? 1 : 0, tolerance, threads,
      out_path.empty() ? nullptr : out_path.c_str(), &report);
  if (s != SIMX_OK) return fail(s);
  std::fputs(simx_bench_report_text(report), stdout);
  if (!out_path.empty()) std::printf("report written to %s\n", out_path.c_str());
  simx_bench_report_destroy(report);
  return kExitOk;
}

int cmd_calibrate(const std::string& corpus, const std::string& mode,
                  double holdout, uint64_t seed, int threads) {
  simx_calibration cal{};
  simx_status s = simx_calibrate(seed, corpus.c_str(), parse_mode(mode),
                                 holdout, threads, &cal);
  if (s != SIMX_OK) return fail(s);
  std::printf("mode\t%s\n", mode.c_str());
  std::printf("samples\t%d\n", cal.sample_count);
  std::printf("true_mean\t%.6f\ntrue_p95\t%.6f\ntrue_max\t%.6f\n",
              cal.true_mean, cal.true_p95, cal.true_max);
  std::printf("impostor_min\t%.6f\nimpostor_p5\t%.6f\nimpostor_mean\t%.6f\n",
              cal.impostor_min, cal.impostor_p5, cal.impostor_mean);
  std::printf("recommended_tolerance\t%.6f\n", cal.recommended_tolerance);
  if (cal.overlap)
    std::fprintf(stderr,
                 "warning: true and impostor distance distributions overlap "
                 "beyond the 95th/5th percentiles; the recommendation will "
                 "misclassify some composites\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-image source retrieval over a random-weight CNN index"};
  app.require_subcommand(1);

  std::string corpus, index_path, image_root, patch, out_path;
  std::string mode = "quad", methods, crop_policy = "random";
  uint64_t seed = 42;
  double tolerance = -1.0, holdout = 0.25;
  int queries = 50, threads = 0, top = 5;

  auto* index_cmd = app.add_subcommand("index", "encode a corpus directory");
  index_cmd->add_option("--corpus", corpus, "image directory")->required();
  index_cmd->add_option("--out", out_path, "index file to write")->required();
  index_cmd->add_option("--seed", seed, "network seed");

  auto* query_cmd =
      app.add_subcommand("query", "find which indexed image a patch is from");
  query_cmd->add_option("--index", index_path, "index file")->required();
  query_cmd->add_option("--corpus", image_root, "corpus root the index paths resolve under")
      ->required();
  query_cmd->add_option("--patch", patch, "query patch image")->required();
  query_cmd->add_option("--mode", mode, "quad|grid16")
      ->check(CLI::IsMember({"quad", "grid16"}));
  query_cmd->add_option("--tolerance", tolerance,
                        "inclusive match tolerance (default 100/200 by mode)");
  query_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  query_cmd->add_option("--top", top, "ranked candidates to print");

  auto* bench_cmd = app.add_subcommand("bench", "scaled accuracy benchmark");
  bench_cmd->add_option("--corpus", corpus, "image directory")->required();
  bench_cmd->add_option("--queries", queries, "number of generated queries");
  bench_cmd->add_option("--mode", mode, "quad|grid16 (selects the cnn method)")
      ->check(CLI::IsMember({"quad", "grid16"}));
  bench_cmd->add_option("--methods", methods,
                        "comma-separated: cnn-quad,cnn-grid16,kmeans,knn-L1,"
                        "knn-L2 (overrides --mode)");
  bench_cmd->add_option("--crop-policy", crop_policy, "exact|random")
      ->check(CLI::IsMember({"exact", "random"}));
  bench_cmd->add_option("--tolerance", tolerance,
                        "fixed tolerance (default: calibrate)");
  bench_cmd->add_option("--seed", seed, "network + query seed");
  bench_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  bench_cmd->add_option("--out", out_path, "machine-readable report file");

  auto* cal_cmd =
      app.add_subcommand("calibrate", "recommend a tolerance for a corpus");
  cal_cmd->add_option("--corpus", corpus, "image directory")->required();
  cal_cmd->add_option("--mode", mode, "quad|grid16")
      ->check(CLI::IsMember({"quad", "grid16"}));
  cal_cmd->add_option("--holdout", holdout, "fraction of corpus to sample");
  cal_cmd->add_option("--seed", seed, "network seed");
  cal_cmd->add_option("--threads", threads, "worker threads (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  if (index_cmd->parsed()) return cmd_index(corpus, out_path, seed);
  if (query_cmd->parsed())
    return cmd_query(index_path, image_root, patch, mode, tolerance, threads,
                     top);
  if (bench_cmd->parsed()) {
    if (methods.empty()) methods = mode == "grid16" ? "cnn-grid16" : "cnn-quad";
    return cmd_bench(corpus, queries, methods, crop_policy, tolerance, seed,
                     threads, out_path);
  }
  if (cal_cmd->parsed())
    return cmd_calibrate(corpus, mode, holdout, seed, threads);
  return kExitError;
}
