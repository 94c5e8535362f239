#include "match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "error.hpp"

namespace simx {

namespace fs = std::filesystem;

double frobenius_distance(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b))
    throw Error(Status::invalid_argument,
                "frobenius_distance: shape mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

std::vector<double> placement_distances(const Network& net,
                                        const ForwardTrace& trace,
                                        const Tensor3& stored,
                                        const Tensor3& patch_tensor,
                                        SliceMode mode, EncodeWorkspace& ws) {
  const int side = grid_side(mode);
  const int edge = piece_edge(mode);
  std::vector<double> out(static_cast<size_t>(side) * side);
  for (int i = 0; i < side * side; ++i) {
    int py = (i / side) * edge;
    int px = (i % side) * edge;
    Tensor3 enc =
        encode_composite(net.weights, net.spec, trace, patch_tensor, py, px, ws);
    out[i] = frobenius_distance(stored, enc);
  }
  return out;
}

}  // namespace

std::vector<double> candidate_distances(const RgbImage& candidate,
                                        const Tensor3& stored_encoding,
                                        const RgbImage& patch,
                                        const Network& net,
                                        const MatchConfig& config) {
  if (candidate.width != 128 || candidate.height != 128)
    throw Error(Status::geometry, "candidate must be 128x128");
  const int edge = piece_edge(config.mode);
  if (patch.width != edge || patch.height != edge)
    throw Error(Status::geometry, "patch must match the mode's piece size");
  ForwardTrace trace =
      forward_trace(net.weights, net.spec, to_tensor(candidate));
  EncodeWorkspace ws;
  return placement_distances(net, trace, stored_encoding, to_tensor(patch),
                             config.mode, ws);
}

struct QuerySession::Impl {
  const Network& net;
  const EncodingIndex& index;
  fs::path image_root;
  // Lazily filled per-candidate activation traces, indexed by image_id.
  std::vector<std::unique_ptr<ForwardTrace>> traces;

  Impl(const Network& n, const EncodingIndex& idx, fs::path root)
      : net(n), index(idx), image_root(std::move(root)) {
    traces.resize(index.entries.size());
  }

  const ForwardTrace& trace_for(uint32_t id) {
    if (id >= traces.size())
      throw Error(Status::lookup, "image id out of range");
    if (!traces[id]) {
      const IndexEntry& e = index.entries[id];
      fs::path p = image_root / e.source_path;
      RgbImage img;
      try {
        img = load_image(p);
      } catch (const Error& err) {
        throw Error(Status::lookup, "cannot resolve index entry " +
                                        std::to_string(id) + " (" +
                                        e.source_path + "): " + err.what());
      }
      traces[id] = std::make_unique<ForwardTrace>(forward_trace(
          net.weights, net.spec, to_tensor(resize(img, 128, 128))));
    }
    return *traces[id];
  }
};

QuerySession::QuerySession(const Network& net, const EncodingIndex& index,
                           fs::path image_root)
    : impl_(std::make_unique<Impl>(net, index, std::move(image_root))) {}

QuerySession::~QuerySession() = default;

QueryOutcome QuerySession::run(const RgbImage& patch,
                               const MatchConfig& config) {
  const int edge = piece_edge(config.mode);
  const int side = grid_side(config.mode);
  const Tensor3 patch_tensor = to_tensor(resize(patch, edge, edge));
  const int n = static_cast<int>(impl_->index.entries.size());
  std::vector<MatchResult> results(n);
  for (int i = 0; i < n; ++i) {
    results[i].image_id = impl_->index.entries[i].image_id;
    results[i].best_distance = std::numeric_limits<double>::infinity();
  }

  // Traces load serially so I/O errors surface deterministically.
  for (int i = 0; i < n; ++i) impl_->trace_for(static_cast<uint32_t>(i));

  const int threads = resolve_threads(config.threads);
  std::vector<EncodeWorkspace> workspaces(std::max(1, threads));
  EncodeWorkspace donor_ws;

  // Placement-major: the first candidate's workspace is kept as a donor so
  // the remaining candidates can reuse the cells that depend only on the
  // patch (receptive field inside the patch or zero padding).
  for (int p = 0; p < side * side && n > 0; ++p) {
    const int py = (p / side) * edge;
    const int px = (p % side) * edge;
    const CompositeShare share =
        composite_share(impl_->net.spec, 128, 128, edge, edge, py, px);

    auto record = [&](int i, const Tensor3& enc) {
      double d = frobenius_distance(impl_->index.entries[i].encoding, enc);
      if (d < results[i].best_distance) {
        results[i].best_distance = d;
        results[i].best_placement = p;
      }
    };

    record(0, encode_composite(impl_->net.weights, impl_->net.spec,
                               impl_->trace_for(0), patch_tensor, py, px,
                               donor_ws));
#ifdef _OPENMP
#pragma omp parallel for num_threads(threads) schedule(dynamic)
#endif
    for (int i = 1; i < n; ++i) {
#ifdef _OPENMP
      EncodeWorkspace& ws = workspaces[omp_get_thread_num()];
#else
      EncodeWorkspace& ws = workspaces[0];
#endif
      record(i, encode_composite(impl_->net.weights, impl_->net.spec,
                                 impl_->trace_for(static_cast<uint32_t>(i)),
                                 patch_tensor, py, px, ws, &donor_ws, &share));
    }
  }
  for (int i = 0; i < n; ++i)
    results[i].matched = results[i].best_distance <= config.tolerance;
  (void)threads;

  QueryOutcome out;
  out.ranked = std::move(results);
  std::sort(out.ranked.begin(), out.ranked.end(),
            [](const MatchResult& a, const MatchResult& b) {
              if (a.best_distance != b.best_distance)
                return a.best_distance < b.best_distance;
              return a.image_id < b.image_id;
            });
  for (const MatchResult& r : out.ranked)
    if (r.matched) {
      out.answer = r;
      break;
    }
  return out;
}

std::vector<double> QuerySession::distances_for(uint32_t image_id,
                                                const RgbImage& patch,
                                                const MatchConfig& config) {
  if (image_id >= impl_->index.entries.size())
    throw Error(Status::lookup, "image id out of range");
  const int edge = piece_edge(config.mode);
  const Tensor3 patch_tensor = to_tensor(resize(patch, edge, edge));
  EncodeWorkspace ws;
  return placement_distances(impl_->net, impl_->trace_for(image_id),
                             impl_->index.entries[image_id].encoding,
                             patch_tensor, config.mode, ws);
}

QueryOutcome query(const EncodingIndex& index, const fs::path& image_root,
                   const RgbImage& patch, const Network& net,
                   const MatchConfig& config) {
  QuerySession session(net, index, image_root);
  return session.run(patch, config);
}

}  // namespace simx
