#include "nn.hpp"

#include "rng.hpp"

// Weight generation must produce identical bit patterns regardless of the
// optimization flags used for the rest of the library, so this translation
// unit is compiled with floating-point contraction disabled (see CMake).
namespace simx {

WeightSet init_weights(const NetworkSpec& spec) {
  WeightSet w;
  // One sub-seed per layer, drawn in layer order from a root stream, so each
  // layer has its own independent deterministic stream.
  SplitMix64 root(spec.seed);
  for (int s = 0; s < 3; ++s) {
    const ConvStageSpec& cs = spec.conv[s];
    GaussianStream g(root.next());
    ConvKernel& k = w.conv[s];
    k.kernel_size = cs.kernel_size;
    k.in_channels = cs.in_channels;
    k.out_channels = cs.out_channels;
    k.weights.resize(static_cast<size_t>(cs.kernel_size) * cs.kernel_size *
                     cs.in_channels * cs.out_channels);
    for (float& v : k.weights) v = g.next_scaled(cs.weight_mean, cs.weight_std);
    k.bias.assign(cs.out_channels, 0.0f);
  }
  GaussianStream g(root.next());
  w.output_weights.resize(static_cast<size_t>(spec.conv[2].out_channels) *
                          spec.output_channels);
  for (float& v : w.output_weights)
    v = g.next_scaled(spec.output_weight_mean, spec.output_weight_std);
  w.output_bias.assign(spec.output_channels, 0.0f);
  return w;
}

}  // namespace simx
