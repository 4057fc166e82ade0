#ifndef RBSEG_NEURAL_MODEL_HPP
#define RBSEG_NEURAL_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rbseg/neural/loss.hpp"
#include "rbseg/neural/tensor.hpp"
#include "rbseg/volume.hpp"

namespace rbseg::neural {

enum class Arch { EncoderDecoder, WideResSeg };

const char* arch_name(Arch a);
Arch arch_from_name(const std::string& name);

struct ModelSpec {
  Arch arch = Arch::EncoderDecoder;
  double width_factor = 1.0;  // k; channel widths scale with it
  // EncoderDecoder: number of resolution levels (levels - 1 downsamples).
  int levels = 3;
  // WideResSeg: residual blocks per width group (two groups: 16k, 32k).
  int blocks_per_group = 2;
  int in_channels = 20;
  std::uint64_t init_seed = 0;

  bool operator==(const ModelSpec&) const = default;
  void validate() const;
};

struct NetworkModel {
  ModelSpec spec;
  std::vector<float> params;
};

std::size_t parameter_count(const ModelSpec& spec);

// Input H and W must be divisible by this (2^downsamples).
int downsample_factor(const ModelSpec& spec);

// He-normal weights, zero biases, deterministic from spec.init_seed.
NetworkModel init_model(const ModelSpec& spec);

// Per-pixel class probabilities (2, H, W); softmax over the channel pair.
Tensor forward(const NetworkModel& model, const Tensor& input);

// Full parameter gradient of the mean lopsided loss for one input slice.
// Throws NumericError("numerical instability ...") naming the offending
// layer if any gradient entry is non-finite.
std::vector<double> backward(const NetworkModel& model, const Tensor& input,
                             const SliceLabels& labels, const LossConfig& cfg,
                             double* loss_out = nullptr);

// Foreground-probability volume (1 channel) for a full image, slice by
// slice with a 2.5D input stack of z_slices neighbors.
Volume predict_volume_probs(const NetworkModel& model, const Volume& image,
                            int z_slices = 5);

}  // namespace rbseg::neural

#endif  // RBSEG_NEURAL_MODEL_HPP
