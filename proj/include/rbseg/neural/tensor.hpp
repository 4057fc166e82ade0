#ifndef RBSEG_NEURAL_TENSOR_HPP
#define RBSEG_NEURAL_TENSOR_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rbseg::neural {

// (channels, height, width) activation tensor, x fastest. Parameters are
// 32-bit floats (the checkpoint contract); activations and gradients run in
// double so finite-difference checks resolve cleanly.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_),
        data(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}

  std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }
  double* plane(int ci) { return data.data() + ci * plane_size(); }
  const double* plane(int ci) const { return data.data() + ci * plane_size(); }

  double at(int ci, int y, int x) const {
    return data[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }
  double& at(int ci, int y, int x) {
    return data[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }

  bool same_shape(const Tensor& o) const {
    return c == o.c && h == o.h && w == o.w;
  }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

// Per-pixel binary labels for one prediction slice.
struct SliceLabels {
  int h = 0, w = 0;
  std::vector<std::uint8_t> y;

  SliceLabels() = default;
  SliceLabels(int h_, int w_)
      : h(h_), w(w_), y(static_cast<std::size_t>(h_) * w_, 0) {}
};

}  // namespace rbseg::neural

#endif  // RBSEG_NEURAL_TENSOR_HPP
