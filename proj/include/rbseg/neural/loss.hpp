#ifndef RBSEG_NEURAL_LOSS_HPP
#define RBSEG_NEURAL_LOSS_HPP

#include "rbseg/neural/tensor.hpp"

namespace rbseg::neural {

// Lopsided bootstrap loss weights. alpha scales the positive-label cross
// entropy; beta blends the negative branch between label cross entropy and
// self-prediction (argmax) cross entropy. beta = 1 is plain cross entropy on
// negatives; alpha = 1, beta = 1 is plain cross entropy everywhere.
struct LossConfig {
  double alpha = 4.0;
  double beta = 0.8;
  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  Tensor dlogits;  // gradient of the mean per-pixel loss w.r.t. pre-softmax
};

// probs: (2, H, W) per-pixel class probabilities. Per pixel:
//   y = 1: alpha * (-ln p1)
//   y = 0: beta * (-ln p0) + (1 - beta) * (-ln p_argmax)
// mean-reduced over pixels. The argmax choice is treated as a constant (no
// gradient flows through it) and ties resolve to class 0. Probabilities are
// clamped at 1e-7 before the log.
LossResult lopsided_loss(const Tensor& probs, const SliceLabels& labels,
                         const LossConfig& cfg);

}  // namespace rbseg::neural

#endif  // RBSEG_NEURAL_LOSS_HPP
