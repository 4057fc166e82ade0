#ifndef RBSEG_NEURAL_OPTIMIZER_HPP
#define RBSEG_NEURAL_OPTIMIZER_HPP

#include <cstdint>
#include <vector>

#include "rbseg/optimizer_kind.hpp"

namespace rbseg::neural {

// Standard first-order updates: Momentum 0.9; RMSProp decay 0.99; Adam
// beta1 0.9, beta2 0.999, eps 1e-8. L2 regularization enters as
// l2_lambda * w added to the raw gradient.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 3e-3;
  double l2_lambda = 0.0;
  long long step_count = 0;
  std::vector<double> m;  // momentum / first moment
  std::vector<double> v;  // squared-gradient accumulator / second moment

  static OptimizerState create(OptimizerKind kind, double learning_rate,
                               double l2_lambda, std::size_t param_count);
};

void optimizer_step(OptimizerState& state, std::vector<float>& params,
                    const std::vector<double>& grads);

}  // namespace rbseg::neural

#endif  // RBSEG_NEURAL_OPTIMIZER_HPP
