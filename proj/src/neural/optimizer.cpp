#include "rbseg/neural/optimizer.hpp"

#include <cmath>

#include "rbseg/errors.hpp"

namespace rbseg::neural {

namespace {
constexpr double kMomentum = 0.9;
constexpr double kRmsDecay = 0.99;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kEps = 1e-8;
}  // namespace

OptimizerState OptimizerState::create(OptimizerKind kind, double learning_rate,
                                      double l2_lambda, std::size_t param_count) {
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (l2_lambda < 0.0) throw ConfigError("l2_lambda must be >= 0");
  OptimizerState s;
  s.kind = kind;
  s.learning_rate = learning_rate;
  s.l2_lambda = l2_lambda;
  if (kind == OptimizerKind::Momentum || kind == OptimizerKind::Adam)
    s.m.assign(param_count, 0.0);
  if (kind == OptimizerKind::RMSProp || kind == OptimizerKind::Adam)
    s.v.assign(param_count, 0.0);
  return s;
}

void optimizer_step(OptimizerState& state, std::vector<float>& params,
                    const std::vector<double>& grads) {
  if (params.size() != grads.size())
    throw NumericError("optimizer gradient/parameter size mismatch");
  const std::size_t n = params.size();
  const double lr = state.learning_rate;
  ++state.step_count;
  switch (state.kind) {
    case OptimizerKind::Momentum: {
      if (state.m.size() != n) throw NumericError("optimizer accumulator size mismatch");
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i] + state.l2_lambda * params[i];
        state.m[i] = kMomentum * state.m[i] + g;
        params[i] = static_cast<float>(params[i] - lr * state.m[i]);
      }
      break;
    }
    case OptimizerKind::RMSProp: {
      if (state.v.size() != n) throw NumericError("optimizer accumulator size mismatch");
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i] + state.l2_lambda * params[i];
        state.v[i] = kRmsDecay * state.v[i] + (1.0 - kRmsDecay) * g * g;
        params[i] = static_cast<float>(
            params[i] - lr * g / (std::sqrt(state.v[i]) + kEps));
      }
      break;
    }
    case OptimizerKind::Adam: {
      if (state.m.size() != n || state.v.size() != n)
        throw NumericError("optimizer accumulator size mismatch");
      const double t = static_cast<double>(state.step_count);
      const double c1 = 1.0 - std::pow(kAdamBeta1, t);
      const double c2 = 1.0 - std::pow(kAdamBeta2, t);
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i] + state.l2_lambda * params[i];
        state.m[i] = kAdamBeta1 * state.m[i] + (1.0 - kAdamBeta1) * g;
        state.v[i] = kAdamBeta2 * state.v[i] + (1.0 - kAdamBeta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] = static_cast<float>(
            params[i] - lr * m_hat / (std::sqrt(v_hat) + kEps));
      }
      break;
    }
  }
}

}  // namespace rbseg::neural
