#include "rbseg/neural/loss.hpp"

#include <cmath>

#include "rbseg/errors.hpp"

namespace rbseg::neural {

namespace {
constexpr double kEps = 1e-7;
}

void LossConfig::validate() const {
  if (!(alpha >= 1.0)) throw ConfigError("loss alpha must be >= 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("loss beta must be in (0, 1]");
}

LossResult lopsided_loss(const Tensor& probs, const SliceLabels& labels,
                         const LossConfig& cfg) {
  cfg.validate();
  if (probs.c != 2) throw NumericError("loss expects 2-class probabilities");
  if (probs.h != labels.h || probs.w != labels.w)
    throw NumericError("loss shape mismatch between probabilities and labels");

  const std::size_t n = probs.plane_size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double* p0 = probs.plane(0);
  const double* p1 = probs.plane(1);

  LossResult res;
  res.dlogits = Tensor(2, probs.h, probs.w);
  double* g0 = res.dlogits.plane(0);
  double* g1 = res.dlogits.plane(1);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.y[i]) {
      total += cfg.alpha * -std::log(std::max(p1[i], kEps));
      g0[i] = cfg.alpha * p0[i] * inv_n;
      g1[i] = cfg.alpha * (p1[i] - 1.0) * inv_n;
    } else {
      const int m = p1[i] > p0[i] ? 1 : 0;  // tie -> class 0
      const double pm = m ? p1[i] : p0[i];
      total += cfg.beta * -std::log(std::max(p0[i], kEps)) +
               (1.0 - cfg.beta) * -std::log(std::max(pm, kEps));
      // d/dz of beta*CE(0) + (1-beta)*CE(m) with argmax held constant.
      g0[i] = (cfg.beta * (p0[i] - 1.0) +
               (1.0 - cfg.beta) * (p0[i] - (m == 0 ? 1.0 : 0.0))) * inv_n;
      g1[i] = (cfg.beta * p1[i] +
               (1.0 - cfg.beta) * (p1[i] - (m == 1 ? 1.0 : 0.0))) * inv_n;
    }
  }
  res.loss = total * inv_n;
  return res;
}

}  // namespace rbseg::neural
