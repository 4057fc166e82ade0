#include "rbseg/neural/train.hpp"

#include <cmath>

#include "rbseg/neural/input_stack.hpp"
#include "rbseg/neural/optimizer.hpp"
#include "rbseg/rng.hpp"

namespace rbseg::neural {

namespace {

struct SliceRef {
  int view = 0;
  int z = 0;
};

SliceLabels labels_for_slice(const MaskVolume& mask, int z) {
  SliceLabels out(mask.dims.y, mask.dims.x);
  for (int y = 0; y < mask.dims.y; ++y)
    for (int x = 0; x < mask.dims.x; ++x)
      out.y[static_cast<std::size_t>(y) * mask.dims.x + x] = mask.at(x, y, z);
  return out;
}

}  // namespace

void TrainSchedule::validate() const {
  if (steps < 0) throw ConfigError("step count must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (lesion_slice_prob < 0.0 || lesion_slice_prob > 1.0)
    throw ConfigError("lesion_slice_prob must be in [0, 1]");
  if (z_slices < 1 || z_slices % 2 == 0)
    throw ConfigError("z_slices must be a positive odd number");
}

TrainResult train(NetworkModel model, const std::vector<TrainView>& views,
                  const censor::HyperparameterPoint& hp, const LossConfig& cfg,
                  const TrainSchedule& sched) {
  sched.validate();
  cfg.validate();
  if (views.empty()) throw ConfigError("training view is empty");

  std::vector<SliceRef> all_slices;
  std::vector<SliceRef> lesion_slices;
  for (int vi = 0; vi < static_cast<int>(views.size()); ++vi) {
    const TrainView& view = views[vi];
    if (!view.patient) throw ConfigError("training view has null patient");
    if (!(view.censored_truth.dims == view.patient->image.dims))
      throw ConfigError("censored mask dims do not match image");
    const MaskVolume& mask = view.censored_truth;
    for (int z = 0; z < mask.dims.z; ++z) {
      all_slices.push_back({vi, z});
      bool any = false;
      for (int y = 0; y < mask.dims.y && !any; ++y)
        for (int x = 0; x < mask.dims.x; ++x)
          if (mask.at(x, y, z)) {
            any = true;
            break;
          }
      if (any) lesion_slices.push_back({vi, z});
    }
  }

  TrainResult result;
  result.loss_trace.reserve(sched.steps);

  OptimizerState opt = OptimizerState::create(
      hp.optimizer, hp.learning_rate, hp.l2_lambda, model.params.size());
  Rng rng(sched.sampling_seed);

  std::vector<double> batch_grad(model.params.size());
  for (int step = 0; step < sched.steps; ++step) {
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    double batch_loss = 0.0;
    for (int b = 0; b < sched.batch_size; ++b) {
      const bool from_lesions =
          !lesion_slices.empty() && rng.bernoulli(sched.lesion_slice_prob);
      const auto& pool = from_lesions ? lesion_slices : all_slices;
      const SliceRef ref = pool[rng.uniform_index(pool.size())];
      const TrainView& view = views[ref.view];
      const Tensor input =
          make_input_stack(view.patient->image, ref.z, sched.z_slices);
      const SliceLabels labels = labels_for_slice(view.censored_truth, ref.z);
      double loss = 0.0;
      const std::vector<double> grad =
          backward(model, input, labels, cfg, &loss);
      batch_loss += loss;
      for (std::size_t i = 0; i < grad.size(); ++i) batch_grad[i] += grad[i];
    }
    const double inv_b = 1.0 / static_cast<double>(sched.batch_size);
    batch_loss *= inv_b;
    if (!std::isfinite(batch_loss))
      throw NumericError("training diverged: non-finite loss at step " +
                         std::to_string(step));
    for (auto& g : batch_grad) g *= inv_b;
    optimizer_step(opt, model.params, batch_grad);
    result.loss_trace.push_back(batch_loss);
  }

  result.model = std::move(model);
  return result;
}

}  // namespace rbseg::neural
