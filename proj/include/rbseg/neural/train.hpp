#ifndef RBSEG_NEURAL_TRAIN_HPP
#define RBSEG_NEURAL_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "rbseg/censor.hpp"
#include "rbseg/neural/model.hpp"
#include "rbseg/synthgen.hpp"

namespace rbseg::neural {

struct TrainSchedule {
  int steps = 300;
  int batch_size = 2;
  // Probability of drawing the batch slice from the lesion-containing pool;
  // counters the heavy class imbalance of sparse lesions.
  double lesion_slice_prob = 0.5;
  int z_slices = 5;
  std::uint64_t sampling_seed = 0;

  void validate() const;
};

// One patient's training view: the image plus the member's censored
// annotation mask. Image channels are shared read-only.
struct TrainView {
  const synth::PatientCase* patient = nullptr;
  MaskVolume censored_truth;
};

struct TrainResult {
  NetworkModel model;
  std::vector<double> loss_trace;  // batch-mean loss per step
};

// Fixed step budget, constant learning rate, deterministic given the model
// init seed and the schedule sampling seed. Throws NumericError naming the
// step index if the loss diverges.
TrainResult train(NetworkModel model, const std::vector<TrainView>& views,
                  const censor::HyperparameterPoint& hp, const LossConfig& cfg,
                  const TrainSchedule& sched);

}  // namespace rbseg::neural

#endif  // RBSEG_NEURAL_TRAIN_HPP
