#ifndef RBSEG_NEURAL_INPUT_STACK_HPP
#define RBSEG_NEURAL_INPUT_STACK_HPP

#include "rbseg/neural/tensor.hpp"
#include "rbseg/volume.hpp"

namespace rbseg::neural {

// 2.5D input: z_slices consecutive z-slices of all channels stacked
// channel-wise, centered on z_center. Boundary slices replicate the edge.
// Channel order is slice-major: stack channel (dz + r) * C + c holds image
// channel c of slice z_center + dz.
Tensor make_input_stack(const Volume& image, int z_center, int z_slices = 5);

}  // namespace rbseg::neural

#endif  // RBSEG_NEURAL_INPUT_STACK_HPP
