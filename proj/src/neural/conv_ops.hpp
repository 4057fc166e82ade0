#ifndef RBSEG_NEURAL_CONV_OPS_HPP
#define RBSEG_NEURAL_CONV_OPS_HPP

// Internal convolution kernels. float weights, double activations.

#include "rbseg/neural/tensor.hpp"

namespace rbseg::neural::detail {

// Standard 2D convolution; out must be pre-shaped to
// (out_c, (h + 2*pad - k)/stride + 1, (w + 2*pad - k)/stride + 1).
void conv2d_forward(const Tensor& in, const float* weights, const float* bias,
                    int k, int stride, int pad, Tensor& out);

// Gradients: d_in may be null when the input needs no gradient (first layer).
// d_weights/d_bias are accumulated into, not overwritten.
void conv2d_backward(const Tensor& in, const float* weights, const Tensor& d_out,
                     int k, int stride, int pad, Tensor* d_in,
                     double* d_weights, double* d_bias);

// Transposed convolution restricted to kernel == stride (non-overlapping
// learned upsample); out is (out_c, h*s, w*s). Weight layout
// [in_c][out_c][sy][sx].
void tconv2d_forward(const Tensor& in, const float* weights, const float* bias,
                     int s, Tensor& out);
void tconv2d_backward(const Tensor& in, const float* weights, const Tensor& d_out,
                      int s, Tensor* d_in, double* d_weights, double* d_bias);

}  // namespace rbseg::neural::detail

#endif  // RBSEG_NEURAL_CONV_OPS_HPP
