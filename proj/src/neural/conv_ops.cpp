#include "conv_ops.hpp"

#include <algorithm>

namespace rbseg::neural::detail {

namespace {

// Output range [lo, hi) along one axis for which in-index
// o*stride + koff - pad stays inside [0, extent).
inline void valid_range(int out_extent, int in_extent, int koff, int stride,
                        int pad, int& lo, int& hi) {
  lo = 0;
  while (lo < out_extent && lo * stride + koff - pad < 0) ++lo;
  hi = out_extent;
  while (hi > lo && (hi - 1) * stride + koff - pad >= in_extent) --hi;
}

}  // namespace

void conv2d_forward(const Tensor& in, const float* weights, const float* bias,
                    int k, int stride, int pad, Tensor& out) {
  const int h = in.h, w = in.w, oh = out.h, ow = out.w;
  const std::size_t tap = static_cast<std::size_t>(k) * k;
  for (int oc = 0; oc < out.c; ++oc) {
    double* op = out.plane(oc);
    std::fill(op, op + out.plane_size(), static_cast<double>(bias[oc]));
    const float* w_oc = weights + static_cast<std::size_t>(oc) * in.c * tap;
    for (int ic = 0; ic < in.c; ++ic) {
      const double* ip = in.plane(ic);
      const float* w_ic = w_oc + static_cast<std::size_t>(ic) * tap;
      for (int ky = 0; ky < k; ++ky) {
        int oy_lo, oy_hi;
        valid_range(oh, h, ky, stride, pad, oy_lo, oy_hi);
        for (int kx = 0; kx < k; ++kx) {
          const double wv = w_ic[ky * k + kx];
          int ox_lo, ox_hi;
          valid_range(ow, w, kx, stride, pad, ox_lo, ox_hi);
          for (int oy = oy_lo; oy < oy_hi; ++oy) {
            const double* irow =
                ip + static_cast<std::size_t>(oy * stride + ky - pad) * w;
            double* orow = op + static_cast<std::size_t>(oy) * ow;
            if (stride == 1) {
              const double* ir = irow + (kx - pad);
              for (int ox = ox_lo; ox < ox_hi; ++ox) orow[ox] += wv * ir[ox];
            } else {
              const int off = kx - pad;
              for (int ox = ox_lo; ox < ox_hi; ++ox)
                orow[ox] += wv * irow[ox * stride + off];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward(const Tensor& in, const float* weights, const Tensor& d_out,
                     int k, int stride, int pad, Tensor* d_in,
                     double* d_weights, double* d_bias) {
  const int h = in.h, w = in.w, oh = d_out.h, ow = d_out.w;
  const std::size_t tap = static_cast<std::size_t>(k) * k;
  for (int oc = 0; oc < d_out.c; ++oc) {
    const double* dop = d_out.plane(oc);
    double bsum = 0.0;
    for (std::size_t i = 0; i < d_out.plane_size(); ++i) bsum += dop[i];
    d_bias[oc] += bsum;
    const float* w_oc = weights + static_cast<std::size_t>(oc) * in.c * tap;
    double* dw_oc = d_weights + static_cast<std::size_t>(oc) * in.c * tap;
    for (int ic = 0; ic < in.c; ++ic) {
      const double* ip = in.plane(ic);
      double* dip = d_in ? d_in->plane(ic) : nullptr;
      const float* w_ic = w_oc + static_cast<std::size_t>(ic) * tap;
      double* dw_ic = dw_oc + static_cast<std::size_t>(ic) * tap;
      for (int ky = 0; ky < k; ++ky) {
        int oy_lo, oy_hi;
        valid_range(oh, h, ky, stride, pad, oy_lo, oy_hi);
        for (int kx = 0; kx < k; ++kx) {
          const double wv = w_ic[ky * k + kx];
          int ox_lo, ox_hi;
          valid_range(ow, w, kx, stride, pad, ox_lo, ox_hi);
          double wgrad = 0.0;
          for (int oy = oy_lo; oy < oy_hi; ++oy) {
            const std::size_t irow_off =
                static_cast<std::size_t>(oy * stride + ky - pad) * w;
            const double* irow = ip + irow_off;
            const double* dorow = dop + static_cast<std::size_t>(oy) * ow;
            if (stride == 1) {
              const int off = kx - pad;
              const double* ir = irow + off;
              if (dip) {
                double* dir = dip + irow_off + off;
                for (int ox = ox_lo; ox < ox_hi; ++ox) {
                  wgrad += ir[ox] * dorow[ox];
                  dir[ox] += wv * dorow[ox];
                }
              } else {
                for (int ox = ox_lo; ox < ox_hi; ++ox)
                  wgrad += ir[ox] * dorow[ox];
              }
            } else {
              const int off = kx - pad;
              if (dip) {
                double* dir = dip + irow_off;
                for (int ox = ox_lo; ox < ox_hi; ++ox) {
                  const int ix = ox * stride + off;
                  wgrad += irow[ix] * dorow[ox];
                  dir[ix] += wv * dorow[ox];
                }
              } else {
                for (int ox = ox_lo; ox < ox_hi; ++ox)
                  wgrad += irow[ox * stride + off] * dorow[ox];
              }
            }
          }
          dw_ic[ky * k + kx] += wgrad;
        }
      }
    }
  }
}

void tconv2d_forward(const Tensor& in, const float* weights, const float* bias,
                     int s, Tensor& out) {
  const int ih = in.h, iw = in.w, ow = out.w;
  const std::size_t tap = static_cast<std::size_t>(s) * s;
  for (int oc = 0; oc < out.c; ++oc) {
    double* op = out.plane(oc);
    std::fill(op, op + out.plane_size(), static_cast<double>(bias[oc]));
  }
  for (int ic = 0; ic < in.c; ++ic) {
    const double* ip = in.plane(ic);
    const float* w_ic = weights + static_cast<std::size_t>(ic) * out.c * tap;
    for (int oc = 0; oc < out.c; ++oc) {
      double* op = out.plane(oc);
      const float* w_oc = w_ic + static_cast<std::size_t>(oc) * tap;
      for (int sy = 0; sy < s; ++sy) {
        for (int sx = 0; sx < s; ++sx) {
          const double wv = w_oc[sy * s + sx];
          for (int iy = 0; iy < ih; ++iy) {
            const double* irow = ip + static_cast<std::size_t>(iy) * iw;
            double* orow =
                op + static_cast<std::size_t>(iy * s + sy) * ow + sx;
            for (int ix = 0; ix < iw; ++ix) orow[ix * s] += wv * irow[ix];
          }
        }
      }
    }
  }
}

void tconv2d_backward(const Tensor& in, const float* weights, const Tensor& d_out,
                      int s, Tensor* d_in, double* d_weights, double* d_bias) {
  const int ih = in.h, iw = in.w, ow = d_out.w;
  const std::size_t tap = static_cast<std::size_t>(s) * s;
  for (int oc = 0; oc < d_out.c; ++oc) {
    const double* dop = d_out.plane(oc);
    double bsum = 0.0;
    for (std::size_t i = 0; i < d_out.plane_size(); ++i) bsum += dop[i];
    d_bias[oc] += bsum;
  }
  for (int ic = 0; ic < in.c; ++ic) {
    const double* ip = in.plane(ic);
    double* dip = d_in ? d_in->plane(ic) : nullptr;
    const float* w_ic = weights + static_cast<std::size_t>(ic) * d_out.c * tap;
    double* dw_ic = d_weights + static_cast<std::size_t>(ic) * d_out.c * tap;
    for (int oc = 0; oc < d_out.c; ++oc) {
      const double* dop = d_out.plane(oc);
      const float* w_oc = w_ic + static_cast<std::size_t>(oc) * tap;
      double* dw_oc = dw_ic + static_cast<std::size_t>(oc) * tap;
      for (int sy = 0; sy < s; ++sy) {
        for (int sx = 0; sx < s; ++sx) {
          const double wv = w_oc[sy * s + sx];
          double wgrad = 0.0;
          for (int iy = 0; iy < ih; ++iy) {
            const double* irow = ip + static_cast<std::size_t>(iy) * iw;
            const double* dorow =
                dop + static_cast<std::size_t>(iy * s + sy) * ow + sx;
            if (dip) {
              double* dirow = dip + static_cast<std::size_t>(iy) * iw;
              for (int ix = 0; ix < iw; ++ix) {
                const double d = dorow[ix * s];
                wgrad += irow[ix] * d;
                dirow[ix] += wv * d;
              }
            } else {
              for (int ix = 0; ix < iw; ++ix) wgrad += irow[ix] * dorow[ix * s];
            }
          }
          dw_oc[sy * s + sx] += wgrad;
        }
      }
    }
  }
}

}  // namespace rbseg::neural::detail
