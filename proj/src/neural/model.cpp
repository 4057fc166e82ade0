#include "rbseg/neural/model.hpp"

#include <cmath>
#include <numeric>

#include "conv_ops.hpp"
#include "rbseg/errors.hpp"
#include "rbseg/neural/input_stack.hpp"
#include "rbseg/rng.hpp"

namespace rbseg::neural {

namespace {

enum class OpKind { Input, Conv, TConv, Relu, Add, Concat };

struct ConvShape {
  bool transposed = false;
  int in_c = 0, out_c = 0, k = 0, stride = 1, pad = 0;
  std::size_t w_off = 0, b_off = 0;
  std::size_t weight_size() const {
    return static_cast<std::size_t>(in_c) * out_c * k * k;
  }
};

struct Node {
  OpKind kind = OpKind::Input;
  int a = -1, b = -1;  // input node ids
  int conv = -1;       // index into Graph::convs for Conv/TConv
};

struct Graph {
  std::vector<Node> nodes;
  std::vector<ConvShape> convs;
  std::size_t param_count = 0;
  int logits = -1;
  int downsample = 1;
};

class GraphBuilder {
 public:
  int input() {
    graph_.nodes.push_back({OpKind::Input, -1, -1, -1});
    return last();
  }
  int conv(int src, int in_c, int out_c, int k, int stride, int pad) {
    const int id = add_conv_shape(false, in_c, out_c, k, stride, pad);
    graph_.nodes.push_back({OpKind::Conv, src, -1, id});
    return last();
  }
  int tconv(int src, int in_c, int out_c, int s) {
    const int id = add_conv_shape(true, in_c, out_c, s, s, 0);
    graph_.nodes.push_back({OpKind::TConv, src, -1, id});
    return last();
  }
  int relu(int src) {
    graph_.nodes.push_back({OpKind::Relu, src, -1, -1});
    return last();
  }
  int add(int a, int b) {
    graph_.nodes.push_back({OpKind::Add, a, b, -1});
    return last();
  }
  int concat(int a, int b) {
    graph_.nodes.push_back({OpKind::Concat, a, b, -1});
    return last();
  }
  Graph finish(int logits_node, int downsample) {
    graph_.logits = logits_node;
    graph_.downsample = downsample;
    return std::move(graph_);
  }

 private:
  int last() const { return static_cast<int>(graph_.nodes.size()) - 1; }
  int add_conv_shape(bool transposed, int in_c, int out_c, int k, int stride,
                     int pad) {
    ConvShape s;
    s.transposed = transposed;
    s.in_c = in_c;
    s.out_c = out_c;
    s.k = k;
    s.stride = stride;
    s.pad = pad;
    s.w_off = graph_.param_count;
    s.b_off = s.w_off + s.weight_size();
    graph_.param_count = s.b_off + static_cast<std::size_t>(out_c);
    graph_.convs.push_back(s);
    return static_cast<int>(graph_.convs.size()) - 1;
  }
  Graph graph_;
};

int scaled_width(double base, double k) {
  return std::max(1, static_cast<int>(std::llround(base * k)));
}

Graph build_encoder_decoder(const ModelSpec& spec) {
  GraphBuilder g;
  const int levels = spec.levels;
  std::vector<int> width(levels);
  for (int i = 0; i < levels; ++i)
    width[i] = scaled_width(8.0, spec.width_factor) << i;

  const int in = g.input();
  int cur = g.relu(g.conv(in, spec.in_channels, width[0], 3, 1, 1));
  cur = g.relu(g.conv(cur, width[0], width[0], 3, 1, 1));
  std::vector<int> skips(levels, -1);
  skips[0] = cur;
  for (int i = 1; i < levels; ++i) {
    cur = g.relu(g.conv(cur, width[i - 1], width[i], 3, 2, 1));
    cur = g.relu(g.conv(cur, width[i], width[i], 3, 1, 1));
    skips[i] = cur;
  }
  for (int i = levels - 2; i >= 0; --i) {
    cur = g.relu(g.tconv(cur, width[i + 1], width[i], 2));
    cur = g.concat(cur, skips[i]);
    cur = g.relu(g.conv(cur, 2 * width[i], width[i], 3, 1, 1));
  }
  const int logits = g.conv(cur, width[0], 2, 1, 1, 0);
  return g.finish(logits, 1 << (levels - 1));
}

Graph build_wide_res_seg(const ModelSpec& spec) {
  GraphBuilder g;
  const int stem_w = scaled_width(4.0, spec.width_factor);
  const int group_w[2] = {scaled_width(16.0, spec.width_factor),
                          scaled_width(32.0, spec.width_factor)};

  const int in = g.input();
  int cur = g.relu(g.conv(in, spec.in_channels, stem_w, 3, 1, 1));
  int cur_w = stem_w;
  for (int group = 0; group < 2; ++group) {
    const int w = group_w[group];
    // Downsampling block with a projection shortcut.
    int main = g.relu(g.conv(cur, cur_w, w, 3, 2, 1));
    main = g.conv(main, w, w, 3, 1, 1);
    const int shortcut = g.conv(cur, cur_w, w, 1, 2, 0);
    cur = g.relu(g.add(main, shortcut));
    cur_w = w;
    for (int blk = 1; blk < spec.blocks_per_group; ++blk) {
      main = g.relu(g.conv(cur, w, w, 3, 1, 1));
      main = g.conv(main, w, w, 3, 1, 1);
      cur = g.relu(g.add(main, cur));
    }
  }
  // Single transpose-convolution head back to input resolution.
  const int logits = g.tconv(cur, cur_w, 2, 4);
  return g.finish(logits, 4);
}

Graph build_graph(const ModelSpec& spec) {
  spec.validate();
  return spec.arch == Arch::EncoderDecoder ? build_encoder_decoder(spec)
                                           : build_wide_res_seg(spec);
}

Tensor conv_output_shape(const ConvShape& s, const Tensor& in) {
  if (in.c != s.in_c) throw NumericError("conv input channel mismatch");
  if (s.transposed) return Tensor(s.out_c, in.h * s.stride, in.w * s.stride);
  const int oh = (in.h + 2 * s.pad - s.k) / s.stride + 1;
  const int ow = (in.w + 2 * s.pad - s.k) / s.stride + 1;
  return Tensor(s.out_c, oh, ow);
}

// Runs the graph; acts[i] holds node i's output.
void run_forward(const Graph& graph, const std::vector<float>& params,
                 const Tensor& input, std::vector<Tensor>& acts) {
  acts.assign(graph.nodes.size(), Tensor());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const Node& node = graph.nodes[i];
    switch (node.kind) {
      case OpKind::Input:
        acts[i] = input;
        break;
      case OpKind::Conv: {
        const ConvShape& s = graph.convs[node.conv];
        acts[i] = conv_output_shape(s, acts[node.a]);
        detail::conv2d_forward(acts[node.a], params.data() + s.w_off,
                               params.data() + s.b_off, s.k, s.stride, s.pad,
                               acts[i]);
        break;
      }
      case OpKind::TConv: {
        const ConvShape& s = graph.convs[node.conv];
        acts[i] = conv_output_shape(s, acts[node.a]);
        detail::tconv2d_forward(acts[node.a], params.data() + s.w_off,
                                params.data() + s.b_off, s.stride, acts[i]);
        break;
      }
      case OpKind::Relu: {
        const Tensor& src = acts[node.a];
        acts[i] = Tensor(src.c, src.h, src.w);
        for (std::size_t j = 0; j < src.data.size(); ++j)
          acts[i].data[j] = src.data[j] > 0.0 ? src.data[j] : 0.0;
        break;
      }
      case OpKind::Add: {
        const Tensor& a = acts[node.a];
        const Tensor& b = acts[node.b];
        if (!a.same_shape(b)) throw NumericError("residual add shape mismatch");
        acts[i] = Tensor(a.c, a.h, a.w);
        for (std::size_t j = 0; j < a.data.size(); ++j)
          acts[i].data[j] = a.data[j] + b.data[j];
        break;
      }
      case OpKind::Concat: {
        const Tensor& a = acts[node.a];
        const Tensor& b = acts[node.b];
        if (a.h != b.h || a.w != b.w)
          throw NumericError("concat spatial shape mismatch");
        acts[i] = Tensor(a.c + b.c, a.h, a.w);
        std::copy(a.data.begin(), a.data.end(), acts[i].data.begin());
        std::copy(b.data.begin(), b.data.end(),
                  acts[i].data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
        break;
      }
    }
  }
}

Tensor softmax_pair(const Tensor& logits) {
  Tensor probs(2, logits.h, logits.w);
  const double* z0 = logits.plane(0);
  const double* z1 = logits.plane(1);
  double* p0 = probs.plane(0);
  double* p1 = probs.plane(1);
  for (std::size_t i = 0; i < logits.plane_size(); ++i) {
    const double m = std::max(z0[i], z1[i]);
    const double e0 = std::exp(z0[i] - m);
    const double e1 = std::exp(z1[i] - m);
    const double inv = 1.0 / (e0 + e1);
    p0[i] = e0 * inv;
    p1[i] = e1 * inv;
  }
  return probs;
}

void check_input(const Graph& graph, const ModelSpec& spec, const Tensor& input) {
  if (input.c != spec.in_channels)
    throw NumericError("input channel count " + std::to_string(input.c) +
                       " does not match model (" +
                       std::to_string(spec.in_channels) + ")");
  if (input.h % graph.downsample != 0 || input.w % graph.downsample != 0 ||
      input.h < graph.downsample || input.w < graph.downsample)
    throw NumericError("input height/width must be positive multiples of " +
                       std::to_string(graph.downsample));
}

}  // namespace

const char* arch_name(Arch a) {
  return a == Arch::EncoderDecoder ? "EncoderDecoder" : "WideResSeg";
}

Arch arch_from_name(const std::string& name) {
  if (name == "EncoderDecoder") return Arch::EncoderDecoder;
  if (name == "WideResSeg") return Arch::WideResSeg;
  throw ConfigError("unknown architecture: " + name);
}

void ModelSpec::validate() const {
  if (width_factor <= 0.0) throw ConfigError("width_factor must be positive");
  if (levels < 2) throw ConfigError("EncoderDecoder needs at least 2 levels");
  if (blocks_per_group < 1)
    throw ConfigError("WideResSeg needs at least 1 block per group");
  if (in_channels < 1) throw ConfigError("in_channels must be >= 1");
}

std::size_t parameter_count(const ModelSpec& spec) {
  return build_graph(spec).param_count;
}

int downsample_factor(const ModelSpec& spec) {
  return build_graph(spec).downsample;
}

NetworkModel init_model(const ModelSpec& spec) {
  const Graph graph = build_graph(spec);
  NetworkModel model;
  model.spec = spec;
  model.params.assign(graph.param_count, 0.0f);
  Rng rng(spec.init_seed);
  for (const auto& conv : graph.convs) {
    // He-normal: sqrt(2 / fan_in). The non-overlapping transpose conv feeds
    // each output from in_c taps only.
    const double fan_in = conv.transposed
                              ? static_cast<double>(conv.in_c)
                              : static_cast<double>(conv.in_c) * conv.k * conv.k;
    const double stddev = std::sqrt(2.0 / fan_in);
    const std::size_t n = conv.weight_size();
    for (std::size_t i = 0; i < n; ++i)
      model.params[conv.w_off + i] = static_cast<float>(rng.normal(0.0, stddev));
    // biases stay zero
  }
  return model;
}

Tensor forward(const NetworkModel& model, const Tensor& input) {
  const Graph graph = build_graph(model.spec);
  if (model.params.size() != graph.param_count)
    throw NumericError("parameter vector size mismatch");
  check_input(graph, model.spec, input);
  std::vector<Tensor> acts;
  run_forward(graph, model.params, input, acts);
  return softmax_pair(acts[graph.logits]);
}

std::vector<double> backward(const NetworkModel& model, const Tensor& input,
                             const SliceLabels& labels, const LossConfig& cfg,
                             double* loss_out) {
  const Graph graph = build_graph(model.spec);
  if (model.params.size() != graph.param_count)
    throw NumericError("parameter vector size mismatch");
  check_input(graph, model.spec, input);

  std::vector<Tensor> acts;
  run_forward(graph, model.params, input, acts);
  const Tensor probs = softmax_pair(acts[graph.logits]);
  LossResult lr = lopsided_loss(probs, labels, cfg);
  if (loss_out) *loss_out = lr.loss;

  std::vector<double> grad(graph.param_count, 0.0);
  std::vector<Tensor> dacts(graph.nodes.size());
  dacts[graph.logits] = std::move(lr.dlogits);

  auto ensure = [&](int node) -> Tensor& {
    if (dacts[node].data.empty()) {
      const Tensor& v = acts[node];
      dacts[node] = Tensor(v.c, v.h, v.w);
    }
    return dacts[node];
  };

  for (int i = static_cast<int>(graph.nodes.size()) - 1; i >= 0; --i) {
    if (dacts[i].data.empty()) continue;  // node not on a used path
    const Node& node = graph.nodes[i];
    const Tensor& dout = dacts[i];
    switch (node.kind) {
      case OpKind::Input:
        break;
      case OpKind::Conv: {
        const ConvShape& s = graph.convs[node.conv];
        const bool need_din = graph.nodes[node.a].kind != OpKind::Input;
        Tensor* din = need_din ? &ensure(node.a) : nullptr;
        detail::conv2d_backward(acts[node.a], model.params.data() + s.w_off,
                                dout, s.k, s.stride, s.pad, din,
                                grad.data() + s.w_off, grad.data() + s.b_off);
        break;
      }
      case OpKind::TConv: {
        const ConvShape& s = graph.convs[node.conv];
        const bool need_din = graph.nodes[node.a].kind != OpKind::Input;
        Tensor* din = need_din ? &ensure(node.a) : nullptr;
        detail::tconv2d_backward(acts[node.a], model.params.data() + s.w_off,
                                 dout, s.stride, din, grad.data() + s.w_off,
                                 grad.data() + s.b_off);
        break;
      }
      case OpKind::Relu: {
        Tensor& din = ensure(node.a);
        const Tensor& src = acts[node.a];
        for (std::size_t j = 0; j < src.data.size(); ++j)
          if (src.data[j] > 0.0) din.data[j] += dout.data[j];
        break;
      }
      case OpKind::Add: {
        Tensor& da = ensure(node.a);
        Tensor& db = ensure(node.b);
        for (std::size_t j = 0; j < dout.data.size(); ++j) {
          da.data[j] += dout.data[j];
          db.data[j] += dout.data[j];
        }
        break;
      }
      case OpKind::Concat: {
        Tensor& da = ensure(node.a);
        Tensor& db = ensure(node.b);
        const std::size_t na = da.data.size();
        for (std::size_t j = 0; j < na; ++j) da.data[j] += dout.data[j];
        for (std::size_t j = 0; j < db.data.size(); ++j)
          db.data[j] += dout.data[j + na];
        break;
      }
    }
    // Free the consumed upstream gradient early; peak memory stays modest.
    dacts[i] = Tensor();
  }

  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      int layer = -1;
      for (std::size_t ci = 0; ci < graph.convs.size(); ++ci) {
        const auto& s = graph.convs[ci];
        if (i >= s.w_off && i < s.b_off + static_cast<std::size_t>(s.out_c))
          layer = static_cast<int>(ci);
      }
      throw NumericError("numerical instability: non-finite gradient in layer " +
                         std::to_string(layer));
    }
  }
  return grad;
}

Volume predict_volume_probs(const NetworkModel& model, const Volume& image,
                            int z_slices) {
  Volume out(image.dims, 1, image.spacing_mm);
  for (int z = 0; z < image.dims.z; ++z) {
    const Tensor input = make_input_stack(image, z, z_slices);
    const Tensor probs = forward(model, input);
    const double* fg = probs.plane(1);
    for (int y = 0; y < image.dims.y; ++y)
      for (int x = 0; x < image.dims.x; ++x)
        out.at(0, x, y, z) =
            static_cast<float>(fg[static_cast<std::size_t>(y) * image.dims.x + x]);
  }
  return out;
}

}  // namespace rbseg::neural
