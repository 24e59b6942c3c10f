#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsrlab/errors.hpp"

namespace tsrlab {

// ---------------------------------------------------------------------------
// Layer-stack specifications
// ---------------------------------------------------------------------------

enum class LayerKind { Conv, MaxPool, Patchify, Pointwise, Resize, Identity };

/// One spatial layer. `parallel` marks a branch applied alongside the main
/// path (residual downsampling shortcuts): it contributes parameters and MACs
/// but never advances the serial geometry. `counted` controls the #Conv
/// column.
struct LayerSpec {
  LayerKind kind = LayerKind::Conv;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int in_channels = 1;
  int out_channels = 1;
  bool bias = true;
  bool batch_norm = false;
  bool parallel = false;
  bool counted = true;
  int resize_to = 0;

  static LayerSpec conv(int k, int s, int p, int cin, int cout, bool bn = false) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.kernel = k;
    l.stride = s;
    l.padding = p;
    l.in_channels = cin;
    l.out_channels = cout;
    l.batch_norm = bn;
    l.bias = !bn;
    return l;
  }
  static LayerSpec maxpool(int k, int s, int p) {
    LayerSpec l;
    l.kind = LayerKind::MaxPool;
    l.kernel = k;
    l.stride = s;
    l.padding = p;
    l.counted = false;
    l.bias = false;
    return l;
  }
  /// kernel = stride = P, no padding: the flattened-patch projection.
  static LayerSpec patchify(int patch, int cin, int cout) {
    LayerSpec l;
    l.kind = LayerKind::Patchify;
    l.kernel = patch;
    l.stride = patch;
    l.in_channels = cin;
    l.out_channels = cout;
    return l;
  }
  /// Channel projection kept out of the #Conv column.
  static LayerSpec pointwise(int cin, int cout) {
    LayerSpec l;
    l.kind = LayerKind::Pointwise;
    l.in_channels = cin;
    l.out_channels = cout;
    l.counted = false;
    return l;
  }
  static LayerSpec shortcut(int cin, int cout, bool bn = true) {
    LayerSpec l = pointwise(cin, cout);
    l.parallel = true;
    l.batch_norm = bn;
    l.bias = !bn;
    return l;
  }
  /// Adaptive spatial resampling to a square target; kernel-1 semantics, so
  /// it never widens the receptive field.
  static LayerSpec resize(int target) {
    LayerSpec l;
    l.kind = LayerKind::Resize;
    l.resize_to = target;
    l.counted = false;
    l.bias = false;
    return l;
  }
  static LayerSpec identity() {
    LayerSpec l;
    l.kind = LayerKind::Identity;
    l.counted = false;
    l.bias = false;
    return l;
  }

  bool is_kernel_layer() const {
    return kind == LayerKind::Conv || kind == LayerKind::Patchify || kind == LayerKind::Pointwise;
  }
};

struct EncoderSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  int input_h = 448;
  int input_w = 448;
};

struct FullModelSpec {
  EncoderSpec encoder;
  int n_encoder_layers = 4;
  int n_decoder_layers = 4;
  int d_model = 512;
  int d_ff = 1024;
  int heads = 8;
  int vocab = 32;
  int max_len = 512;
};

// ---------------------------------------------------------------------------
// Geometry: receptive field, jump, output sizes
// ---------------------------------------------------------------------------

struct LayerGeometry {
  long long rf = 1;
  long long jump = 1;
  int out_h = 0;
  int out_w = 0;
};

namespace detail {

inline int conv_out(int in, int k, int s, int p) {
  return (in + 2 * p - k) / s + 1;
}

}  // namespace detail

/// Per-layer receptive field, jump (input stride of one output step) and
/// output size:
///   r <- r + (k - 1) * j,  j <- j * s,  out = floor((in + 2p - k) / s) + 1.
/// Parallel branches repeat the current state without advancing it.
inline std::vector<LayerGeometry> trace_geometry(const EncoderSpec& spec) {
  std::vector<LayerGeometry> trace;
  LayerGeometry g{1, 1, spec.input_h, spec.input_w};
  for (const LayerSpec& l : spec.layers) {
    if (!l.parallel) {
      switch (l.kind) {
        case LayerKind::Conv:
        case LayerKind::MaxPool:
        case LayerKind::Patchify:
        case LayerKind::Pointwise: {
          const int oh = detail::conv_out(g.out_h, l.kernel, l.stride, l.padding);
          const int ow = detail::conv_out(g.out_w, l.kernel, l.stride, l.padding);
          if (oh <= 0 || ow <= 0) {
            fail(Errc::degenerate_output, spec.name + ": layer collapses spatial size to " +
                                              std::to_string(oh) + "x" + std::to_string(ow));
          }
          g.rf += static_cast<long long>(l.kernel - 1) * g.jump;
          g.jump *= l.stride;
          g.out_h = oh;
          g.out_w = ow;
          break;
        }
        case LayerKind::Resize: {
          if (l.resize_to <= 0) fail(Errc::degenerate_output, "resize target must be positive");
          if (g.out_h != g.out_w) {
            fail(Errc::shape_mismatch, "resize requires a square feature map");
          }
          const long long scaled = g.jump * g.out_h;
          if (scaled % l.resize_to != 0) {
            fail(Errc::degenerate_output, "resize to " + std::to_string(l.resize_to) +
                                              " from " + std::to_string(g.out_h) +
                                              " leaves a fractional jump");
          }
          g.jump = scaled / l.resize_to;
          g.out_h = g.out_w = l.resize_to;
          break;
        }
        case LayerKind::Identity:
          break;
      }
    }
    trace.push_back(g);
  }
  if (trace.empty()) trace.push_back(g);
  return trace;
}

inline LayerGeometry final_geometry(const EncoderSpec& spec) { return trace_geometry(spec).back(); }

/// Inclusive pixel rectangle of the input that can reach one output position.
struct PixelBox {
  int r0 = 0, r1 = 0, c0 = 0, c1 = 0;

  int height() const { return r1 - r0 + 1; }
  int width() const { return c1 - c0 + 1; }
  bool operator==(const PixelBox&) const = default;
};

/// Maps an output position back through the stack, clipping against every
/// intermediate feature-map border (padding taps outside a map carry no
/// signal). For interior positions the box side equals the receptive field.
inline PixelBox input_window(const EncoderSpec& spec, int out_r, int out_c) {
  struct Dim {
    int kind;  // 0 windowed, 1 resize, 2 identity
    int k, s, p, in_h, in_w, out_h, out_w;
  };
  std::vector<Dim> serial;
  int h = spec.input_h, w = spec.input_w;
  for (const LayerSpec& l : spec.layers) {
    if (l.parallel) continue;
    Dim d{2, 1, 1, 0, h, w, h, w};
    if (l.kind == LayerKind::Resize) {
      d.kind = 1;
      d.out_h = d.out_w = l.resize_to;
    } else if (l.kind != LayerKind::Identity) {
      d.kind = 0;
      d.k = l.kernel;
      d.s = l.stride;
      d.p = l.padding;
      d.out_h = detail::conv_out(h, l.kernel, l.stride, l.padding);
      d.out_w = detail::conv_out(w, l.kernel, l.stride, l.padding);
    }
    h = d.out_h;
    w = d.out_w;
    serial.push_back(d);
  }
  if (out_r < 0 || out_r >= h || out_c < 0 || out_c >= w) {
    fail(Errc::shape_mismatch, "output position outside the final feature map");
  }
  int r0 = out_r, r1 = out_r, c0 = out_c, c1 = out_c;
  for (auto it = serial.rbegin(); it != serial.rend(); ++it) {
    if (it->kind == 0) {
      r0 = r0 * it->s - it->p;
      r1 = r1 * it->s - it->p + it->k - 1;
      c0 = c0 * it->s - it->p;
      c1 = c1 * it->s - it->p + it->k - 1;
    } else if (it->kind == 1) {
      r0 = static_cast<int>((static_cast<long long>(r0) * it->in_h) / it->out_h);
      r1 = static_cast<int>(((static_cast<long long>(r1) + 1) * it->in_h - 1) / it->out_h);
      c0 = static_cast<int>((static_cast<long long>(c0) * it->in_w) / it->out_w);
      c1 = static_cast<int>(((static_cast<long long>(c1) + 1) * it->in_w - 1) / it->out_w);
    }
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, it->in_h - 1);
    c1 = std::min(c1, it->in_w - 1);
  }
  return PixelBox{r0, r1, c0, c1};
}

inline long long receptive_field(const EncoderSpec& spec) { return final_geometry(spec).rf; }

/// RF relative to the input side, capped at 100, round-half-up to 2 decimals.
inline double rf_ratio(const EncoderSpec& spec) {
  if (spec.input_h != spec.input_w) fail(Errc::shape_mismatch, "rf_ratio requires a square input");
  const double frac = std::min(1.0, static_cast<double>(receptive_field(spec)) / spec.input_h);
  return std::floor(frac * 10000.0 + 0.5) / 100.0;
}

/// Number of flattened positions handed to the transformer.
inline long long sequence_length(const EncoderSpec& spec) {
  const LayerGeometry g = final_geometry(spec);
  return static_cast<long long>(g.out_h) * g.out_w;
}

// ---------------------------------------------------------------------------
// Parameter and MAC accounting
// ---------------------------------------------------------------------------

struct StageBreakdown {
  long long visual_encoder = 0;
  long long transformer_encoder = 0;
  long long transformer_decoder = 0;
  long long embedding = 0;
  long long head = 0;

  long long total() const {
    return visual_encoder + transformer_encoder + transformer_decoder + embedding + head;
  }
};

namespace detail {

inline long long layer_params(const LayerSpec& l) {
  if (!l.is_kernel_layer()) return 0;
  long long p = static_cast<long long>(l.kernel) * l.kernel * l.in_channels * l.out_channels;
  if (l.bias) p += l.out_channels;
  if (l.batch_norm) p += 2LL * l.out_channels;
  return p;
}

inline long long encoder_layer_params(int d, int ff) {
  // self-attention (q,k,v,out projections with biases), two affine norms, FFN
  return 4LL * d * d + 4LL * d + 4LL * d + 2LL * d * ff + ff + d;
}

inline long long decoder_layer_params(int d, int ff) {
  return 8LL * d * d + 8LL * d + 6LL * d + 2LL * d * ff + ff + d;
}

}  // namespace detail

/// Learnable scalar counts per stage. Positional encodings are fixed
/// sinusoids and contribute nothing.
inline StageBreakdown param_breakdown(const FullModelSpec& spec) {
  StageBreakdown b;
  for (const LayerSpec& l : spec.encoder.layers) b.visual_encoder += detail::layer_params(l);
  b.transformer_encoder =
      static_cast<long long>(spec.n_encoder_layers) * detail::encoder_layer_params(spec.d_model, spec.d_ff);
  b.transformer_decoder =
      static_cast<long long>(spec.n_decoder_layers) * detail::decoder_layer_params(spec.d_model, spec.d_ff);
  b.embedding = static_cast<long long>(spec.vocab) * spec.d_model;
  b.head = static_cast<long long>(spec.d_model) * spec.vocab + spec.vocab;
  return b;
}

inline long long param_count(const FullModelSpec& spec) { return param_breakdown(spec).total(); }

/// One multiply-accumulate per kernel tap and output element; attention
/// counts the four projections plus the QK^T and AV products; biases, norms
/// and softmax are free. The decoder is costed as a single teacher-forced
/// pass of `decode_len` steps.
inline StageBreakdown mac_breakdown(const FullModelSpec& spec, int decode_len = 0) {
  const long long L = decode_len > 0 ? decode_len : spec.max_len;
  const long long d = spec.d_model;
  const long long ff = spec.d_ff;
  const long long N = sequence_length(spec.encoder);

  StageBreakdown b;
  {
    LayerGeometry g{1, 1, spec.encoder.input_h, spec.encoder.input_w};
    for (const LayerSpec& l : spec.encoder.layers) {
      if (!l.parallel && l.kind != LayerKind::Resize && l.kind != LayerKind::Identity) {
        g.out_h = detail::conv_out(g.out_h, l.kernel, l.stride, l.padding);
        g.out_w = detail::conv_out(g.out_w, l.kernel, l.stride, l.padding);
      } else if (!l.parallel && l.kind == LayerKind::Resize) {
        g.out_h = g.out_w = l.resize_to;
      }
      if (l.is_kernel_layer()) {
        b.visual_encoder += static_cast<long long>(l.kernel) * l.kernel * l.in_channels *
                            l.out_channels * g.out_h * g.out_w;
      }
    }
  }
  b.transformer_encoder =
      spec.n_encoder_layers * (4 * N * d * d + 2 * N * N * d + 2 * N * d * ff);
  b.transformer_decoder = spec.n_decoder_layers * (4 * L * d * d + 2 * L * L * d +
                                                   (2 * L + 2 * N) * d * d + 2 * L * N * d +
                                                   2 * L * d * ff);
  b.head = L * d * spec.vocab;
  return b;
}

inline long long mac_count(const FullModelSpec& spec, int decode_len = 0) {
  return mac_breakdown(spec, decode_len).total();
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace detail {

inline void basic_block(std::vector<LayerSpec>& L, int cin, int cout, int stride) {
  L.push_back(LayerSpec::conv(3, stride, 1, cin, cout, /*bn=*/true));
  L.push_back(LayerSpec::conv(3, 1, 1, cout, cout, /*bn=*/true));
  if (stride != 1 || cin != cout) L.push_back(LayerSpec::shortcut(cin, cout));
}

inline void bottleneck_block(std::vector<LayerSpec>& L, int cin, int mid, int cout, int stride) {
  L.push_back(LayerSpec::conv(1, 1, 0, cin, mid, /*bn=*/true));
  L.push_back(LayerSpec::conv(3, stride, 1, mid, mid, /*bn=*/true));
  L.push_back(LayerSpec::conv(1, 1, 0, mid, cout, /*bn=*/true));
  if (stride != 1 || cin != cout) L.push_back(LayerSpec::shortcut(cin, cout));
}

inline EncoderSpec resnet_encoder(const std::string& name, const std::vector<int>& blocks,
                                  bool bottleneck, int input) {
  if (input % 32 != 0) fail(Errc::degenerate_output, name + " needs an input divisible by 32");
  EncoderSpec e;
  e.name = name;
  e.input_h = e.input_w = input;
  e.layers.push_back(LayerSpec::conv(7, 2, 3, 3, 64, /*bn=*/true));
  e.layers.push_back(LayerSpec::maxpool(3, 2, 1));
  const int widths[4] = {64, 128, 256, 512};
  int cin = 64;
  for (int stage = 0; stage < 4; ++stage) {
    const int w = widths[stage];
    const int cout = bottleneck ? w * 4 : w;
    for (int i = 0; i < blocks[stage]; ++i) {
      const int stride = (stage > 0 && i == 0) ? 2 : 1;
      if (bottleneck) {
        bottleneck_block(e.layers, cin, w, cout, stride);
      } else {
        basic_block(e.layers, cin, cout, stride);
      }
      cin = cout;
    }
  }
  if (bottleneck) e.layers.push_back(LayerSpec::pointwise(cin, 512));
  // restore the /16 grid the transformer consumes (stride-1 resampling; no
  // receptive-field contribution)
  e.layers.push_back(LayerSpec::resize(input / 16));
  return e;
}

inline EncoderSpec linearproj_encoder(int patch, int input, int d_model) {
  EncoderSpec e;
  e.name = "linearproj-" + std::to_string(patch);
  e.input_h = e.input_w = input;
  e.layers.push_back(LayerSpec::patchify(patch, 3, d_model));
  return e;
}

inline EncoderSpec convstem_encoder(const std::string& name, int kernel, int n_stride2, int input,
                                    int d_model) {
  EncoderSpec e;
  e.name = name;
  e.input_h = e.input_w = input;
  int cin = 3;
  int cout = 48;
  for (int i = 0; i < n_stride2; ++i) {
    e.layers.push_back(LayerSpec::conv(kernel, 2, kernel / 2, cin, cout, /*bn=*/true));
    cin = cout;
    cout *= 2;
  }
  e.layers.push_back(LayerSpec::conv(1, 1, 0, cin, d_model, /*bn=*/true));
  return e;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"resnet18",     "resnet34",     "resnet50",     "linearproj-14", "linearproj-16",
          "linearproj-28", "linearproj-56", "linearproj-112", "convstem",     "convstem-r1",
          "convstem-r2",  "convstem-r3",  "convstem-n1",  "convstem-n2",   "convstem-n3",
          "toy-linearproj", "toy-convstem"};
}

/// Named model presets. `input_size` 0 keeps each preset's default side.
inline FullModelSpec preset(const std::string& name, int input_size = 0) {
  auto pick = [&](int fallback) { return input_size > 0 ? input_size : fallback; };

  FullModelSpec m;  // transformer defaults: d 512, ff 1024, 8 heads, 4+4 layers
  if (name == "resnet18" || name == "resnet34" || name == "resnet50") {
    const int input = pick(448);
    if (name == "resnet18") {
      m.encoder = detail::resnet_encoder(name, {2, 2, 2, 2}, false, input);
    } else if (name == "resnet34") {
      m.encoder = detail::resnet_encoder(name, {3, 4, 6, 3}, false, input);
    } else {
      m.encoder = detail::resnet_encoder(name, {3, 4, 6, 3}, true, input);
    }
    m.n_encoder_layers = 2;  // the known-good depth for CNN backbones
    return m;
  }
  if (name.rfind("linearproj-", 0) == 0) {
    const std::string suffix = name.substr(11);
    for (int patch : {14, 16, 28, 56, 112}) {
      if (suffix == std::to_string(patch)) {
        m.encoder = detail::linearproj_encoder(patch, pick(448), m.d_model);
        return m;
      }
    }
    fail(Errc::unknown_preset, name);
  }
  if (name == "convstem") {
    m.encoder = detail::convstem_encoder(name, 5, 4, pick(432), m.d_model);
    return m;
  }
  if (name == "convstem-r1") {
    m.encoder = detail::convstem_encoder(name, 3, 4, pick(448), m.d_model);
    return m;
  }
  if (name == "convstem-r2") {
    m.encoder = detail::convstem_encoder(name, 5, 4, pick(448), m.d_model);
    return m;
  }
  if (name == "convstem-r3") {
    m.encoder = detail::convstem_encoder(name, 5, 3, pick(216), m.d_model);
    return m;
  }
  if (name == "convstem-n1") {
    m.encoder = detail::convstem_encoder(name, 3, 4, pick(256), m.d_model);
    return m;
  }
  if (name == "convstem-n2") {
    m.encoder = detail::convstem_encoder(name, 5, 4, pick(368), m.d_model);
    return m;
  }
  if (name == "convstem-n3") {
    m.encoder = detail::convstem_encoder(name, 5, 4, pick(480), m.d_model);
    return m;
  }
  if (name == "toy-linearproj" || name == "toy-convstem") {
    m.d_model = 64;
    m.d_ff = 128;
    m.heads = 4;
    m.n_encoder_layers = 2;
    m.n_decoder_layers = 2;
    m.max_len = 64;
    const int input = pick(32);
    EncoderSpec e;
    e.name = name;
    e.input_h = e.input_w = input;
    if (name == "toy-linearproj") {
      e.layers.push_back(LayerSpec::patchify(8, 3, m.d_model));
    } else {
      e.layers.push_back(LayerSpec::conv(3, 2, 1, 3, 16));
      e.layers.push_back(LayerSpec::conv(3, 2, 1, 16, 32));
      e.layers.push_back(LayerSpec::conv(1, 1, 0, 32, m.d_model));
    }
    m.encoder = e;
    return m;
  }
  fail(Errc::unknown_preset, name);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct AnalysisReport {
  std::string name;
  long long params = 0;
  long long macs = 0;
  long long flops = 0;  // 2 * macs
  int n_conv = 0;
  std::optional<int> kernel;
  long long rf = 1;
  double rf_ratio = 0.0;
  long long seq_len = 0;
  int input_h = 0;
  int input_w = 0;
  StageBreakdown param_stages;
  StageBreakdown mac_stages;
};

inline AnalysisReport report(const FullModelSpec& spec, int decode_len = 0) {
  AnalysisReport r;
  r.name = spec.encoder.name;
  r.input_h = spec.encoder.input_h;
  r.input_w = spec.encoder.input_w;
  r.param_stages = param_breakdown(spec);
  r.mac_stages = mac_breakdown(spec, decode_len);
  r.params = r.param_stages.total();
  r.macs = r.mac_stages.total();
  r.flops = 2 * r.macs;
  r.rf = receptive_field(spec.encoder);
  r.rf_ratio = rf_ratio(spec.encoder);
  r.seq_len = sequence_length(spec.encoder);

  std::set<int> kernels;
  for (const LayerSpec& l : spec.encoder.layers) {
    if (l.parallel || !l.counted) continue;
    if (l.kind == LayerKind::Conv || l.kind == LayerKind::Patchify) {
      ++r.n_conv;
      if (l.kernel > 1) kernels.insert(l.kernel);
    }
  }
  if (kernels.size() == 1) r.kernel = *kernels.begin();
  return r;
}

}  // namespace tsrlab
