#pragma once

// Toy-scale neural runtime: instantiates the analyzer's layer-stack specs as
// real (double precision) models with exact gradients, so the geometry and
// loss bookkeeping can be checked empirically.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tsrlab/arch.hpp"
#include "tsrlab/autograd.hpp"
#include "tsrlab/errors.hpp"
#include "tsrlab/tensor.hpp"
#include "tsrlab/token.hpp"

namespace tsrlab::nn {

struct ModelInstance {
  FullModelSpec spec;
  std::vector<std::pair<std::string, Var>> params;  // fixed construction order
  std::uint64_t seed = 0;

  const Var& param(std::string_view name) const {
    for (const auto& [n, v] : params) {
      if (n == name) return v;
    }
    fail(Errc::shape_mismatch, "unknown parameter " + std::string(name));
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& [name, v] : params) n += static_cast<std::size_t>(v->value.numel());
    return n;
  }

  void zero_grad() {
    for (auto& [name, v] : params) {
      if (v->grad.shape == v->value.shape) std::fill(v->grad.data.begin(), v->grad.data.end(), 0.0);
    }
  }
};

namespace detail {

class Init {
 public:
  explicit Init(std::uint64_t seed) : rng_(seed) {}

  Tensor uniform(std::vector<int> shape, double fan_in) {
    Tensor t(std::move(shape));
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : t.data) v = dist(rng_);
    return t;
  }

 private:
  std::mt19937_64 rng_;
};

inline bool instantiable(const LayerSpec& l) {
  return !l.parallel && !l.batch_norm &&
         (l.kind == LayerKind::Conv || l.kind == LayerKind::Patchify ||
          l.kind == LayerKind::Pointwise || l.kind == LayerKind::Identity);
}

inline void add_attention_params(ModelInstance& m, Init& init, const std::string& prefix, int d) {
  for (const char* w : {"wq", "wk", "wv", "wo"}) {
    m.params.emplace_back(prefix + "." + w, parameter(init.uniform({d, d}, d)));
  }
  for (const char* b : {"bq", "bk", "bv", "bo"}) {
    m.params.emplace_back(prefix + "." + b, parameter(Tensor::zeros({d})));
  }
}

inline void add_norm_params(ModelInstance& m, const std::string& prefix, int d) {
  m.params.emplace_back(prefix + ".gamma", parameter(Tensor::full({d}, 1.0)));
  m.params.emplace_back(prefix + ".beta", parameter(Tensor::zeros({d})));
}

inline void add_ffn_params(ModelInstance& m, Init& init, const std::string& prefix, int d, int ff) {
  m.params.emplace_back(prefix + ".w1", parameter(init.uniform({d, ff}, d)));
  m.params.emplace_back(prefix + ".b1", parameter(Tensor::zeros({ff})));
  m.params.emplace_back(prefix + ".w2", parameter(init.uniform({ff, d}, ff)));
  m.params.emplace_back(prefix + ".b2", parameter(Tensor::zeros({d})));
}

}  // namespace detail

/// Builds and initializes a model. Only bias-carrying conv/patchify stacks
/// are instantiable; pooling, resampling and norm-folded layers live in the
/// analyzer only. Weights are uniform +-1/sqrt(fan_in) from the given seed,
/// biases zero.
inline ModelInstance make_model(const FullModelSpec& spec, std::uint64_t seed) {
  if (spec.d_model % spec.heads != 0) fail(Errc::shape_mismatch, "d_model must split across heads");
  if (spec.d_model % 4 != 0) fail(Errc::shape_mismatch, "d_model must be a multiple of 4");
  ModelInstance m;
  m.spec = spec;
  m.seed = seed;
  detail::Init init(seed);

  int idx = 0;
  for (const LayerSpec& l : spec.encoder.layers) {
    if (!detail::instantiable(l)) {
      fail(Errc::unsupported_layer,
           spec.encoder.name + ": layer " + std::to_string(idx) + " is analyzer-only");
    }
    if (l.kind != LayerKind::Identity) {
      const std::string prefix = "encoder.conv" + std::to_string(idx);
      m.params.emplace_back(prefix + ".weight",
                            parameter(init.uniform({l.out_channels, l.in_channels, l.kernel, l.kernel},
                                                   static_cast<double>(l.in_channels) * l.kernel * l.kernel)));
      if (l.bias) m.params.emplace_back(prefix + ".bias", parameter(Tensor::zeros({l.out_channels})));
    }
    ++idx;
  }
  for (int l = 0; l < spec.n_encoder_layers; ++l) {
    const std::string p = "tf_enc" + std::to_string(l);
    detail::add_attention_params(m, init, p + ".attn", spec.d_model);
    detail::add_norm_params(m, p + ".norm1", spec.d_model);
    detail::add_ffn_params(m, init, p + ".ffn", spec.d_model, spec.d_ff);
    detail::add_norm_params(m, p + ".norm2", spec.d_model);
  }
  for (int l = 0; l < spec.n_decoder_layers; ++l) {
    const std::string p = "tf_dec" + std::to_string(l);
    detail::add_attention_params(m, init, p + ".self", spec.d_model);
    detail::add_norm_params(m, p + ".norm1", spec.d_model);
    detail::add_attention_params(m, init, p + ".cross", spec.d_model);
    detail::add_norm_params(m, p + ".norm2", spec.d_model);
    detail::add_ffn_params(m, init, p + ".ffn", spec.d_model, spec.d_ff);
    detail::add_norm_params(m, p + ".norm3", spec.d_model);
  }
  m.params.emplace_back("embedding.weight",
                        parameter(init.uniform({spec.vocab, spec.d_model}, spec.d_model)));
  m.params.emplace_back("head.weight", parameter(init.uniform({spec.d_model, spec.vocab}, spec.d_model)));
  m.params.emplace_back("head.bias", parameter(Tensor::zeros({spec.vocab})));
  return m;
}

// ---------------------------------------------------------------------------
// Positional encodings (fixed sinusoids; zero learnable scalars)
// ---------------------------------------------------------------------------

inline Tensor sincos_1d(int length, int d) {
  if (d % 2 != 0) fail(Errc::shape_mismatch, "sinusoidal encoding needs even width");
  Tensor pe({length, d});
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < d / 2; ++i) {
      const double div = std::pow(10000.0, (2.0 * i) / d);
      pe.at2(pos, 2 * i) = std::sin(pos / div);
      pe.at2(pos, 2 * i + 1) = std::cos(pos / div);
    }
  }
  return pe;
}

/// Row/column halves concatenated per flattened position (row-major).
inline Tensor sincos_2d(int h, int w, int d) {
  if (d % 4 != 0) fail(Errc::shape_mismatch, "2d sinusoidal encoding needs d % 4 == 0");
  const Tensor rows = sincos_1d(h, d / 2);
  const Tensor cols = sincos_1d(w, d / 2);
  Tensor pe({h * w, d});
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int i = 0; i < d / 2; ++i) {
        pe.at2(r * w + c, i) = rows.at2(r, i);
        pe.at2(r * w + c, d / 2 + i) = cols.at2(c, i);
      }
    }
  }
  return pe;
}

// ---------------------------------------------------------------------------
// Forward passes
// ---------------------------------------------------------------------------

struct ForwardOptions {
  double dropout = 0.0;           // residual-path dropout rate
  std::mt19937_64* rng = nullptr; // required when dropout > 0
};

namespace detail {

inline Var maybe_dropout(const Var& x, const ForwardOptions& opts) {
  if (opts.dropout <= 0.0) return x;
  if (opts.rng == nullptr) fail(Errc::shape_mismatch, "dropout needs an RNG");
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Tensor mask = x->value;
  const double keep = 1.0 - opts.dropout;
  for (double& v : mask.data) v = dist(*opts.rng) < keep ? 1.0 / keep : 0.0;
  return dropout_mask(x, std::move(mask));
}

inline Var multihead(const ModelInstance& m, const std::string& prefix, const Var& q_in,
                     const Var& kv_in, const Tensor* mask) {
  const int d = m.spec.d_model;
  const int heads = m.spec.heads;
  const int dh = d / heads;
  const Var q = add_bias(matmul(q_in, m.param(prefix + ".wq")), m.param(prefix + ".bq"));
  const Var k = add_bias(matmul(kv_in, m.param(prefix + ".wk")), m.param(prefix + ".bk"));
  const Var v = add_bias(matmul(kv_in, m.param(prefix + ".wv")), m.param(prefix + ".bv"));
  std::vector<Var> per_head;
  per_head.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const Var qh = slice_cols(q, h * dh, dh);
    const Var kh = slice_cols(k, h * dh, dh);
    const Var vh = slice_cols(v, h * dh, dh);
    Var scores = scale(matmul_nt(qh, kh), 1.0 / std::sqrt(static_cast<double>(dh)));
    if (mask != nullptr) scores = add_const(scores, *mask);
    per_head.push_back(matmul(softmax_rows(scores), vh));
  }
  return add_bias(matmul(concat_cols(per_head), m.param(prefix + ".wo")), m.param(prefix + ".bo"));
}

inline Var ffn(const ModelInstance& m, const std::string& prefix, const Var& x) {
  const Var h = relu(add_bias(matmul(x, m.param(prefix + ".w1")), m.param(prefix + ".b1")));
  return add_bias(matmul(h, m.param(prefix + ".w2")), m.param(prefix + ".b2"));
}

inline Var norm(const ModelInstance& m, const std::string& prefix, const Var& x) {
  return layer_norm(x, m.param(prefix + ".gamma"), m.param(prefix + ".beta"));
}

inline Var encoder_layer(const ModelInstance& m, int l, Var x, const ForwardOptions& opts) {
  const std::string p = "tf_enc" + std::to_string(l);
  x = norm(m, p + ".norm1", add(x, maybe_dropout(multihead(m, p + ".attn", x, x, nullptr), opts)));
  x = norm(m, p + ".norm2", add(x, maybe_dropout(ffn(m, p + ".ffn", x), opts)));
  return x;
}

inline Var decoder_layer(const ModelInstance& m, int l, Var x, const Var& memory,
                         const Tensor& causal, const ForwardOptions& opts) {
  const std::string p = "tf_dec" + std::to_string(l);
  x = norm(m, p + ".norm1", add(x, maybe_dropout(multihead(m, p + ".self", x, x, &causal), opts)));
  x = norm(m, p + ".norm2", add(x, maybe_dropout(multihead(m, p + ".cross", x, memory, nullptr), opts)));
  x = norm(m, p + ".norm3", add(x, maybe_dropout(ffn(m, p + ".ffn", x), opts)));
  return x;
}

/// Conv/patchify stack only; ReLU between convolutions, none after the
/// projection that feeds the transformer.
inline Var spatial_stage(const ModelInstance& m, const Var& image) {
  Var x = image;
  int idx = 0;
  const int last = static_cast<int>(m.spec.encoder.layers.size()) - 1;
  for (const LayerSpec& l : m.spec.encoder.layers) {
    if (l.kind != LayerKind::Identity) {
      const std::string prefix = "encoder.conv" + std::to_string(idx);
      const Var w = m.param(prefix + ".weight");
      const Var b = l.bias ? m.param(prefix + ".bias") : Var{};
      x = conv2d(x, w, b, l.stride, l.padding);
      if (l.kind == LayerKind::Conv && idx != last) x = relu(x);
    }
    ++idx;
  }
  return x;
}

inline Tensor causal_mask(int length) {
  Tensor mask({length, length});
  for (int i = 0; i < length; ++i) {
    for (int j = i + 1; j < length; ++j) mask.at2(i, j) = -1e9;
  }
  return mask;
}

}  // namespace detail

/// Image [C,H,W] -> encoder memory [N, d]: spatial stage, flatten, 2D
/// positional encoding, transformer encoder stack.
inline Var forward_encode(const ModelInstance& m, const Tensor& image,
                          const ForwardOptions& opts = {}) {
  const EncoderSpec& e = m.spec.encoder;
  if (image.ndim() != 3 || image.dim(1) != e.input_h || image.dim(2) != e.input_w) {
    fail(Errc::shape_mismatch, "image does not match the encoder input size");
  }
  Var x = detail::spatial_stage(m, constant(image));
  if (x->value.dim(0) != m.spec.d_model) {
    fail(Errc::shape_mismatch, "spatial stage must end at d_model channels");
  }
  const int h = x->value.dim(1), w = x->value.dim(2);
  Var tokens = add_const(flatten_hw(x), sincos_2d(h, w, m.spec.d_model));
  for (int l = 0; l < m.spec.n_encoder_layers; ++l) {
    tokens = detail::encoder_layer(m, l, tokens, opts);
  }
  return tokens;
}

inline Tensor forward_encode_values(const ModelInstance& m, const Tensor& image) {
  return forward_encode(m, image)->value;
}

/// Teacher-forced decoder pass over the given input ids -> [L, vocab] logits.
inline Var decode_logits(const ModelInstance& m, const Var& memory, const std::vector<int>& ids,
                         const ForwardOptions& opts = {}) {
  const int L = static_cast<int>(ids.size());
  Var x = add_const(embed(m.param("embedding.weight"), ids), sincos_1d(L, m.spec.d_model));
  const Tensor causal = detail::causal_mask(L);
  for (int l = 0; l < m.spec.n_decoder_layers; ++l) {
    x = detail::decoder_layer(m, l, x, memory, causal, opts);
  }
  return add_bias(matmul(x, m.param("head.weight")), m.param("head.bias"));
}

/// Mean autoregressive cross-entropy of the ground-truth continuation
/// (positions 2..n), teacher-forced; <pad> targets are excluded.
inline Var loss_var(const ModelInstance& m, const Tensor& image, const TokenSequence& gt,
                    const ForwardOptions& opts = {}) {
  if (gt.size() < 2) fail(Errc::empty_sequence, "need at least <sos> plus one target");
  if (gt[0].kind != TokenKind::Sos) fail(Errc::shape_mismatch, "sequence must start with <sos>");
  std::vector<int> input_ids, targets;
  std::vector<bool> valid;
  for (std::size_t i = 0; i + 1 < gt.size(); ++i) {
    input_ids.push_back(gt[i].id());
    targets.push_back(gt[i + 1].id());
    valid.push_back(gt[i + 1].kind != TokenKind::Pad);
  }
  const Var memory = forward_encode(m, image, opts);
  const Var logits = decode_logits(m, memory, input_ids, opts);
  return cross_entropy_mean(logits, std::move(targets), std::move(valid));
}

inline double loss(const ModelInstance& m, const Tensor& image, const TokenSequence& gt) {
  return loss_var(m, image, gt)->value.data[0];
}

/// Argmax decoding from <sos>; stops at <eos> or max_len. Ties resolve to the
/// lowest token id, so output depends only on parameters and image.
inline TokenSequence greedy_decode(const ModelInstance& m, const Tensor& image, int max_len) {
  max_len = std::min<int>(max_len, m.spec.max_len);
  TokenSequence out;
  out.bound = static_cast<std::size_t>(std::max(max_len, 1));
  out.append(Token(TokenKind::Sos));
  if (max_len <= 1) return out;
  const Var memory = forward_encode(m, image);
  std::vector<int> ids{Token(TokenKind::Sos).id()};
  while (static_cast<int>(out.size()) < max_len) {
    const Var logits = decode_logits(m, memory, ids);
    const int last = logits->value.dim(0) - 1;
    int best = 0;
    for (int j = 1; j < logits->value.dim(1); ++j) {
      if (logits->value.at2(last, j) > logits->value.at2(last, best)) best = j;
    }
    out.append(Token::from_id(best));
    ids.push_back(best);
    if (best == Token(TokenKind::Eos).id()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Receptive-field probe
// ---------------------------------------------------------------------------

/// Bounding box of input pixels whose gradient w.r.t. one spatial output
/// position is nonzero, measured on a positive-weight copy of the conv stack
/// (no cancellation, ReLUs transparent). Architectural reach, not effective
/// field.
inline PixelBox empirical_rf(const ModelInstance& m, int out_r, int out_c) {
  if (m.spec.encoder.layers.empty()) fail(Errc::unsupported_layer, "no spatial stage to probe");
  ModelInstance probe;
  probe.spec = m.spec;
  probe.seed = m.seed;
  for (const auto& [name, v] : m.params) {
    Tensor t = v->value;
    if (name.find("encoder.conv") == 0) {
      for (double& x : t.data) x = std::abs(x) + 0.05;
    }
    probe.params.emplace_back(name, parameter(std::move(t)));
  }
  Var image = parameter(Tensor::full({m.spec.encoder.layers.front().in_channels,
                                      m.spec.encoder.input_h, m.spec.encoder.input_w},
                                     1.0));
  Var features = detail::spatial_stage(probe, image);
  if (out_r < 0 || out_r >= features->value.dim(1) || out_c < 0 ||
      out_c >= features->value.dim(2)) {
    fail(Errc::shape_mismatch, "probe position outside the feature map");
  }
  backward(sum_channels_at(features, out_r, out_c));

  const int C = image->value.dim(0), H = image->value.dim(1), W = image->value.dim(2);
  PixelBox box{H, -1, W, -1};
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < H; ++i) {
      for (int j = 0; j < W; ++j) {
        if (image->grad.at3(c, i, j) != 0.0) {
          box.r0 = std::min(box.r0, i);
          box.r1 = std::max(box.r1, i);
          box.c0 = std::min(box.c0, j);
          box.c1 = std::max(box.c1, j);
        }
      }
    }
  }
  return box;
}

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

/// Central finite differences (step 1e-5) against the analytic gradients, on
/// up to 100 coordinates per parameter group. Returns the worst
/// |a - n| / max(|a| + |n|, 1e-3).
inline double grad_check(ModelInstance& m, const Tensor& image, const TokenSequence& gt,
                         int coords_per_group = 100, double step = 1e-5) {
  m.zero_grad();
  backward(loss_var(m, image, gt));

  std::mt19937_64 rng(m.seed ^ 0x9e3779b97f4a7c15ull);
  double worst = 0.0;
  for (auto& [name, p] : m.params) {
    const std::int64_t n = p->value.numel();
    std::vector<std::int64_t> picks;
    if (n <= coords_per_group) {
      for (std::int64_t i = 0; i < n; ++i) picks.push_back(i);
    } else {
      std::uniform_int_distribution<std::int64_t> dist(0, n - 1);
      for (int i = 0; i < coords_per_group; ++i) picks.push_back(dist(rng));
    }
    p->ensure_grad();
    for (std::int64_t i : picks) {
      const double saved = p->value.data[static_cast<std::size_t>(i)];
      p->value.data[static_cast<std::size_t>(i)] = saved + step;
      const double up = loss(m, image, gt);
      p->value.data[static_cast<std::size_t>(i)] = saved - step;
      const double down = loss(m, image, gt);
      p->value.data[static_cast<std::size_t>(i)] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p->grad.data[static_cast<std::size_t>(i)];
      const double rel = std::abs(analytic - numeric) /
                         std::max(std::abs(analytic) + std::abs(numeric), 1e-3);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct ToySample {
  Tensor image;
  TokenSequence target;
};

struct TrainConfig {
  double lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double dropout = 0.0;
};

/// Full-batch AdamW (decoupled weight decay) loop; returns the loss before
/// each update. Deterministic for a fixed model seed and config.
inline std::vector<double> train_toy(ModelInstance& m, const std::vector<ToySample>& samples,
                                     int steps, const TrainConfig& cfg = {}) {
  if (samples.empty()) fail(Errc::empty_input, "no training samples");
  if (samples.size() > 64) fail(Errc::shape_mismatch, "toy trainer caps at 64 samples");

  std::vector<Tensor> m1, m2;
  for (const auto& [name, p] : m.params) {
    m1.push_back(Tensor::zeros(p->value.shape));
    m2.push_back(Tensor::zeros(p->value.shape));
  }
  std::mt19937_64 dropout_rng(m.seed + 1);
  ForwardOptions opts;
  opts.dropout = cfg.dropout;
  opts.rng = &dropout_rng;

  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(steps));
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (int step = 1; step <= steps; ++step) {
    m.zero_grad();
    double mean_loss = 0.0;
    for (const ToySample& s : samples) {
      const Var l = loss_var(m, s.image, s.target, opts);
      mean_loss += l->value.data[0] * inv_n;
      backward(l, inv_n);
    }
    if (!std::isfinite(mean_loss)) {
      fail(Errc::divergence, "loss became non-finite at step " + std::to_string(step));
    }
    losses.push_back(mean_loss);

    const double bc1 = 1.0 - std::pow(cfg.beta1, step);
    const double bc2 = 1.0 - std::pow(cfg.beta2, step);
    for (std::size_t k = 0; k < m.params.size(); ++k) {
      Var& p = m.params[k].second;
      p->ensure_grad();
      for (std::size_t i = 0; i < p->value.data.size(); ++i) {
        const double g = p->grad.data[i];
        m1[k].data[i] = cfg.beta1 * m1[k].data[i] + (1.0 - cfg.beta1) * g;
        m2[k].data[i] = cfg.beta2 * m2[k].data[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = m1[k].data[i] / bc1;
        const double vhat = m2[k].data[i] / bc2;
        p->value.data[i] -=
            cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * p->value.data[i]);
      }
    }
  }
  return losses;
}

}  // namespace tsrlab::nn
