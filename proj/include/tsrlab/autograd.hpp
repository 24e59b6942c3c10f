#pragma once

// Minimal reverse-mode autodiff over Tensor. Each op builds one graph node
// holding the forward value and a closure that pushes the node's gradient
// into its parents. Graphs are built per forward pass and freed with the
// last Var handle; parameters are long-lived nodes whose gradients
// accumulate across backward calls until zeroed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "tsrlab/errors.hpp"
#include "tsrlab/tensor.hpp"

namespace tsrlab::nn {

struct Node {
  Tensor value;
  Tensor grad;  // allocated lazily during backward
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backprop;
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.shape != value.shape) grad = Tensor::zeros(value.shape);
  }
};

using Var = std::shared_ptr<Node>;

inline Var constant(Tensor v) {
  auto n = std::make_shared<Node>();
  n->value = std::move(v);
  return n;
}

inline Var parameter(Tensor v) {
  auto n = std::make_shared<Node>();
  n->value = std::move(v);
  n->requires_grad = true;
  return n;
}

namespace detail {

inline Var make_op(Tensor value, std::vector<Var> parents) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  for (const Var& p : n->parents) n->requires_grad = n->requires_grad || p->requires_grad;
  return n;
}

}  // namespace detail

/// Reverse pass from a scalar root. `seed` scales the whole gradient, which
/// lets callers average multi-sample losses without rescaling tensors.
inline void backward(const Var& root, double seed = 1.0) {
  if (root->value.numel() != 1) fail(Errc::shape_mismatch, "backward needs a scalar root");
  // iterative post-order topological sort
  std::vector<Node*> order;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  std::unordered_set<Node*> seen;
  auto visited = [&](Node* n) { return seen.count(n) != 0; };
  seen.reserve(256);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next == 0) {
      if (visited(node)) {
        stack.pop_back();
        continue;
      }
      seen.insert(node);
    }
    if (next < node->parents.size()) {
      Node* parent = node->parents[next].get();
      ++next;
      if (!visited(parent) && parent->requires_grad) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->ensure_grad();
  root->grad.data[0] += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop && (*it)->requires_grad) (*it)->backprop();
  }
}

// ---------------------------------------------------------------------------
// Elementwise and shape ops
// ---------------------------------------------------------------------------

inline Var add(const Var& a, const Var& b) {
  if (!a->value.same_shape(b->value)) fail(Errc::shape_mismatch, "add");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b->value.data[i];
  Var n = detail::make_op(std::move(out), {a, b});
  Node* raw = n.get();
  Node* pa = a.get();
  Node* pb = b.get();
  n->backprop = [raw, pa, pb] {
    for (Node* p : {pa, pb}) {
      if (!p->requires_grad) continue;
      p->ensure_grad();
      for (std::size_t i = 0; i < raw->grad.data.size(); ++i) p->grad.data[i] += raw->grad.data[i];
    }
  };
  return n;
}

/// x + c for a non-learnable tensor (positional encodings, masks).
inline Var add_const(const Var& x, const Tensor& c) {
  if (!x->value.same_shape(c)) fail(Errc::shape_mismatch, "add_const");
  Tensor out = x->value;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += c.data[i];
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px] {
    px->ensure_grad();
    for (std::size_t i = 0; i < raw->grad.data.size(); ++i) px->grad.data[i] += raw->grad.data[i];
  };
  return n;
}

inline Var scale(const Var& x, double c) {
  Tensor out = x->value;
  for (double& v : out.data) v *= c;
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px, c] {
    px->ensure_grad();
    for (std::size_t i = 0; i < raw->grad.data.size(); ++i) px->grad.data[i] += c * raw->grad.data[i];
  };
  return n;
}

inline Var relu(const Var& x) {
  Tensor out = x->value;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px] {
    px->ensure_grad();
    for (std::size_t i = 0; i < raw->grad.data.size(); ++i) {
      if (px->value.data[i] > 0.0) px->grad.data[i] += raw->grad.data[i];
    }
  };
  return n;
}

/// Inverted dropout with an explicit mask drawn by the caller's RNG.
inline Var dropout_mask(const Var& x, Tensor mask) {
  if (!x->value.same_shape(mask)) fail(Errc::shape_mismatch, "dropout_mask");
  Tensor out = x->value;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  auto m = std::make_shared<Tensor>(std::move(mask));
  n->backprop = [raw, px, m] {
    px->ensure_grad();
    for (std::size_t i = 0; i < raw->grad.data.size(); ++i) {
      px->grad.data[i] += m->data[i] * raw->grad.data[i];
    }
  };
  return n;
}

/// [N,d] + bias [d] broadcast over rows.
inline Var add_bias(const Var& x, const Var& b) {
  if (x->value.ndim() != 2 || b->value.ndim() != 1 || x->value.dim(1) != b->value.dim(0)) {
    fail(Errc::shape_mismatch, "add_bias");
  }
  const int rows = x->value.dim(0), cols = x->value.dim(1);
  Tensor out = x->value;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out.at2(i, j) += b->value[static_cast<std::size_t>(j)];
  }
  Var n = detail::make_op(std::move(out), {x, b});
  Node* raw = n.get();
  Node* px = x.get();
  Node* pb = b.get();
  n->backprop = [raw, px, pb, rows, cols] {
    if (px->requires_grad) {
      px->ensure_grad();
      for (std::size_t i = 0; i < raw->grad.data.size(); ++i) px->grad.data[i] += raw->grad.data[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) pb->grad.data[static_cast<std::size_t>(j)] += raw->grad.at2(i, j);
      }
    }
  };
  return n;
}

inline Var slice_cols(const Var& x, int c0, int len) {
  const int rows = x->value.dim(0), cols = x->value.dim(1);
  Tensor out({rows, len});
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < len; ++j) out.at2(i, j) = x->value.at2(i, c0 + j);
  }
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px, c0, len, rows, cols] {
    (void)cols;
    px->ensure_grad();
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < len; ++j) px->grad.at2(i, c0 + j) += raw->grad.at2(i, j);
    }
  };
  return n;
}

inline Var concat_cols(const std::vector<Var>& parts) {
  const int rows = parts.front()->value.dim(0);
  int cols = 0;
  for (const Var& p : parts) cols += p->value.dim(1);
  Tensor out({rows, cols});
  int off = 0;
  for (const Var& p : parts) {
    const int w = p->value.dim(1);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < w; ++j) out.at2(i, off + j) = p->value.at2(i, j);
    }
    off += w;
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  Var n = detail::make_op(std::move(out), std::move(parents));
  Node* raw = n.get();
  n->backprop = [raw, rows] {
    int off = 0;
    for (const Var& p : raw->parents) {
      const int w = p->value.dim(1);
      if (p->requires_grad) {
        p->ensure_grad();
        for (int i = 0; i < rows; ++i) {
          for (int j = 0; j < w; ++j) p->grad.at2(i, j) += raw->grad.at2(i, off + j);
        }
      }
      off += w;
    }
  };
  return n;
}

/// [C,H,W] feature map -> [H*W, C] token rows (row-major spatial order).
inline Var flatten_hw(const Var& x) {
  const int C = x->value.dim(0), H = x->value.dim(1), W = x->value.dim(2);
  Tensor out({H * W, C});
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < H; ++i) {
      for (int j = 0; j < W; ++j) out.at2(i * W + j, c) = x->value.at3(c, i, j);
    }
  }
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px, C, H, W] {
    px->ensure_grad();
    for (int c = 0; c < C; ++c) {
      for (int i = 0; i < H; ++i) {
        for (int j = 0; j < W; ++j) px->grad.at3(c, i, j) += raw->grad.at2(i * W + j, c);
      }
    }
  };
  return n;
}

// ---------------------------------------------------------------------------
// Matrix products
// ---------------------------------------------------------------------------

inline Var matmul(const Var& a, const Var& b) {
  if (a->value.ndim() != 2 || b->value.ndim() != 2 || a->value.dim(1) != b->value.dim(0)) {
    fail(Errc::shape_mismatch, "matmul");
  }
  const int n = a->value.dim(0), k = a->value.dim(1), m = b->value.dim(1);
  Tensor out({n, m});
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < k; ++t) {
      const double av = a->value.at2(i, t);
      if (av == 0.0) continue;
      for (int j = 0; j < m; ++j) out.at2(i, j) += av * b->value.at2(t, j);
    }
  }
  Var node = detail::make_op(std::move(out), {a, b});
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backprop = [raw, pa, pb, n, k, m] {
    if (pa->requires_grad) {
      pa->ensure_grad();  // dA = dY * B^T
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          const double g = raw->grad.at2(i, j);
          if (g == 0.0) continue;
          for (int t = 0; t < k; ++t) pa->grad.at2(i, t) += g * pb->value.at2(t, j);
        }
      }
    }
    if (pb->requires_grad) {
      pb->ensure_grad();  // dB = A^T * dY
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < k; ++t) {
          const double av = pa->value.at2(i, t);
          if (av == 0.0) continue;
          for (int j = 0; j < m; ++j) pb->grad.at2(t, j) += av * raw->grad.at2(i, j);
        }
      }
    }
  };
  return node;
}

/// a [n,k] times b^T for b [m,k] -> [n,m]; attention scores without an
/// explicit transpose.
inline Var matmul_nt(const Var& a, const Var& b) {
  if (a->value.ndim() != 2 || b->value.ndim() != 2 || a->value.dim(1) != b->value.dim(1)) {
    fail(Errc::shape_mismatch, "matmul_nt");
  }
  const int n = a->value.dim(0), k = a->value.dim(1), m = b->value.dim(0);
  Tensor out({n, m});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += a->value.at2(i, t) * b->value.at2(j, t);
      out.at2(i, j) = acc;
    }
  }
  Var node = detail::make_op(std::move(out), {a, b});
  Node* raw = node.get();
  Node* pa = a.get();
  Node* pb = b.get();
  node->backprop = [raw, pa, pb, n, k, m] {
    if (pa->requires_grad) {
      pa->ensure_grad();  // dA = dY * B
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          const double g = raw->grad.at2(i, j);
          if (g == 0.0) continue;
          for (int t = 0; t < k; ++t) pa->grad.at2(i, t) += g * pb->value.at2(j, t);
        }
      }
    }
    if (pb->requires_grad) {
      pb->ensure_grad();  // dB = dY^T * A
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          const double g = raw->grad.at2(i, j);
          if (g == 0.0) continue;
          for (int t = 0; t < k; ++t) pb->grad.at2(j, t) += g * pa->value.at2(i, t);
        }
      }
    }
  };
  return node;
}

// ---------------------------------------------------------------------------
// Normalization, softmax, losses
// ---------------------------------------------------------------------------

inline Var softmax_rows(const Var& x) {
  const int rows = x->value.dim(0), cols = x->value.dim(1);
  Tensor out({rows, cols});
  for (int i = 0; i < rows; ++i) {
    double mx = x->value.at2(i, 0);
    for (int j = 1; j < cols; ++j) mx = std::max(mx, x->value.at2(i, j));
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double e = std::exp(x->value.at2(i, j) - mx);
      out.at2(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < cols; ++j) out.at2(i, j) /= sum;
  }
  Var n = detail::make_op(std::move(out), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px, rows, cols] {
    px->ensure_grad();
    for (int i = 0; i < rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < cols; ++j) dot += raw->grad.at2(i, j) * raw->value.at2(i, j);
      for (int j = 0; j < cols; ++j) {
        px->grad.at2(i, j) += (raw->grad.at2(i, j) - dot) * raw->value.at2(i, j);
      }
    }
  };
  return n;
}

/// Row-wise layer norm with affine rescale: y = gamma * (x - mu)/sigma + beta.
inline Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5) {
  const int rows = x->value.dim(0), cols = x->value.dim(1);
  Tensor out({rows, cols});
  Tensor xhat({rows, cols});
  Tensor inv_sigma({rows});
  for (int i = 0; i < rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < cols; ++j) mean += x->value.at2(i, j);
    mean /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double dv = x->value.at2(i, j) - mean;
      var += dv * dv;
    }
    var /= cols;
    const double is = 1.0 / std::sqrt(var + eps);
    inv_sigma[static_cast<std::size_t>(i)] = is;
    for (int j = 0; j < cols; ++j) {
      const double h = (x->value.at2(i, j) - mean) * is;
      xhat.at2(i, j) = h;
      out.at2(i, j) = gamma->value[static_cast<std::size_t>(j)] * h + beta->value[static_cast<std::size_t>(j)];
    }
  }
  Var n = detail::make_op(std::move(out), {x, gamma, beta});
  Node* raw = n.get();
  Node* px = x.get();
  Node* pg = gamma.get();
  Node* pb = beta.get();
  auto saved_xhat = std::make_shared<Tensor>(std::move(xhat));
  auto saved_is = std::make_shared<Tensor>(std::move(inv_sigma));
  n->backprop = [raw, px, pg, pb, saved_xhat, saved_is, rows, cols] {
    if (pg->requires_grad) {
      pg->ensure_grad();
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
          pg->grad.data[static_cast<std::size_t>(j)] += raw->grad.at2(i, j) * saved_xhat->at2(i, j);
        }
      }
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) pb->grad.data[static_cast<std::size_t>(j)] += raw->grad.at2(i, j);
      }
    }
    if (px->requires_grad) {
      px->ensure_grad();
      for (int i = 0; i < rows; ++i) {
        double sum_g = 0.0, sum_gh = 0.0;
        for (int j = 0; j < cols; ++j) {
          const double gj = raw->grad.at2(i, j) * pg->value[static_cast<std::size_t>(j)];
          sum_g += gj;
          sum_gh += gj * saved_xhat->at2(i, j);
        }
        const double is = (*saved_is)[static_cast<std::size_t>(i)];
        for (int j = 0; j < cols; ++j) {
          const double gj = raw->grad.at2(i, j) * pg->value[static_cast<std::size_t>(j)];
          px->grad.at2(i, j) +=
              is * (gj - sum_g / cols - saved_xhat->at2(i, j) * sum_gh / cols);
        }
      }
    }
  };
  return n;
}

/// Gathers embedding rows for a token id sequence.
inline Var embed(const Var& table, std::vector<int> ids) {
  const int d = table->value.dim(1);
  Tensor out({static_cast<int>(ids.size()), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (int j = 0; j < d; ++j) out.at2(static_cast<int>(i), j) = table->value.at2(ids[i], j);
  }
  Var n = detail::make_op(std::move(out), {table});
  Node* raw = n.get();
  Node* pt = table.get();
  auto saved = std::make_shared<std::vector<int>>(std::move(ids));
  n->backprop = [raw, pt, saved, d] {
    pt->ensure_grad();
    for (std::size_t i = 0; i < saved->size(); ++i) {
      for (int j = 0; j < d; ++j) pt->grad.at2((*saved)[i], j) += raw->grad.at2(static_cast<int>(i), j);
    }
  };
  return n;
}

/// Mean negative log-likelihood over the valid positions (stable log-sum-exp
/// inside). `valid` masks out positions whose target must not be scored.
inline Var cross_entropy_mean(const Var& logits, std::vector<int> targets,
                              std::vector<bool> valid) {
  const int rows = logits->value.dim(0), cols = logits->value.dim(1);
  int n_valid = 0;
  for (bool v : valid) n_valid += v;
  if (rows == 0 || n_valid == 0) fail(Errc::empty_sequence, "no positions to score");

  Tensor probs({rows, cols});
  double total = 0.0;
  for (int i = 0; i < rows; ++i) {
    double mx = logits->value.at2(i, 0);
    for (int j = 1; j < cols; ++j) mx = std::max(mx, logits->value.at2(i, j));
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double e = std::exp(logits->value.at2(i, j) - mx);
      probs.at2(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < cols; ++j) probs.at2(i, j) /= sum;
    if (valid[static_cast<std::size_t>(i)]) {
      total -= logits->value.at2(i, targets[static_cast<std::size_t>(i)]) - mx - std::log(sum);
    }
  }
  Var n = detail::make_op(Tensor::scalar(total / n_valid), {logits});
  Node* raw = n.get();
  Node* pl = logits.get();
  auto saved_probs = std::make_shared<Tensor>(std::move(probs));
  auto saved_targets = std::make_shared<std::vector<int>>(std::move(targets));
  auto saved_valid = std::make_shared<std::vector<bool>>(std::move(valid));
  n->backprop = [raw, pl, saved_probs, saved_targets, saved_valid, rows, cols, n_valid] {
    pl->ensure_grad();
    const double g = raw->grad.data[0] / n_valid;
    for (int i = 0; i < rows; ++i) {
      if (!(*saved_valid)[static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < cols; ++j) {
        const double onehot = j == (*saved_targets)[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
        pl->grad.at2(i, j) += g * (saved_probs->at2(i, j) - onehot);
      }
    }
  };
  return n;
}

// ---------------------------------------------------------------------------
// Convolution
// ---------------------------------------------------------------------------

/// x [Cin,H,W] * w [Cout,Cin,k,k] + b [Cout] with stride/padding; zero padding.
inline Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int padding) {
  const int Cin = x->value.dim(0), H = x->value.dim(1), W = x->value.dim(2);
  const int Cout = w->value.dim(0), k = w->value.dim(2);
  if (w->value.dim(1) != Cin) fail(Errc::shape_mismatch, "conv2d channels");
  const int OH = (H + 2 * padding - k) / stride + 1;
  const int OW = (W + 2 * padding - k) / stride + 1;
  if (OH <= 0 || OW <= 0) fail(Errc::degenerate_output, "conv2d output collapses");

  auto widx = [Cin, k](int o, int c, int i, int j) {
    return ((static_cast<std::size_t>(o) * Cin + c) * k + i) * k + j;
  };
  Tensor out({Cout, OH, OW});
  for (int o = 0; o < Cout; ++o) {
    const double bias = b ? b->value[static_cast<std::size_t>(o)] : 0.0;
    for (int oh = 0; oh < OH; ++oh) {
      for (int ow = 0; ow < OW; ++ow) {
        double acc = bias;
        for (int c = 0; c < Cin; ++c) {
          for (int ki = 0; ki < k; ++ki) {
            const int ih = oh * stride - padding + ki;
            if (ih < 0 || ih >= H) continue;
            for (int kj = 0; kj < k; ++kj) {
              const int iw = ow * stride - padding + kj;
              if (iw < 0 || iw >= W) continue;
              acc += x->value.at3(c, ih, iw) * w->value.data[widx(o, c, ki, kj)];
            }
          }
        }
        out.at3(o, oh, ow) = acc;
      }
    }
  }
  std::vector<Var> parents{x, w};
  if (b) parents.push_back(b);
  Var n = detail::make_op(std::move(out), std::move(parents));
  Node* raw = n.get();
  Node* px = x.get();
  Node* pw = w.get();
  Node* pb = b ? b.get() : nullptr;
  n->backprop = [raw, px, pw, pb, Cin, H, W, Cout, k, OH, OW, stride, padding, widx] {
    if (px->requires_grad) px->ensure_grad();
    if (pw->requires_grad) pw->ensure_grad();
    if (pb && pb->requires_grad) pb->ensure_grad();
    for (int o = 0; o < Cout; ++o) {
      for (int oh = 0; oh < OH; ++oh) {
        for (int ow = 0; ow < OW; ++ow) {
          const double g = raw->grad.at3(o, oh, ow);
          if (g == 0.0) continue;
          if (pb && pb->requires_grad) pb->grad.data[static_cast<std::size_t>(o)] += g;
          for (int c = 0; c < Cin; ++c) {
            for (int ki = 0; ki < k; ++ki) {
              const int ih = oh * stride - padding + ki;
              if (ih < 0 || ih >= H) continue;
              for (int kj = 0; kj < k; ++kj) {
                const int iw = ow * stride - padding + kj;
                if (iw < 0 || iw >= W) continue;
                if (pw->requires_grad) {
                  pw->grad.data[widx(o, c, ki, kj)] += g * px->value.at3(c, ih, iw);
                }
                if (px->requires_grad) {
                  px->grad.at3(c, ih, iw) += g * pw->value.data[widx(o, c, ki, kj)];
                }
              }
            }
          }
        }
      }
    }
  };
  return n;
}

/// Sum over channels of one spatial output position; scalar probe target for
/// receptive-field measurements.
inline Var sum_channels_at(const Var& x, int r, int c) {
  const int C = x->value.dim(0);
  double total = 0.0;
  for (int ch = 0; ch < C; ++ch) total += x->value.at3(ch, r, c);
  Var n = detail::make_op(Tensor::scalar(total), {x});
  Node* raw = n.get();
  Node* px = x.get();
  n->backprop = [raw, px, r, c, C] {
    px->ensure_grad();
    for (int ch = 0; ch < C; ++ch) px->grad.at3(ch, r, c) += raw->grad.data[0];
  };
  return n;
}

}  // namespace tsrlab::nn
