// Copyright 2026 The slsia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/nn/layers.hpp"
#include "slsia/nn/params.hpp"
#include "slsia/nn/tensor.hpp"

namespace slsia::nn {

enum class Mode { Train, Eval };

struct ForwardResult {
  Mode mode = Mode::Eval;
  Tensor input;
  // activations[i] is the output of layer i, shaped [B, out_shape...].
  std::vector<Tensor> activations;
  Tensor probabilities;
  // Backward caches, indexed by layer; empty for layers that need none.
  std::vector<std::vector<std::uint32_t>> argmax;
  std::vector<std::vector<double>> bn_mean;
  std::vector<std::vector<double>> bn_inv_std;

  std::size_t batch_size() const { return input.shape().empty() ? 0 : input.dim(0); }
  const Tensor& layer_input(std::size_t i) const { return i == 0 ? input : activations[i - 1]; }
};

namespace detail {

inline Shape batched(std::size_t b, const Shape& s) {
  Shape out{b};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline void softmax_rows(const Tensor& logits, Tensor& out) {
  const std::size_t b = logits.dim(0), k = logits.row_size();
  out = Tensor({b, k});
  for (std::size_t r = 0; r < b; ++r) {
    const double* z = logits.data() + r * k;
    double* p = out.data() + r * k;
    const double mx = *std::max_element(z, z + k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += (p[j] = std::exp(z[j] - mx));
    for (std::size_t j = 0; j < k; ++j) p[j] /= s;
  }
}

// Where backward writes parameter gradients: one shared row (batch gradient)
// or one row per sample.
struct GradSink {
  std::vector<double>* grads = nullptr;
  std::size_t stride = 0;
  bool per_sample = false;
  double* row(std::size_t b) const { return grads->data() + (per_sample ? b * stride : 0); }
};

}  // namespace detail

inline ForwardResult forward(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch, Mode mode) {
  params.check_matches(spec);
  if (batch.rank() != spec.input_shape().size() + 1 ||
      !std::equal(spec.input_shape().begin(), spec.input_shape().end(), batch.shape().begin() + 1)) {
    throw ConfigError("batch shape " + shape_string(batch.shape()) + " does not match input " +
                      shape_string(spec.input_shape()) + " with a leading batch dimension");
  }
  if (batch.dim(0) == 0) throw InputError("empty batch");
  if (!batch.all_finite()) throw InputError("batch contains non-finite values");

  const std::size_t B = batch.dim(0);
  const std::size_t L = spec.num_layers();
  ForwardResult fr;
  fr.mode = mode;
  fr.input = batch;
  fr.activations.resize(L);
  fr.argmax.resize(L);
  fr.bn_mean.resize(L);
  fr.bn_inv_std.resize(L);

  for (std::size_t li = 0; li < L; ++li) {
    const Tensor& x = fr.layer_input(li);
    const Shape& ishape = spec.layer_input_shape(li);
    const Shape& oshape = spec.layer_output_shape(li);
    Tensor y(detail::batched(B, oshape));
    const std::size_t in_n = shape_size(ishape), out_n = shape_size(oshape);
    const std::size_t blk = spec.first_block_of(li);

    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, Linear>) {
            const double* W = params.block(spec.param_blocks()[blk]).data();
            const double* bias = params.block(spec.param_blocks()[blk + 1]).data();
            for (std::size_t b = 0; b < B; ++b) {
              const double* xr = x.data() + b * in_n;
              double* yr = y.data() + b * out_n;
              for (std::size_t o = 0; o < l.out; ++o) {
                const double* w = W + o * l.in;
                double s = bias[o];
                for (std::size_t i = 0; i < l.in; ++i) s += w[i] * xr[i];
                yr[o] = s;
              }
            }
          } else if constexpr (std::is_same_v<T, Conv2D>) {
            const double* W = params.block(spec.param_blocks()[blk]).data();
            const double* bias = params.block(spec.param_blocks()[blk + 1]).data();
            const std::size_t H = ishape[1], Wd = ishape[2], k = l.kernel;
            const std::size_t OH = oshape[1], OW = oshape[2];
            for (std::size_t b = 0; b < B; ++b) {
              const double* xs = x.data() + b * in_n;
              double* ys = y.data() + b * out_n;
              for (std::size_t o = 0; o < l.out_channels; ++o) {
                double* yo = ys + o * OH * OW;
                std::fill(yo, yo + OH * OW, bias[o]);
                for (std::size_t c = 0; c < l.in_channels; ++c) {
                  const double* xc = xs + c * H * Wd;
                  const double* w = W + ((o * l.in_channels + c) * k) * k;
                  for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v) {
                      const double wv = w[u * k + v];
                      for (std::size_t i = 0; i < OH; ++i) {
                        const double* xrow = xc + (i + u) * Wd + v;
                        double* yrow = yo + i * OW;
                        for (std::size_t j = 0; j < OW; ++j) yrow[j] += wv * xrow[j];
                      }
                    }
                }
              }
            }
          } else if constexpr (std::is_same_v<T, Conv1D>) {
            const double* W = params.block(spec.param_blocks()[blk]).data();
            const double* bias = params.block(spec.param_blocks()[blk + 1]).data();
            const std::size_t len = ishape[1], k = l.kernel, olen = oshape[1];
            for (std::size_t b = 0; b < B; ++b) {
              const double* xs = x.data() + b * in_n;
              double* ys = y.data() + b * out_n;
              for (std::size_t o = 0; o < l.out_channels; ++o) {
                double* yo = ys + o * olen;
                std::fill(yo, yo + olen, bias[o]);
                for (std::size_t c = 0; c < l.in_channels; ++c) {
                  const double* xc = xs + c * len;
                  const double* w = W + (o * l.in_channels + c) * k;
                  for (std::size_t u = 0; u < k; ++u) {
                    const double wv = w[u];
                    for (std::size_t j = 0; j < olen; ++j) yo[j] += wv * xc[j + u];
                  }
                }
              }
            }
          } else if constexpr (std::is_same_v<T, MaxPool2D>) {
            const std::size_t C = ishape[0], H = ishape[1], Wd = ishape[2], k = l.kernel;
            const std::size_t OH = oshape[1], OW = oshape[2];
            auto& am = fr.argmax[li];
            am.resize(B * out_n);
            for (std::size_t b = 0; b < B; ++b)
              for (std::size_t c = 0; c < C; ++c)
                for (std::size_t i = 0; i < OH; ++i)
                  for (std::size_t j = 0; j < OW; ++j) {
                    const std::size_t base = b * in_n + c * H * Wd;
                    std::size_t best = base + (i * k) * Wd + j * k;
                    for (std::size_t u = 0; u < k; ++u)
                      for (std::size_t v = 0; v < k; ++v) {
                        const std::size_t idx = base + (i * k + u) * Wd + (j * k + v);
                        if (x[idx] > x[best]) best = idx;
                      }
                    const std::size_t oi = b * out_n + (c * OH + i) * OW + j;
                    y[oi] = x[best];
                    am[oi] = static_cast<std::uint32_t>(best - b * in_n);
                  }
          } else if constexpr (std::is_same_v<T, MaxPool1D>) {
            const std::size_t C = ishape[0], len = ishape[1], k = l.kernel, olen = oshape[1];
            auto& am = fr.argmax[li];
            am.resize(B * out_n);
            for (std::size_t b = 0; b < B; ++b)
              for (std::size_t c = 0; c < C; ++c)
                for (std::size_t j = 0; j < olen; ++j) {
                  const std::size_t base = b * in_n + c * len + j * k;
                  std::size_t best = base;
                  for (std::size_t u = 1; u < k; ++u)
                    if (x[base + u] > x[best]) best = base + u;
                  const std::size_t oi = b * out_n + c * olen + j;
                  y[oi] = x[best];
                  am[oi] = static_cast<std::uint32_t>(best - b * in_n);
                }
          } else if constexpr (std::is_same_v<T, BatchNorm1D>) {
            const std::size_t C = l.channels, len = ishape.size() == 2 ? ishape[1] : 1;
            const double* gamma = params.block(spec.param_blocks()[blk]).data();
            const double* beta = params.block(spec.param_blocks()[blk + 1]).data();
            auto& mean = fr.bn_mean[li];
            auto& inv_std = fr.bn_inv_std[li];
            mean.assign(C, 0.0);
            inv_std.assign(C, 0.0);
            if (mode == Mode::Train) {
              const double n = static_cast<double>(B * len);
              std::vector<double> var(C, 0.0);
              for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t j = 0; j < len; ++j) mean[c] += x[b * in_n + c * len + j];
              for (auto& m : mean) m /= n;
              for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t j = 0; j < len; ++j) {
                    const double d = x[b * in_n + c * len + j] - mean[c];
                    var[c] += d * d;
                  }
              for (std::size_t c = 0; c < C; ++c) inv_std[c] = 1.0 / std::sqrt(var[c] / n + l.eps);
            } else {
              const std::size_t bb = spec.first_buffer_of(li);
              const double* rm = params.buffer(spec.buffer_blocks()[bb]).data();
              const double* rv = params.buffer(spec.buffer_blocks()[bb + 1]).data();
              for (std::size_t c = 0; c < C; ++c) {
                mean[c] = rm[c];
                inv_std[c] = 1.0 / std::sqrt(rv[c] + l.eps);
              }
            }
            for (std::size_t b = 0; b < B; ++b)
              for (std::size_t c = 0; c < C; ++c)
                for (std::size_t j = 0; j < len; ++j) {
                  const std::size_t idx = b * in_n + c * len + j;
                  y[idx] = gamma[c] * (x[idx] - mean[c]) * inv_std[c] + beta[c];
                }
          } else if constexpr (std::is_same_v<T, ReLU>) {
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
          } else if constexpr (std::is_same_v<T, Flatten>) {
            std::copy(x.values().begin(), x.values().end(), y.data());
          } else if constexpr (std::is_same_v<T, Softmax>) {
            Tensor p;
            detail::softmax_rows(x, p);
            y = std::move(p);
          }
        },
        spec.layers()[li]);
    fr.activations[li] = std::move(y);
  }
  if (spec.has_softmax()) {
    fr.probabilities = fr.activations.back();
  } else {
    detail::softmax_rows(fr.activations.back(), fr.probabilities);
  }
  return fr;
}

// Running statistics after one train-mode forward (momentum update, unbiased
// batch variance). Returns the buffers unchanged when there is no batch norm.
inline std::vector<double> updated_running_stats(const NetworkSpec& spec, const ParamSet& params, const ForwardResult& fr) {
  std::vector<double> buf(params.buffers().begin(), params.buffers().end());
  if (fr.mode != Mode::Train) return buf;
  for (std::size_t li = 0; li < spec.num_layers(); ++li) {
    const auto* bn = std::get_if<BatchNorm1D>(&spec.layers()[li]);
    if (!bn) continue;
    const Shape& ishape = spec.layer_input_shape(li);
    const double n = static_cast<double>(fr.batch_size() * (ishape.size() == 2 ? ishape[1] : 1));
    const std::size_t bb = spec.first_buffer_of(li);
    double* rm = buf.data() + spec.buffer_blocks()[bb].offset;
    double* rv = buf.data() + spec.buffer_blocks()[bb + 1].offset;
    for (std::size_t c = 0; c < bn->channels; ++c) {
      const double inv = fr.bn_inv_std[li][c];
      const double biased = 1.0 / (inv * inv) - bn->eps;
      const double unbiased = n > 1 ? biased * n / (n - 1.0) : biased;
      rm[c] = (1.0 - bn->momentum) * rm[c] + bn->momentum * fr.bn_mean[li][c];
      rv[c] = (1.0 - bn->momentum) * rv[c] + bn->momentum * unbiased;
    }
  }
  return buf;
}

namespace detail {

// Backpropagates d(loss)/d(logits) through layers [0, logits_layer].
inline void backward(const NetworkSpec& spec, const ParamSet& params, const ForwardResult& fr, Tensor grad,
                     const GradSink& sink) {
  const std::size_t B = fr.batch_size();
  for (std::size_t step = spec.logits_layer() + 1; step-- > 0;) {
    const std::size_t li = step;
    const Tensor& x = fr.layer_input(li);
    const Shape& ishape = spec.layer_input_shape(li);
    const Shape& oshape = spec.layer_output_shape(li);
    const std::size_t in_n = shape_size(ishape), out_n = shape_size(oshape);
    const std::size_t blk = spec.first_block_of(li);
    const bool need_dx = li > 0;
    Tensor dx(batched(B, ishape));

    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, Linear>) {
            const auto& wb = spec.param_blocks()[blk];
            const auto& bb = spec.param_blocks()[blk + 1];
            const double* W = params.block(wb).data();
            for (std::size_t b = 0; b < B; ++b) {
              const double* xr = x.data() + b * in_n;
              const double* gr = grad.data() + b * out_n;
              double* g = sink.row(b);
              double* dW = g + wb.offset;
              double* db = g + bb.offset;
              double* dxr = dx.data() + b * in_n;
              for (std::size_t o = 0; o < l.out; ++o) {
                const double go = gr[o];
                if (go == 0.0) continue;
                db[o] += go;
                double* dw = dW + o * l.in;
                const double* w = W + o * l.in;
                for (std::size_t i = 0; i < l.in; ++i) dw[i] += go * xr[i];
                if (need_dx)
                  for (std::size_t i = 0; i < l.in; ++i) dxr[i] += go * w[i];
              }
            }
          } else if constexpr (std::is_same_v<T, Conv2D>) {
            const auto& wb = spec.param_blocks()[blk];
            const auto& bb = spec.param_blocks()[blk + 1];
            const double* W = params.block(wb).data();
            const std::size_t H = ishape[1], Wd = ishape[2], k = l.kernel;
            const std::size_t OH = oshape[1], OW = oshape[2];
            for (std::size_t b = 0; b < B; ++b) {
              const double* xs = x.data() + b * in_n;
              const double* gs = grad.data() + b * out_n;
              double* g = sink.row(b);
              double* dW = g + wb.offset;
              double* db = g + bb.offset;
              double* dxs = dx.data() + b * in_n;
              for (std::size_t o = 0; o < l.out_channels; ++o) {
                const double* go = gs + o * OH * OW;
                double s = 0.0;
                for (std::size_t t = 0; t < OH * OW; ++t) s += go[t];
                db[o] += s;
                for (std::size_t c = 0; c < l.in_channels; ++c) {
                  const double* xc = xs + c * H * Wd;
                  double* dxc = dxs + c * H * Wd;
                  const std::size_t woff = ((o * l.in_channels + c) * k) * k;
                  for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v) {
                      const double wv = W[woff + u * k + v];
                      double acc = 0.0;
                      for (std::size_t i = 0; i < OH; ++i) {
                        const double* xrow = xc + (i + u) * Wd + v;
                        const double* grow = go + i * OW;
                        double* dxrow = dxc + (i + u) * Wd + v;
                        for (std::size_t j = 0; j < OW; ++j) acc += grow[j] * xrow[j];
                        if (need_dx)
                          for (std::size_t j = 0; j < OW; ++j) dxrow[j] += wv * grow[j];
                      }
                      dW[woff + u * k + v] += acc;
                    }
                }
              }
            }
          } else if constexpr (std::is_same_v<T, Conv1D>) {
            const auto& wb = spec.param_blocks()[blk];
            const auto& bb = spec.param_blocks()[blk + 1];
            const double* W = params.block(wb).data();
            const std::size_t len = ishape[1], k = l.kernel, olen = oshape[1];
            for (std::size_t b = 0; b < B; ++b) {
              const double* xs = x.data() + b * in_n;
              const double* gs = grad.data() + b * out_n;
              double* g = sink.row(b);
              double* dW = g + wb.offset;
              double* db = g + bb.offset;
              double* dxs = dx.data() + b * in_n;
              for (std::size_t o = 0; o < l.out_channels; ++o) {
                const double* go = gs + o * olen;
                double s = 0.0;
                for (std::size_t j = 0; j < olen; ++j) s += go[j];
                db[o] += s;
                for (std::size_t c = 0; c < l.in_channels; ++c) {
                  const double* xc = xs + c * len;
                  double* dxc = dxs + c * len;
                  const std::size_t woff = (o * l.in_channels + c) * k;
                  for (std::size_t u = 0; u < k; ++u) {
                    const double wv = W[woff + u];
                    double acc = 0.0;
                    for (std::size_t j = 0; j < olen; ++j) acc += go[j] * xc[j + u];
                    dW[woff + u] += acc;
                    if (need_dx)
                      for (std::size_t j = 0; j < olen; ++j) dxc[j + u] += wv * go[j];
                  }
                }
              }
            }
          } else if constexpr (std::is_same_v<T, MaxPool2D> || std::is_same_v<T, MaxPool1D>) {
            const auto& am = fr.argmax[li];
            for (std::size_t b = 0; b < B; ++b)
              for (std::size_t t = 0; t < out_n; ++t) dx[b * in_n + am[b * out_n + t]] += grad[b * out_n + t];
          } else if constexpr (std::is_same_v<T, BatchNorm1D>) {
            const auto& gb = spec.param_blocks()[blk];
            const auto& bb = spec.param_blocks()[blk + 1];
            const double* gamma = params.block(gb).data();
            const std::size_t C = l.channels, len = ishape.size() == 2 ? ishape[1] : 1;
            const auto& mean = fr.bn_mean[li];
            const auto& inv_std = fr.bn_inv_std[li];
            auto xhat = [&](std::size_t idx, std::size_t c) { return (x[idx] - mean[c]) * inv_std[c]; };
            for (std::size_t b = 0; b < B; ++b) {
              double* g = sink.row(b);
              for (std::size_t c = 0; c < C; ++c)
                for (std::size_t j = 0; j < len; ++j) {
                  const std::size_t idx = b * in_n + c * len + j;
                  g[gb.offset + c] += grad[idx] * xhat(idx, c);
                  g[bb.offset + c] += grad[idx];
                }
            }
            if (fr.mode == Mode::Train) {
              const double n = static_cast<double>(B * len);
              std::vector<double> sum_g(C, 0.0), sum_gx(C, 0.0);
              for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t j = 0; j < len; ++j) {
                    const std::size_t idx = b * in_n + c * len + j;
                    sum_g[c] += grad[idx];
                    sum_gx[c] += grad[idx] * xhat(idx, c);
                  }
              for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t j = 0; j < len; ++j) {
                    const std::size_t idx = b * in_n + c * len + j;
                    dx[idx] = gamma[c] * inv_std[c] / n * (n * grad[idx] - sum_g[c] - xhat(idx, c) * sum_gx[c]);
                  }
            } else {
              for (std::size_t b = 0; b < B; ++b)
                for (std::size_t c = 0; c < C; ++c)
                  for (std::size_t j = 0; j < len; ++j) {
                    const std::size_t idx = b * in_n + c * len + j;
                    dx[idx] = gamma[c] * inv_std[c] * grad[idx];
                  }
            }
          } else if constexpr (std::is_same_v<T, ReLU>) {
            for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? grad[i] : 0.0;
          } else if constexpr (std::is_same_v<T, Flatten>) {
            std::copy(grad.values().begin(), grad.values().end(), dx.data());
          } else {
            throw ConfigError("softmax is folded into the loss and has no standalone backward");
          }
        },
        spec.layers()[li]);
    grad = std::move(dx);
  }
}

inline void check_labels(const NetworkSpec& spec, std::size_t batch, std::span<const int> labels) {
  if (labels.size() != batch) throw InputError("label count does not match batch size");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= spec.num_classes())
      throw InputError("label " + std::to_string(y) + " outside [0, " + std::to_string(spec.num_classes()) + ")");
}

// d(sum of per-sample losses)/d(logits) scaled by `scale`.
inline Tensor logit_grad(const ForwardResult& fr, std::span<const int> labels, double scale) {
  Tensor g = fr.probabilities;
  const std::size_t k = g.row_size();
  for (std::size_t b = 0; b < labels.size(); ++b) {
    g[b * k + static_cast<std::size_t>(labels[b])] -= 1.0;
    for (std::size_t j = 0; j < k; ++j) g[b * k + j] *= scale;
  }
  return g;
}

inline double sample_loss(const ForwardResult& fr, const NetworkSpec& spec, std::size_t b, int y) {
  const Tensor& z = fr.activations[spec.logits_layer()];
  const std::size_t k = z.row_size();
  const double* zr = z.data() + b * k;
  const double mx = *std::max_element(zr, zr + k);
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += std::exp(zr[j] - mx);
  return std::log(s) + mx - zr[static_cast<std::size_t>(y)];
}

}  // namespace detail

struct LossAndGrad {
  double loss = 0.0;
  GradientRecord grad;
  // Batch-norm running statistics after this step (train mode only).
  std::vector<double> running_stats;
};

// Mean cross-entropy over the batch and its gradient for every parameter.
inline LossAndGrad loss_and_grad(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                                 std::span<const int> labels, Mode mode = Mode::Train) {
  detail::check_labels(spec, batch.rank() ? batch.dim(0) : 0, labels);
  ForwardResult fr = forward(spec, params, batch, mode);
  const std::size_t B = fr.batch_size();
  double loss = 0.0;
  for (std::size_t b = 0; b < B; ++b) loss += detail::sample_loss(fr, spec, b, labels[b]);
  std::vector<double> g(spec.num_params(), 0.0);
  detail::backward(spec, params, fr, detail::logit_grad(fr, labels, 1.0 / static_cast<double>(B)),
                   {&g, spec.num_params(), false});
  LossAndGrad out;
  out.loss = loss / static_cast<double>(B);
  out.grad = GradientRecord(std::move(g));
  out.running_stats = updated_running_stats(spec, params, fr);
  return out;
}

// One gradient of the single-sample loss per batch row, from one batched
// forward/backward pass. Undefined for train-mode batch norm, where samples
// are coupled through batch statistics.
inline std::vector<GradientRecord> per_sample_gradients(const NetworkSpec& spec, const ParamSet& params,
                                                        const Tensor& batch, std::span<const int> labels,
                                                        Mode mode = Mode::Train,
                                                        std::vector<double>* losses = nullptr) {
  if (mode == Mode::Train && spec.has_batchnorm()) {
    throw ConfigError("per-sample gradients are undefined for train-mode batch norm");
  }
  detail::check_labels(spec, batch.rank() ? batch.dim(0) : 0, labels);
  ForwardResult fr = forward(spec, params, batch, mode);
  const std::size_t B = fr.batch_size(), P = spec.num_params();
  if (losses) {
    losses->resize(B);
    for (std::size_t b = 0; b < B; ++b) (*losses)[b] = detail::sample_loss(fr, spec, b, labels[b]);
  }
  std::vector<double> g(B * P, 0.0);
  detail::backward(spec, params, fr, detail::logit_grad(fr, labels, 1.0), {&g, P, true});
  std::vector<GradientRecord> out;
  out.reserve(B);
  for (std::size_t b = 0; b < B; ++b) out.emplace_back(std::vector<double>(g.begin() + b * P, g.begin() + (b + 1) * P));
  return out;
}

// Per-sample cross-entropy in eval mode.
inline std::vector<double> per_sample_losses(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                                             std::span<const int> labels) {
  detail::check_labels(spec, batch.rank() ? batch.dim(0) : 0, labels);
  ForwardResult fr = forward(spec, params, batch, Mode::Eval);
  std::vector<double> out(fr.batch_size());
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = detail::sample_loss(fr, spec, b, labels[b]);
  return out;
}

inline std::vector<int> predict_labels(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch) {
  ForwardResult fr = forward(spec, params, batch, Mode::Eval);
  const std::size_t k = fr.probabilities.row_size();
  std::vector<int> out(fr.batch_size());
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double* p = fr.probabilities.data() + b * k;
    out[b] = static_cast<int>(std::max_element(p, p + k) - p);
  }
  return out;
}

// Flattened eval-mode activation of layer `tap`, one row per input.
inline Tensor embed(const NetworkSpec& spec, const ParamSet& params, std::size_t tap, const Tensor& inputs) {
  if (tap >= spec.num_layers()) {
    throw ConfigError("tap " + std::to_string(tap) + " is not a layer of a " + std::to_string(spec.num_layers()) +
                      "-layer network");
  }
  ForwardResult fr = forward(spec, params, inputs, Mode::Eval);
  Tensor out = std::move(fr.activations[tap]);
  const std::size_t n = out.dim(0);
  out.reshape({n, out.size() / n});
  return out;
}

}  // namespace slsia::nn
