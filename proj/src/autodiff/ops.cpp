// Copyright 2026 The thzsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "thz/autodiff/ops.hpp"

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "thz/common/errors.hpp"

namespace thz::ad {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvDims {
  std::size_t batch, in, length, out, kernel, out_length;
};

// Patch matrix: one row per (b, output position), one column per (ci, k).
template <typename T>
RowMat<T> im2row(const Tensor<T>& x, const ConvDims& d, ConvGeometry g) {
  RowMat<T> patches(d.batch * d.out_length, d.in * d.kernel);
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  const auto len = static_cast<std::ptrdiff_t>(d.length);
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t l = 0; l < d.out_length; ++l) {
      T* row = patches.data() + (b * d.out_length + l) * d.in * d.kernel;
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(l * g.stride) - pad;
      for (std::size_t ci = 0; ci < d.in; ++ci) {
        const T* src = x.data() + (b * d.in + ci) * d.length;
        T* dst = row + ci * d.kernel;
        for (std::size_t k = 0; k < d.kernel; ++k) {
          const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(k);
          dst[k] = (idx >= 0 && idx < len) ? src[idx] : T{0};
        }
      }
    }
  }
  return patches;
}

template <typename T>
void row2im_add(const RowMat<T>& patches, Tensor<T>& dx, const ConvDims& d, ConvGeometry g) {
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  const auto len = static_cast<std::ptrdiff_t>(d.length);
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t l = 0; l < d.out_length; ++l) {
      const T* row = patches.data() + (b * d.out_length + l) * d.in * d.kernel;
      const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(l * g.stride) - pad;
      for (std::size_t ci = 0; ci < d.in; ++ci) {
        T* dst = dx.data() + (b * d.in + ci) * d.length;
        const T* src = row + ci * d.kernel;
        for (std::size_t k = 0; k < d.kernel; ++k) {
          const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(k);
          if (idx >= 0 && idx < len) dst[idx] += src[k];
        }
      }
    }
  }
}

Shape channel_param_shape(std::size_t channels) { return Shape{1, channels, 1}; }

}  // namespace

std::size_t conv_output_length(std::size_t length, std::size_t kernel, ConvGeometry geom) {
  if (geom.stride == 0) throw ConfigError("conv1d: stride must be >= 1");
  if (kernel == 0) throw ConfigError("conv1d: kernel size must be >= 1");
  const std::size_t padded = length + 2 * geom.padding;
  if (padded < kernel) {
    throw ShapeError("conv1d: kernel " + std::to_string(kernel) +
                     " does not fit input length " + std::to_string(length) +
                     " with padding " + std::to_string(geom.padding));
  }
  return (padded - kernel) / geom.stride + 1;
}

template <typename T>
Var conv1d(Tape<T>& tape, Var x, Var weight, std::optional<Var> bias, ConvGeometry geom) {
  const Shape xs = tape.value(x).shape();
  const Shape ws = tape.value(weight).shape();
  if (xs.channels != ws.channels) {
    throw ShapeError("conv1d: input " + xs.str() + " has " + std::to_string(xs.channels) +
                     " channels but weight " + ws.str() + " expects " +
                     std::to_string(ws.channels));
  }
  const ConvDims d{xs.batch, xs.channels, xs.length, ws.batch, ws.length,
                   conv_output_length(xs.length, ws.length, geom)};
  if (bias) {
    require_same_shape(tape.value(*bias).shape(), channel_param_shape(d.out), "conv1d bias");
  }

  const RowMat<T> patches = im2row(tape.value(x), d, geom);
  Eigen::Map<const RowMat<T>> w(tape.value(weight).data(), d.out, d.in * d.kernel);
  const RowMat<T> rows = patches * w.transpose();  // (batch*out_length, out)

  Tensor<T> y(Shape{d.batch, d.out, d.out_length});
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t l = 0; l < d.out_length; ++l) {
      const T* r = rows.data() + (b * d.out_length + l) * d.out;
      for (std::size_t co = 0; co < d.out; ++co) y.at(b, co, l) = r[co];
    }
  }
  if (bias) {
    const Tensor<T>& bv = tape.value(*bias);
    for (std::size_t b = 0; b < d.batch; ++b)
      for (std::size_t co = 0; co < d.out; ++co)
        for (std::size_t l = 0; l < d.out_length; ++l) y.at(b, co, l) += bv[co];
  }

  std::vector<Var> parents{x, weight};
  if (bias) parents.push_back(*bias);
  return tape.record(std::move(y), std::move(parents),
                     [x, weight, bias, geom, d](Tape<T>& t, std::size_t self) {
    const Tensor<T>& dy = t.grad_at(self);
    RowMat<T> drows(d.batch * d.out_length, d.out);
    for (std::size_t b = 0; b < d.batch; ++b)
      for (std::size_t l = 0; l < d.out_length; ++l) {
        T* r = drows.data() + (b * d.out_length + l) * d.out;
        for (std::size_t co = 0; co < d.out; ++co) r[co] = dy.at(b, co, l);
      }

    if (bias) {
      if (Tensor<T>* db = t.grad_buffer(*bias)) {
        for (std::size_t co = 0; co < d.out; ++co) (*db)[co] += drows.col(co).sum();
      }
    }
    if (Tensor<T>* dw = t.grad_buffer(weight)) {
      const RowMat<T> patches = im2row(t.value(x), d, geom);
      Eigen::Map<RowMat<T>> dwm(dw->data(), d.out, d.in * d.kernel);
      dwm.noalias() += drows.transpose() * patches;
    }
    if (Tensor<T>* dx = t.grad_buffer(x)) {
      Eigen::Map<const RowMat<T>> w(t.value(weight).data(), d.out, d.in * d.kernel);
      const RowMat<T> dpatches = drows * w;
      row2im_add(dpatches, *dx, d, geom);
    }
  });
}

template <typename T>
Var batch_norm(Tape<T>& tape, Var x, Var gamma, Var beta, BatchNormStats<T>& stats,
               const BatchNormOptions& opts) {
  const Tensor<T>& xv = tape.value(x);
  const Shape s = xv.shape();
  const std::size_t channels = s.channels;
  require_same_shape(tape.value(gamma).shape(), channel_param_shape(channels), "batch_norm gamma");
  require_same_shape(tape.value(beta).shape(), channel_param_shape(channels), "batch_norm beta");
  const std::size_t n = s.batch * s.length;

  std::vector<T> mean(channels), inv_std(channels);
  if (opts.training) {
    if (n < 2) {
      throw ConfigError("batch_norm: training mode needs batch*length >= 2, got " +
                        std::to_string(n));
    }
    if (!stats.initialized) {
      stats.running_mean.assign(channels, T{0});
      stats.running_var.assign(channels, T{1});
    }
    for (std::size_t c = 0; c < channels; ++c) {
      double sum = 0.0;
      for (std::size_t b = 0; b < s.batch; ++b)
        for (std::size_t l = 0; l < s.length; ++l) sum += xv.at(b, c, l);
      const double mu = sum / static_cast<double>(n);
      double sq = 0.0;
      for (std::size_t b = 0; b < s.batch; ++b)
        for (std::size_t l = 0; l < s.length; ++l) {
          const double dlt = xv.at(b, c, l) - mu;
          sq += dlt * dlt;
        }
      const double var = sq / static_cast<double>(n);
      mean[c] = static_cast<T>(mu);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + opts.eps));
      const double unbiased = sq / static_cast<double>(n - 1);
      stats.running_mean[c] = static_cast<T>(opts.momentum * stats.running_mean[c] +
                                             (1.0 - opts.momentum) * mu);
      stats.running_var[c] = static_cast<T>(opts.momentum * stats.running_var[c] +
                                            (1.0 - opts.momentum) * unbiased);
    }
    stats.initialized = true;
  } else {
    if (!stats.initialized || stats.running_mean.size() != channels) {
      throw ConfigError("batch_norm: eval mode before any training update (running statistics "
                        "uninitialized)");
    }
    for (std::size_t c = 0; c < channels; ++c) {
      mean[c] = stats.running_mean[c];
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(stats.running_var[c]) +
                                                  opts.eps));
    }
  }

  const Tensor<T>& g = tape.value(gamma);
  const Tensor<T>& bt = tape.value(beta);
  Tensor<T> xhat(s);
  Tensor<T> y(s);
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t l = 0; l < s.length; ++l) {
        const T h = (xv.at(b, c, l) - mean[c]) * inv_std[c];
        xhat.at(b, c, l) = h;
        y.at(b, c, l) = g[c] * h + bt[c];
      }

  const bool training = opts.training;
  return tape.record(std::move(y), {x, gamma, beta},
                     [x, gamma, beta, training, inv_std = std::move(inv_std),
                      xhat = std::move(xhat)](Tape<T>& t, std::size_t self) {
    const Tensor<T>& dy = t.grad_at(self);
    const Shape s = dy.shape();
    const std::size_t channels = s.channels;
    const double n = static_cast<double>(s.batch * s.length);
    std::vector<double> sum_dy(channels, 0.0), sum_dy_xhat(channels, 0.0);
    for (std::size_t b = 0; b < s.batch; ++b)
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t l = 0; l < s.length; ++l) {
          sum_dy[c] += dy.at(b, c, l);
          sum_dy_xhat[c] += static_cast<double>(dy.at(b, c, l)) * xhat.at(b, c, l);
        }
    if (Tensor<T>* dg = t.grad_buffer(gamma))
      for (std::size_t c = 0; c < channels; ++c) (*dg)[c] += static_cast<T>(sum_dy_xhat[c]);
    if (Tensor<T>* dbt = t.grad_buffer(beta))
      for (std::size_t c = 0; c < channels; ++c) (*dbt)[c] += static_cast<T>(sum_dy[c]);
    if (Tensor<T>* dx = t.grad_buffer(x)) {
      const Tensor<T>& g = t.value(gamma);
      for (std::size_t b = 0; b < s.batch; ++b)
        for (std::size_t c = 0; c < channels; ++c) {
          const T scale = g[c] * inv_std[c];
          for (std::size_t l = 0; l < s.length; ++l) {
            if (training) {
              const double v = (n * dy.at(b, c, l) - sum_dy[c] -
                                static_cast<double>(xhat.at(b, c, l)) * sum_dy_xhat[c]) /
                               n;
              dx->at(b, c, l) += static_cast<T>(scale * v);
            } else {
              dx->at(b, c, l) += scale * dy.at(b, c, l);
            }
          }
        }
    }
  });
}

template <typename T>
Var prelu(Tape<T>& tape, Var x, Var slope) {
  const Tensor<T>& xv = tape.value(x);
  const Shape s = xv.shape();
  require_same_shape(tape.value(slope).shape(), channel_param_shape(s.channels), "prelu slope");
  const Tensor<T>& a = tape.value(slope);
  Tensor<T> y(s);
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t l = 0; l < s.length; ++l) {
        const T v = xv.at(b, c, l);
        y.at(b, c, l) = v >= T{0} ? v : a[c] * v;
      }
  return tape.record(std::move(y), {x, slope}, [x, slope](Tape<T>& t, std::size_t self) {
    const Tensor<T>& dy = t.grad_at(self);
    const Tensor<T>& xv = t.value(x);
    const Tensor<T>& a = t.value(slope);
    const Shape s = xv.shape();
    Tensor<T>* dx = t.grad_buffer(x);
    Tensor<T>* da = t.grad_buffer(slope);
    for (std::size_t b = 0; b < s.batch; ++b)
      for (std::size_t c = 0; c < s.channels; ++c) {
        T acc{0};
        for (std::size_t l = 0; l < s.length; ++l) {
          const T v = xv.at(b, c, l);
          const T g = dy.at(b, c, l);
          if (v >= T{0}) {
            if (dx) dx->at(b, c, l) += g;
          } else {
            if (dx) dx->at(b, c, l) += a[c] * g;
            acc += g * v;
          }
        }
        if (da) (*da)[c] += acc;
      }
  });
}

template <typename T>
Var add(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  require_same_shape(av.shape(), bv.shape(), "add");
  Tensor<T> y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  return tape.record(std::move(y), {a, b}, [a, b](Tape<T>& t, std::size_t self) {
    const Tensor<T>& dy = t.grad_at(self);
    for (Var p : {a, b}) {
      if (Tensor<T>* dp = t.grad_buffer(p))
        for (std::size_t i = 0; i < dy.size(); ++i) (*dp)[i] += dy[i];
    }
  });
}

template <typename T>
Var reshape(Tape<T>& tape, Var x, Shape shape) {
  Tensor<T> y = tape.value(x).reshaped(shape);
  return tape.record(std::move(y), {x}, [x](Tape<T>& t, std::size_t self) {
    const Tensor<T>& dy = t.grad_at(self);
    if (Tensor<T>* dx = t.grad_buffer(x))
      for (std::size_t i = 0; i < dy.size(); ++i) (*dx)[i] += dy[i];
  });
}

template <typename T>
Var mse_loss(Tape<T>& tape, Var pred, Var target) {
  const Tensor<T>& p = tape.value(pred);
  const Tensor<T>& q = tape.value(target);
  require_same_shape(p.shape(), q.shape(), "mse_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(q[i]);
    acc += d * d;
  }
  const double n = static_cast<double>(p.size());
  Tensor<T> y(Shape{1, 1, 1}, static_cast<T>(acc / n));
  return tape.record(std::move(y), {pred, target}, [pred, target, n](Tape<T>& t, std::size_t self) {
    const T g = t.grad_at(self)[0];
    const Tensor<T>& p = t.value(pred);
    const Tensor<T>& q = t.value(target);
    const T k = static_cast<T>(2.0 / n) * g;
    if (Tensor<T>* dp = t.grad_buffer(pred))
      for (std::size_t i = 0; i < p.size(); ++i) (*dp)[i] += k * (p[i] - q[i]);
    if (Tensor<T>* dq = t.grad_buffer(target))
      for (std::size_t i = 0; i < p.size(); ++i) (*dq)[i] -= k * (p[i] - q[i]);
  });
}

#define THZ_INSTANTIATE_OPS(T)                                                              \
  template Var conv1d<T>(Tape<T>&, Var, Var, std::optional<Var>, ConvGeometry);             \
  template Var batch_norm<T>(Tape<T>&, Var, Var, Var, BatchNormStats<T>&,                   \
                             const BatchNormOptions&);                                      \
  template Var prelu<T>(Tape<T>&, Var, Var);                                                \
  template Var add<T>(Tape<T>&, Var, Var);                                                  \
  template Var reshape<T>(Tape<T>&, Var, Shape);                                            \
  template Var mse_loss<T>(Tape<T>&, Var, Var);

THZ_INSTANTIATE_OPS(float)
THZ_INSTANTIATE_OPS(double)

#undef THZ_INSTANTIATE_OPS

}  // namespace thz::ad
