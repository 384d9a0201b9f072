// Copyright 2026 The jointslt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Core>

#include "slt/numcore/tensor.hpp"

namespace slt {

namespace detail {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapMat = Eigen::Map<RowMat<T>>;
template <class T>
using CMapMat = Eigen::Map<const RowMat<T>>;

[[noreturn]] inline void shape_mismatch(const char* op, const Shape& a, const Shape& b) {
  throw Error(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

template <class T>
void require_rank2(const char* op, const Tensor<T>& t) {
  if (t.rank() != 2) throw Error(std::string(op) + ": expected a matrix, got " + shape_str(t.shape()));
}

// Sizes of the dimensions before, at and after `axis`.
inline std::array<std::size_t, 3> split_axis(const Shape& shape, std::size_t axis) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  return {outer, shape[axis], inner};
}

// True when `small` equals the trailing dimensions of `big`.
inline bool is_suffix(const Shape& big, const Shape& small) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

}  // namespace detail

/// C = A·B for A [m,k], B [k,n].
template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_rank2("matmul", a);
  detail::require_rank2("matmul", b);
  if (a.dim(1) != b.dim(0)) detail::shape_mismatch("matmul", a.shape(), b.shape());
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<T> out(m * n);
  detail::MapMat<T>(out.data(), m, n).noalias() =
      detail::CMapMat<T>(a.data().data(), m, k) * detail::CMapMat<T>(b.data().data(), k, n);
  return Tensor<T>::from_op({m, n}, std::move(out), {a, b}, [m, k, n](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    detail::CMapMat<T> g(self.grad.data(), m, n);
    if (pa.requires_grad) {
      detail::MapMat<T>(pa.ensure_grad().data(), m, k).noalias() +=
          g * detail::CMapMat<T>(pb.data.data(), k, n).transpose();
    }
    if (pb.requires_grad) {
      detail::MapMat<T>(pb.ensure_grad().data(), k, n).noalias() +=
          detail::CMapMat<T>(pa.data.data(), m, k).transpose() * g;
    }
  });
}

/// C = A·Bᵀ for A [m,k], B [n,k].
template <class T>
Tensor<T> matmul_bt(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_rank2("matmul_bt", a);
  detail::require_rank2("matmul_bt", b);
  if (a.dim(1) != b.dim(1)) detail::shape_mismatch("matmul_bt", a.shape(), b.shape());
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  std::vector<T> out(m * n);
  detail::MapMat<T>(out.data(), m, n).noalias() =
      detail::CMapMat<T>(a.data().data(), m, k) *
      detail::CMapMat<T>(b.data().data(), n, k).transpose();
  return Tensor<T>::from_op({m, n}, std::move(out), {a, b}, [m, k, n](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    detail::CMapMat<T> g(self.grad.data(), m, n);
    if (pa.requires_grad) {
      detail::MapMat<T>(pa.ensure_grad().data(), m, k).noalias() +=
          g * detail::CMapMat<T>(pb.data.data(), n, k);
    }
    if (pb.requires_grad) {
      detail::MapMat<T>(pb.ensure_grad().data(), n, k).noalias() +=
          g.transpose() * detail::CMapMat<T>(pa.data.data(), m, k);
    }
  });
}

template <class T>
Tensor<T> transpose(const Tensor<T>& a) {
  detail::require_rank2("transpose", a);
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<T> out(m * n);
  detail::MapMat<T>(out.data(), n, m) = detail::CMapMat<T>(a.data().data(), m, n).transpose();
  return Tensor<T>::from_op({n, m}, std::move(out), {a}, [m, n](detail::Node<T>& self) {
    auto& pa = *self.parents[0];
    detail::MapMat<T>(pa.ensure_grad().data(), m, n) +=
        detail::CMapMat<T>(self.grad.data(), n, m).transpose();
  });
}

namespace detail {

// Elementwise a ⊕ b where b is either shape-equal to a or a trailing
// suffix of a's shape (broadcast over the leading dimensions).
template <class T, class Fwd, class DA, class DB>
Tensor<T> binary_broadcast(const char* op, const Tensor<T>& a, const Tensor<T>& b, Fwd fwd,
                           DA da, DB db) {
  if (!is_suffix(a.shape(), b.shape())) shape_mismatch(op, a.shape(), b.shape());
  const std::size_t n = a.numel(), m = b.numel();
  std::vector<T> out(n);
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(ad[i], bd[i % m]);
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b},
                            [n, m, da, db](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) g[i] += da(self.grad[i], pa.data[i], pb.data[i % m]);
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) g[i % m] += db(self.grad[i], pa.data[i], pb.data[i % m]);
    }
  });
}

}  // namespace detail

/// a + b, with b shape-equal to a or broadcast over a's leading dimensions.
template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return detail::binary_broadcast(
      "add", a, b, [](T x, T y) { return x + y; }, [](T g, T, T) { return g; },
      [](T g, T, T) { return g; });
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return detail::binary_broadcast(
      "sub", a, b, [](T x, T y) { return x - y; }, [](T g, T, T) { return g; },
      [](T g, T, T) { return -g; });
}

/// Elementwise product (Hadamard), same broadcast rule as add().
template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return detail::binary_broadcast(
      "mul", a, b, [](T x, T y) { return x * y; }, [](T g, T, T y) { return g * y; },
      [](T g, T x, T) { return g * x; });
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= factor;
  return Tensor<T>::from_op(a.shape(), std::move(out), {a}, [factor](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
  });
}

template <class T>
Tensor<T> relu(const Tensor<T>& a) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v = v > T(0) ? v : T(0);
  return Tensor<T>::from_op(a.shape(), std::move(out), {a}, [](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p.data[i] > T(0)) g[i] += self.grad[i];
    }
  });
}

/// Natural log; non-positive entries are rejected.
template <class T>
Tensor<T> log(const Tensor<T>& a) {
  std::vector<T> out(a.numel());
  auto ad = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(ad[i] > T(0))) throw Error("log: non-positive input " + std::to_string(double(ad[i])));
    out[i] = std::log(ad[i]);
  }
  return Tensor<T>::from_op(a.shape(), std::move(out), {a}, [](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / p.data[i];
  });
}

/// Softmax along `axis`. Max-subtracted, denominators accumulated in double.
template <class T>
Tensor<T> softmax(const Tensor<T>& a, std::size_t axis) {
  if (axis >= a.rank()) {
    throw Error("softmax: axis " + std::to_string(axis) + " out of range for " + shape_str(a.shape()));
  }
  const auto [outer, len, inner] = detail::split_axis(a.shape(), axis);
  std::vector<T> out(a.numel());
  auto ad = a.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t j = 0; j < len; ++j) mx = std::max(mx, ad[base + j * inner]);
      double denom = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        double e = std::exp(double(ad[base + j * inner]) - double(mx));
        out[base + j * inner] = T(e);
        denom += e;
      }
      for (std::size_t j = 0; j < len; ++j) {
        out[base + j * inner] = T(double(out[base + j * inner]) / denom);
      }
    }
  }
  return Tensor<T>::from_op(a.shape(), std::move(out), {a},
                            [outer, len, inner](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    const auto& y = self.data;
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        const std::size_t base = o * len * inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
          dot += double(self.grad[base + j * inner]) * double(y[base + j * inner]);
        }
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t k = base + j * inner;
          g[k] += T(double(y[k]) * (double(self.grad[k]) - dot));
        }
      }
    }
  });
}

/// log(softmax(a)) along `axis`, computed without forming the softmax.
template <class T>
Tensor<T> log_softmax(const Tensor<T>& a, std::size_t axis) {
  if (axis >= a.rank()) {
    throw Error("log_softmax: axis " + std::to_string(axis) + " out of range for " +
                shape_str(a.shape()));
  }
  const auto [outer, len, inner] = detail::split_axis(a.shape(), axis);
  std::vector<T> out(a.numel());
  auto ad = a.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t j = 0; j < len; ++j) mx = std::max(mx, ad[base + j * inner]);
      double denom = 0.0;
      for (std::size_t j = 0; j < len; ++j) denom += std::exp(double(ad[base + j * inner]) - double(mx));
      const double lse = double(mx) + std::log(denom);
      for (std::size_t j = 0; j < len; ++j) out[base + j * inner] = T(double(ad[base + j * inner]) - lse);
    }
  }
  return Tensor<T>::from_op(a.shape(), std::move(out), {a},
                            [outer, len, inner](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        const std::size_t base = o * len * inner + in;
        double total = 0.0;
        for (std::size_t j = 0; j < len; ++j) total += double(self.grad[base + j * inner]);
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t k = base + j * inner;
          g[k] += T(double(self.grad[k]) - std::exp(double(self.data[k])) * total);
        }
      }
    }
  });
}

/// Sum of all entries as a [1] tensor (double accumulation).
template <class T>
Tensor<T> sum(const Tensor<T>& a) {
  double total = 0.0;
  for (T v : a.data()) total += double(v);
  return Tensor<T>::from_op({1}, {T(total)}, {a}, [](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (auto& v : g) v += self.grad[0];
  });
}

template <class T>
Tensor<T> mean(const Tensor<T>& a) {
  return scale(sum(a), T(1) / T(a.numel()));
}

template <class T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (slt::numel(shape) != a.numel()) detail::shape_mismatch("reshape", a.shape(), shape);
  std::vector<T> out(a.data().begin(), a.data().end());
  return Tensor<T>::from_op(std::move(shape), std::move(out), {a}, [](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

/// Concatenation along `axis`; all other dimensions must agree.
template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) throw Error("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) throw Error("concat: axis out of range for " + shape_str(first));
  Shape shape = first;
  shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.rank() != first.size()) detail::shape_mismatch("concat", first, p.shape());
    for (std::size_t d = 0; d < first.size(); ++d) {
      if (d != axis && p.dim(d) != first[d]) detail::shape_mismatch("concat", first, p.shape());
    }
    shape[axis] += p.dim(axis);
  }
  const auto [outer, total, inner] = detail::split_axis(shape, axis);
  std::vector<T> out(slt::numel(shape));
  std::vector<std::size_t> widths;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.dim(axis) * inner;
    auto pd = p.data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(pd.begin() + o * w, w, out.begin() + o * total * inner + offset);
    }
    widths.push_back(w);
    offset += w;
  }
  return Tensor<T>::from_op(shape, std::move(out), parts,
                            [outer = outer, total = total, inner = inner,
                             widths](detail::Node<T>& self) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      auto& p = *self.parents[i];
      const std::size_t w = widths[i];
      if (p.requires_grad) {
        auto& g = p.ensure_grad();
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t j = 0; j < w; ++j) g[o * w + j] += self.grad[o * total * inner + off + j];
        }
      }
      off += w;
    }
  });
}

/// The sub-tensor [start, start+length) along `axis`.
template <class T>
Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t start, std::size_t length) {
  if (axis >= a.rank() || length == 0 || start + length > a.dim(axis)) {
    throw Error("slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                ") on axis " + std::to_string(axis) + " invalid for " + shape_str(a.shape()));
  }
  const auto [outer, len, inner] = detail::split_axis(a.shape(), axis);
  Shape shape = a.shape();
  shape[axis] = length;
  std::vector<T> out(slt::numel(shape));
  const std::size_t w = length * inner;
  auto ad = a.data();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(ad.begin() + o * len * inner + start * inner, w, out.begin() + o * w);
  }
  return Tensor<T>::from_op(shape, std::move(out), {a},
                            [outer = outer, len = len, inner = inner, start, w](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t j = 0; j < w; ++j) g[o * len * inner + start * inner + j] += self.grad[o * w + j];
    }
  });
}

/// Row lookup: out[i] = table[ids[i]] for table [V,d].
template <class T>
Tensor<T> embedding(const Tensor<T>& table, std::span<const int> ids) {
  detail::require_rank2("embedding", table);
  if (ids.empty()) throw Error("embedding: empty id sequence");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  std::vector<T> out(ids.size() * d);
  auto td = table.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || std::size_t(ids[i]) >= vocab) {
      throw Error("embedding: token id " + std::to_string(ids[i]) + " outside vocabulary of " +
                  std::to_string(vocab));
    }
    std::copy_n(td.begin() + std::size_t(ids[i]) * d, d, out.begin() + i * d);
  }
  std::vector<int> rows(ids.begin(), ids.end());
  return Tensor<T>::from_op({ids.size(), d}, std::move(out), {table},
                            [rows = std::move(rows), d](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) g[std::size_t(rows[i]) * d + j] += self.grad[i * d + j];
    }
  });
}

/// out[i] = src[index[i]], or 0 where index[i] < 0. Used for im2col.
template <class T>
Tensor<T> gather(const Tensor<T>& src, std::vector<std::int64_t> index, Shape shape) {
  if (slt::numel(shape) != index.size()) {
    throw Error("gather: index count " + std::to_string(index.size()) + " vs output shape " +
                shape_str(shape));
  }
  std::vector<T> out(index.size(), T(0));
  auto sd = src.data();
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= std::int64_t(sd.size())) throw Error("gather: index out of range");
    if (index[i] >= 0) out[i] = sd[std::size_t(index[i])];
  }
  return Tensor<T>::from_op(std::move(shape), std::move(out), {src},
                            [index = std::move(index)](detail::Node<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (index[i] >= 0) g[std::size_t(index[i])] += self.grad[i];
    }
  });
}

/// Layer normalization over the last axis with learned gain and bias.
template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     double eps = 1e-5) {
  const std::size_t d = x.shape().back();
  if (gamma.numel() != d || beta.numel() != d) detail::shape_mismatch("layer_norm", x.shape(), gamma.shape());
  const std::size_t rows = x.numel() / d;
  std::vector<T> out(x.numel());
  std::vector<double> xhat(x.numel());
  std::vector<double> inv_std(rows);
  auto xd = x.data();
  auto gd = gamma.data();
  auto bd = beta.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double mu = 0.0, var = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += xd[r * d + j];
    mu /= double(d);
    for (std::size_t j = 0; j < d; ++j) {
      double c = xd[r * d + j] - mu;
      var += c * c;
    }
    var /= double(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat[r * d + j] = (xd[r * d + j] - mu) * inv_std[r];
      out[r * d + j] = T(xhat[r * d + j] * gd[j] + bd[j]);
    }
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x, gamma, beta},
                            [rows, d, xhat = std::move(xhat),
                             inv_std = std::move(inv_std)](detail::Node<T>& self) {
    auto& px = *self.parents[0];
    auto& pg = *self.parents[1];
    auto& pb = *self.parents[2];
    if (pg.requires_grad || pb.requires_grad) {
      auto& gg = pg.ensure_grad();
      auto& gb = pb.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
          gg[j] += T(self.grad[r * d + j] * xhat[r * d + j]);
          gb[j] += self.grad[r * d + j];
        }
      }
    }
    if (px.requires_grad) {
      auto& gx = px.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          double gh = double(self.grad[r * d + j]) * double(pg.data[j]);
          sum_g += gh;
          sum_gx += gh * xhat[r * d + j];
        }
        for (std::size_t j = 0; j < d; ++j) {
          double gh = double(self.grad[r * d + j]) * double(pg.data[j]);
          gx[r * d + j] += T(inv_std[r] * (gh - sum_g / double(d) - xhat[r * d + j] * sum_gx / double(d)));
        }
      }
    }
  });
}

/// Inverted dropout: zeroes entries with probability p and rescales the rest.
template <class T, class Rng>
Tensor<T> dropout(const Tensor<T>& a, double p, Rng& rng) {
  if (p <= 0.0) return a;
  if (p >= 1.0) throw Error("dropout: rate must be below 1");
  std::bernoulli_distribution keep(1.0 - p);
  std::vector<T> mask(a.numel());
  const T kept = T(1.0 / (1.0 - p));
  for (auto& m : mask) m = keep(rng) ? kept : T(0);
  return mul(a, Tensor<T>(a.shape(), std::move(mask)));
}

/// Replaces row `pairs[i].first` of `rows` [L,d] with the mean of itself and
/// row `pairs[i].second` of `table` [V,d]. Other rows pass through untouched.
template <class T>
Tensor<T> average_rows_with(const Tensor<T>& rows, const Tensor<T>& table,
                            std::vector<std::pair<std::size_t, int>> pairs) {
  detail::require_rank2("average_rows_with", rows);
  detail::require_rank2("average_rows_with", table);
  if (rows.dim(1) != table.dim(1)) detail::shape_mismatch("average_rows_with", rows.shape(), table.shape());
  const std::size_t d = rows.dim(1);
  std::vector<T> out(rows.data().begin(), rows.data().end());
  auto td = table.data();
  for (auto [pos, id] : pairs) {
    if (pos >= rows.dim(0) || id < 0 || std::size_t(id) >= table.dim(0)) {
      throw Error("average_rows_with: position or table row out of range");
    }
    for (std::size_t j = 0; j < d; ++j) {
      out[pos * d + j] = T(0.5) * (out[pos * d + j] + td[std::size_t(id) * d + j]);
    }
  }
  return Tensor<T>::from_op(rows.shape(), std::move(out), {rows, table},
                            [d, pairs = std::move(pairs)](detail::Node<T>& self) {
    auto& pr = *self.parents[0];
    auto& pt = *self.parents[1];
    std::vector<T> factor(self.grad.size() / d, T(1));
    for (auto [pos, id] : pairs) factor[pos] = T(0.5);
    if (pr.requires_grad) {
      auto& g = pr.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor[i / d] * self.grad[i];
    }
    if (pt.requires_grad) {
      auto& g = pt.ensure_grad();
      for (auto [pos, id] : pairs) {
        for (std::size_t j = 0; j < d; ++j) g[std::size_t(id) * d + j] += T(0.5) * self.grad[pos * d + j];
      }
    }
  });
}

}  // namespace slt
