#include "transg/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "transg/error.hpp"

namespace transg::numerics::ops {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using Node = detail::Node;

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a) +
                       " and " + shape_str(b));
}

bool is_suffix(const Shape& full, const Shape& tail) {
  if (tail.size() > full.size()) return false;
  return std::equal(tail.begin(), tail.end(), full.end() - static_cast<long>(tail.size()));
}

std::size_t last_dim(const Tensor& t, const char* op) {
  if (t.rank() == 0) throw DimensionError(std::string(op) + ": needs rank >= 1");
  return t.shape().back();
}

template <typename Fwd, typename DA, typename DB>
Tensor broadcast_binary(const char* op, const Tensor& a, const Tensor& b, Fwd fwd,
                        DA da, DB db) {
  if (!is_suffix(a.shape(), b.shape())) shape_fail(op, a.shape(), b.shape());
  const std::size_t inner = b.numel();
  const std::size_t n = a.numel();
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(av[i], bv[i % inner]);
  return Tensor::make_result(op, a.shape(), std::move(out), {a, b},
                             [inner, n, da, db](Node& self) {
                               Node& pa = *self.parents[0];
                               Node& pb = *self.parents[1];
                               if (pa.requires_grad) {
                                 auto g = pa.grad_buffer();
                                 for (std::size_t i = 0; i < n; ++i)
                                   g[i] += da(pa.value[i], pb.value[i % inner]) * self.grad[i];
                               }
                               if (pb.requires_grad) {
                                 auto g = pb.grad_buffer();
                                 for (std::size_t i = 0; i < n; ++i)
                                   g[i % inner] +=
                                       db(pa.value[i], pb.value[i % inner]) * self.grad[i];
                               }
                             });
}

template <typename Fwd, typename Deriv>
Tensor unary(const char* op, const Tensor& a, Fwd fwd, Deriv deriv) {
  auto av = a.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  return Tensor::make_result(op, a.shape(), std::move(out), {a}, [deriv](Node& self) {
    Node& p = *self.parents[0];
    auto g = p.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] += deriv(p.value[i], self.value[i]) * self.grad[i];
  });
}

std::vector<double> permute_values(std::span<const double> in, const Shape& shape,
                                   const std::vector<std::size_t>& order, Shape& out_shape) {
  const std::size_t r = shape.size();
  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t i = r; i-- > 1;) in_strides[i - 1] = in_strides[i] * shape[i];
  out_shape.resize(r);
  std::vector<std::size_t> step(r);
  for (std::size_t i = 0; i < r; ++i) {
    out_shape[i] = shape[order[i]];
    step[i] = in_strides[order[i]];
  }
  std::vector<double> out(in.size());
  std::vector<std::size_t> counter(r, 0);
  std::size_t src = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = in[src];
    for (std::size_t ax = r; ax-- > 0;) {
      if (++counter[ax] < out_shape[ax]) {
        src += step[ax];
        break;
      }
      src -= step[ax] * (out_shape[ax] - 1);
      counter[ax] = 0;
    }
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor scale(const Tensor& a, double s) {
  return unary(
      "scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor relu(const Tensor& a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      "log", a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor abs(const Tensor& a) {
  // Subgradient 0 at the kink.
  return unary(
      "abs", a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (b.rank() != 2 || a.rank() < 1 || a.shape().back() != b.dim(0)) {
    shape_fail("matmul", a.shape(), b.shape());
  }
  const std::size_t k = b.dim(0);
  const std::size_t m = b.dim(1);
  const std::size_t n = a.numel() / k;
  Shape out_shape = a.shape();
  out_shape.back() = m;
  std::vector<double> out(n * m);
  MapMat(out.data(), n, m).noalias() =
      ConstMapMat(a.data().data(), n, k) * ConstMapMat(b.data().data(), k, m);
  return Tensor::make_result("matmul", std::move(out_shape), std::move(out), {a, b},
                             [n, k, m](Node& self) {
                               Node& pa = *self.parents[0];
                               Node& pb = *self.parents[1];
                               ConstMapMat dy(self.grad.data(), n, m);
                               if (pa.requires_grad) {
                                 MapMat(pa.grad_buffer().data(), n, k).noalias() +=
                                     dy * ConstMapMat(pb.value.data(), k, m).transpose();
                               }
                               if (pb.requires_grad) {
                                 MapMat(pb.grad_buffer().data(), k, m).noalias() +=
                                     ConstMapMat(pa.value.data(), n, k).transpose() * dy;
                               }
                             });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2 || x.rank() < 1 || x.shape().back() != weight.dim(1)) {
    shape_fail("linear", x.shape(), weight.shape());
  }
  const std::size_t in = weight.dim(1);
  const std::size_t out_dim = weight.dim(0);
  const bool has_bias = bias.defined();
  if (has_bias && (bias.rank() != 1 || bias.dim(0) != out_dim)) {
    shape_fail("linear(bias)", weight.shape(), bias.shape());
  }
  const std::size_t n = x.numel() / in;
  Shape out_shape = x.shape();
  out_shape.back() = out_dim;
  std::vector<double> out(n * out_dim);
  MapMat y(out.data(), n, out_dim);
  y.noalias() = ConstMapMat(x.data().data(), n, in) *
                ConstMapMat(weight.data().data(), out_dim, in).transpose();
  if (has_bias) {
    y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.data().data(), out_dim);
  }
  std::vector<Tensor> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return Tensor::make_result(
      "linear", std::move(out_shape), std::move(out), std::move(inputs),
      [n, in, out_dim, has_bias](Node& self) {
        Node& px = *self.parents[0];
        Node& pw = *self.parents[1];
        ConstMapMat dy(self.grad.data(), n, out_dim);
        if (px.requires_grad) {
          MapMat(px.grad_buffer().data(), n, in).noalias() +=
              dy * ConstMapMat(pw.value.data(), out_dim, in);
        }
        if (pw.requires_grad) {
          MapMat(pw.grad_buffer().data(), out_dim, in).noalias() +=
              dy.transpose() * ConstMapMat(px.value.data(), n, in);
        }
        if (has_bias && self.parents[2]->requires_grad) {
          Eigen::Map<Eigen::RowVectorXd>(self.parents[2]->grad_buffer().data(), out_dim) +=
              dy.colwise().sum();
        }
      });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0)) {
    shape_fail("bmm", a.shape(), b.shape());
  }
  const std::size_t g = a.dim(0);
  const std::size_t n = a.dim(1);
  const std::size_t k = a.dim(2);
  const std::size_t m = transpose_b ? b.dim(1) : b.dim(2);
  if ((transpose_b ? b.dim(2) : b.dim(1)) != k) shape_fail("bmm", a.shape(), b.shape());

  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(g * n * m, 0.0);
  for (std::size_t q = 0; q < g; ++q) {
    const double* A = av.data() + q * n * k;
    const double* B = bv.data() + q * k * m;
    double* C = out.data() + q * n * m;
    if (transpose_b) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double s = 0.0;
          for (std::size_t t = 0; t < k; ++t) s += A[i * k + t] * B[j * k + t];
          C[i * m + j] = s;
        }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
          const double aval = A[i * k + t];
          for (std::size_t j = 0; j < m; ++j) C[i * m + j] += aval * B[t * m + j];
        }
    }
  }
  return Tensor::make_result(
      "bmm", {g, n, m}, std::move(out), {a, b}, [g, n, k, m, transpose_b](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const double* dC = self.grad.data();
        if (pa.requires_grad) {
          double* dA = pa.grad_buffer().data();
          for (std::size_t q = 0; q < g; ++q) {
            const double* B = pb.value.data() + q * k * m;
            const double* G = dC + q * n * m;
            double* D = dA + q * n * k;
            // dA = dC @ B^T  (or dC @ B when B was transposed)
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < m; ++j) {
                const double gv = G[i * m + j];
                if (transpose_b) {
                  for (std::size_t t = 0; t < k; ++t) D[i * k + t] += gv * B[j * k + t];
                } else {
                  for (std::size_t t = 0; t < k; ++t) D[i * k + t] += gv * B[t * m + j];
                }
              }
          }
        }
        if (pb.requires_grad) {
          double* dB = pb.grad_buffer().data();
          for (std::size_t q = 0; q < g; ++q) {
            const double* A = pa.value.data() + q * n * k;
            const double* G = dC + q * n * m;
            double* D = dB + q * k * m;
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < m; ++j) {
                const double gv = G[i * m + j];
                if (transpose_b) {
                  // dB[j, t] += dC[i, j] A[i, t]
                  for (std::size_t t = 0; t < k; ++t) D[j * k + t] += gv * A[i * k + t];
                } else {
                  for (std::size_t t = 0; t < k; ++t) D[t * m + j] += gv * A[i * k + t];
                }
              }
          }
        }
      });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) shape_fail("reshape", a.shape(), shape);
  std::vector<double> out(a.data().begin(), a.data().end());
  return Tensor::make_result("reshape", std::move(shape), std::move(out), {a},
                             [](Node& self) {
                               Node& p = *self.parents[0];
                               auto g = p.grad_buffer();
                               for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                             });
}

Tensor permute(const Tensor& a, const std::vector<std::size_t>& order) {
  const std::size_t r = a.rank();
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(r);
  std::iota(iota.begin(), iota.end(), 0);
  if (sorted != iota) {
    throw DimensionError("permute: order is not a permutation of the " + std::to_string(r) +
                         " axes of " + shape_str(a.shape()));
  }
  Shape out_shape;
  auto out = permute_values(a.data(), a.shape(), order, out_shape);
  std::vector<std::size_t> inverse(r);
  for (std::size_t i = 0; i < r; ++i) inverse[order[i]] = i;
  Shape captured = out_shape;
  return Tensor::make_result("permute", std::move(out_shape), std::move(out), {a},
                             [inverse, captured](Node& self) {
                               Node& p = *self.parents[0];
                               Shape back_shape;
                               auto back =
                                   permute_values(self.grad, captured, inverse, back_shape);
                               auto g = p.grad_buffer();
                               for (std::size_t i = 0; i < g.size(); ++i) g[i] += back[i];
                             });
}

Tensor transpose2d(const Tensor& a) {
  if (a.rank() != 2) throw DimensionError("transpose2d: needs rank 2, got " + shape_str(a.shape()));
  return permute(a, {1, 0});
}

Tensor concat_last(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractViolation("concat_last: no inputs");
  Shape lead = parts[0].shape();
  if (lead.empty()) throw DimensionError("concat_last: scalar input");
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape pl = p.shape();
    if (pl.empty()) throw DimensionError("concat_last: scalar input");
    widths.push_back(pl.back());
    total += pl.back();
    pl.pop_back();
    if (pl != lead) shape_fail("concat_last", parts[0].shape(), p.shape());
  }
  const std::size_t rows = shape_numel(lead);
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto v = parts[k].data();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    offset += widths[k];
  }
  Shape out_shape = lead;
  out_shape.push_back(total);
  return Tensor::make_result("concat_last", std::move(out_shape), std::move(out), parts,
                             [widths, rows, total](Node& self) {
                               std::size_t offset = 0;
                               for (std::size_t k = 0; k < widths.size(); ++k) {
                                 Node& p = *self.parents[k];
                                 if (p.requires_grad) {
                                   auto g = p.grad_buffer();
                                   for (std::size_t r = 0; r < rows; ++r)
                                     for (std::size_t c = 0; c < widths[k]; ++c)
                                       g[r * widths[k] + c] +=
                                           self.grad[r * total + offset + c];
                                 }
                                 offset += widths[k];
                               }
                             });
}

Tensor sum(const Tensor& a) {
  auto v = a.data();
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  return Tensor::make_result("sum", {}, {s}, {a}, [](Node& self) {
    Node& p = *self.parents[0];
    const double g0 = self.grad[0];
    for (double& g : p.grad_buffer()) g += g0;
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw ContractViolation("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor abs_sum(const Tensor& a) {
  auto v = a.data();
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return Tensor::make_result("abs_sum", {}, {s}, {a}, [](Node& self) {
    Node& p = *self.parents[0];
    const double g0 = self.grad[0];
    auto g = p.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = p.value[i];
      g[i] += g0 * (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
    }
  });
}

Tensor masked_mean(const Tensor& a, std::size_t axis, std::span<const double> weights) {
  const Shape& s = a.shape();
  if (axis >= s.size()) {
    throw DimensionError("masked_mean: axis " + std::to_string(axis) + " out of range for " +
                         shape_str(s));
  }
  const std::size_t len = s[axis];
  if (len == 0) throw ContractViolation("masked_mean over an empty axis");
  const std::size_t prefix = shape_numel(Shape(s.begin(), s.begin() + static_cast<long>(axis)));
  const std::size_t inner =
      shape_numel(Shape(s.begin() + static_cast<long>(axis) + 1, s.end()));
  if (weights.size() != prefix * len) {
    throw DimensionError("masked_mean: weights of size " + std::to_string(weights.size()) +
                         " do not match leading shape of " + shape_str(s) + " through axis " +
                         std::to_string(axis));
  }
  std::vector<double> norm(prefix);
  for (std::size_t p = 0; p < prefix; ++p) {
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) total += weights[p * len + i];
    if (total == 0.0) throw ContractViolation("masked_mean: every position is masked");
    norm[p] = 1.0 / total;
  }
  std::vector<double> w(weights.begin(), weights.end());
  auto v = a.data();
  std::vector<double> out(prefix * inner, 0.0);
  for (std::size_t p = 0; p < prefix; ++p)
    for (std::size_t i = 0; i < len; ++i) {
      const double c = w[p * len + i] * norm[p];
      if (c == 0.0) continue;
      const double* src = v.data() + (p * len + i) * inner;
      double* dst = out.data() + p * inner;
      for (std::size_t q = 0; q < inner; ++q) dst[q] += c * src[q];
    }
  Shape out_shape;
  for (std::size_t d = 0; d < s.size(); ++d)
    if (d != axis) out_shape.push_back(s[d]);
  return Tensor::make_result(
      "masked_mean", std::move(out_shape), std::move(out), {a},
      [w = std::move(w), norm = std::move(norm), prefix, len, inner](Node& self) {
        Node& pa = *self.parents[0];
        auto g = pa.grad_buffer();
        for (std::size_t p = 0; p < prefix; ++p)
          for (std::size_t i = 0; i < len; ++i) {
            const double c = w[p * len + i] * norm[p];
            if (c == 0.0) continue;
            double* dst = g.data() + (p * len + i) * inner;
            const double* src = self.grad.data() + p * inner;
            for (std::size_t q = 0; q < inner; ++q) dst[q] += c * src[q];
          }
      });
}

Tensor mean_axis(const Tensor& a, std::size_t axis) {
  const Shape& s = a.shape();
  if (axis >= s.size()) {
    throw DimensionError("mean_axis: axis " + std::to_string(axis) + " out of range for " +
                         shape_str(s));
  }
  const std::size_t n = shape_numel(Shape(s.begin(), s.begin() + static_cast<long>(axis) + 1));
  std::vector<double> ones(n, 1.0);
  return masked_mean(a, axis, ones);
}

Tensor softmax_last(const Tensor& a) {
  const std::size_t c = last_dim(a, "softmax_last");
  if (c == 0) throw ContractViolation("softmax over an empty axis");
  const std::size_t rows = a.numel() / c;
  auto v = a.data();
  std::vector<double> out(v.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = v.data() + r * c;
    double* y = out.data() + r * c;
    const double mx = *std::max_element(x, x + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += (y[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < c; ++j) y[j] /= z;
  }
  return Tensor::make_result("softmax_last", a.shape(), std::move(out), {a},
                             [rows, c](Node& self) {
                               Node& p = *self.parents[0];
                               auto g = p.grad_buffer();
                               for (std::size_t r = 0; r < rows; ++r) {
                                 const double* y = self.value.data() + r * c;
                                 const double* dy = self.grad.data() + r * c;
                                 double dot = 0.0;
                                 for (std::size_t j = 0; j < c; ++j) dot += y[j] * dy[j];
                                 for (std::size_t j = 0; j < c; ++j)
                                   g[r * c + j] += y[j] * (dy[j] - dot);
                               }
                             });
}

Tensor log_softmax_last(const Tensor& a) {
  const std::size_t c = last_dim(a, "log_softmax_last");
  if (c == 0) throw ContractViolation("softmax over an empty axis");
  const std::size_t rows = a.numel() / c;
  auto v = a.data();
  std::vector<double> out(v.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = v.data() + r * c;
    double* y = out.data() + r * c;
    const double mx = *std::max_element(x, x + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(x[j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < c; ++j) y[j] = x[j] - lse;
  }
  return Tensor::make_result("log_softmax_last", a.shape(), std::move(out), {a},
                             [rows, c](Node& self) {
                               Node& p = *self.parents[0];
                               auto g = p.grad_buffer();
                               for (std::size_t r = 0; r < rows; ++r) {
                                 const double* y = self.value.data() + r * c;
                                 const double* dy = self.grad.data() + r * c;
                                 double total = 0.0;
                                 for (std::size_t j = 0; j < c; ++j) total += dy[j];
                                 for (std::size_t j = 0; j < c; ++j)
                                   g[r * c + j] += dy[j] - std::exp(y[j]) * total;
                               }
                             });
}

Tensor l2_normalize_last(const Tensor& a, double eps) {
  const std::size_t c = last_dim(a, "l2_normalize_last");
  const std::size_t rows = c ? a.numel() / c : 0;
  auto v = a.data();
  std::vector<double> out(v.size());
  std::vector<double> norms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (std::size_t j = 0; j < c; ++j) sq += v[r * c + j] * v[r * c + j];
    norms[r] = std::max(std::sqrt(sq), eps);
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = v[r * c + j] / norms[r];
  }
  return Tensor::make_result(
      "l2_normalize_last", a.shape(), std::move(out), {a},
      [rows, c, eps, norms = std::move(norms)](Node& self) {
        Node& p = *self.parents[0];
        auto g = p.grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          const double* y = self.value.data() + r * c;
          const double* dy = self.grad.data() + r * c;
          if (norms[r] <= eps) {
            for (std::size_t j = 0; j < c; ++j) g[r * c + j] += dy[j] / norms[r];
            continue;
          }
          double dot = 0.0;
          for (std::size_t j = 0; j < c; ++j) dot += y[j] * dy[j];
          for (std::size_t j = 0; j < c; ++j) g[r * c + j] += (dy[j] - y[j] * dot) / norms[r];
        }
      });
}

Tensor pick(const Tensor& a, std::span<const std::size_t> index) {
  if (a.rank() != 2 || a.dim(0) != index.size()) {
    throw DimensionError("pick: need [n, c] input with n = " + std::to_string(index.size()) +
                         ", got " + shape_str(a.shape()));
  }
  const std::size_t n = a.dim(0);
  const std::size_t c = a.dim(1);
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (idx[i] >= c) throw DimensionError("pick: index out of range");
    out[i] = a.data()[i * c + idx[i]];
  }
  return Tensor::make_result("pick", {n}, std::move(out), {a},
                             [idx = std::move(idx), c](Node& self) {
                               auto g = self.parents[0]->grad_buffer();
                               for (std::size_t i = 0; i < idx.size(); ++i)
                                 g[i * c + idx[i]] += self.grad[i];
                             });
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  BatchNormStats& stats, bool training, double eps, double momentum) {
  const std::size_t c = last_dim(x, "batch_norm");
  if (gamma.rank() != 1 || gamma.dim(0) != c) shape_fail("batch_norm(gamma)", x.shape(), gamma.shape());
  if (beta.rank() != 1 || beta.dim(0) != c) shape_fail("batch_norm(beta)", x.shape(), beta.shape());
  if (stats.running_mean.size() != c || stats.running_var.size() != c) {
    throw DimensionError("batch_norm: running statistics sized for " +
                         std::to_string(stats.running_mean.size()) + " channels, input has " +
                         std::to_string(c));
  }
  const std::size_t n = x.numel() / c;
  if (n == 0) throw ContractViolation("batch_norm over an empty batch");
  auto xv = x.data();
  auto gv = gamma.data();
  auto bv = beta.data();

  std::vector<double> mu(c, 0.0);
  std::vector<double> inv_std(c);
  if (training) {
    std::vector<double> var(c, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < c; ++j) mu[j] += xv[r * c + j];
    for (std::size_t j = 0; j < c; ++j) mu[j] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < c; ++j) {
        const double d = xv[r * c + j] - mu[j];
        var[j] += d * d;
      }
    for (std::size_t j = 0; j < c; ++j) {
      var[j] /= static_cast<double>(n);
      inv_std[j] = 1.0 / std::sqrt(var[j] + eps);
      const double unbiased = n > 1 ? var[j] * static_cast<double>(n) / static_cast<double>(n - 1)
                                    : var[j];
      stats.running_mean[j] = (1.0 - momentum) * stats.running_mean[j] + momentum * mu[j];
      stats.running_var[j] = (1.0 - momentum) * stats.running_var[j] + momentum * unbiased;
    }
  } else {
    for (std::size_t j = 0; j < c; ++j) {
      mu[j] = stats.running_mean[j];
      inv_std[j] = 1.0 / std::sqrt(stats.running_var[j] + eps);
    }
  }

  std::vector<double> xhat(xv.size());
  std::vector<double> out(xv.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t i = r * c + j;
      xhat[i] = (xv[i] - mu[j]) * inv_std[j];
      out[i] = gv[j] * xhat[i] + bv[j];
    }

  return Tensor::make_result(
      "batch_norm", x.shape(), std::move(out), {x, gamma, beta},
      [n, c, training, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        Node& px = *self.parents[0];
        Node& pg = *self.parents[1];
        Node& pb = *self.parents[2];
        const double* dy = self.grad.data();
        if (pg.requires_grad || pb.requires_grad) {
          std::vector<double> dg(c, 0.0), db(c, 0.0);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < c; ++j) {
              dg[j] += dy[r * c + j] * xhat[r * c + j];
              db[j] += dy[r * c + j];
            }
          if (pg.requires_grad) {
            auto g = pg.grad_buffer();
            for (std::size_t j = 0; j < c; ++j) g[j] += dg[j];
          }
          if (pb.requires_grad) {
            auto g = pb.grad_buffer();
            for (std::size_t j = 0; j < c; ++j) g[j] += db[j];
          }
        }
        if (!px.requires_grad) return;
        auto gx = px.grad_buffer();
        const double* gamma = pg.value.data();
        if (!training) {
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < c; ++j)
              gx[r * c + j] += dy[r * c + j] * gamma[j] * inv_std[j];
          return;
        }
        std::vector<double> sum_d(c, 0.0), sum_dx(c, 0.0);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < c; ++j) {
            const double d = dy[r * c + j] * gamma[j];
            sum_d[j] += d;
            sum_dx[j] += d * xhat[r * c + j];
          }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < c; ++j) {
            const std::size_t i = r * c + j;
            const double d = dy[i] * gamma[j];
            gx[i] += inv_std[j] * (d - inv_n * sum_d[j] - xhat[i] * inv_n * sum_dx[j]);
          }
      });
}

}  // namespace transg::numerics::ops
