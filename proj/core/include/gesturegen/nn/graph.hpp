#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gesturegen/common/strings.hpp"
#include "gesturegen/nn/tensor.hpp"

namespace gesturegen::nn {

// Reverse-mode tape over rank-2 tensors. Ops evaluate eagerly at construction
// (so shape errors surface where the graph is built, not when it runs) and
// record a backward closure; backward() replays the tape in reverse creation
// order, which is a valid topological order by construction.
template <typename T>
class Graph {
 public:
  struct Val {
    std::uint32_t i = 0;
  };

  using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MapM = Eigen::Map<EMat>;
  using CMapM = Eigen::Map<const EMat>;

  // When enabled, every op verifies its output is finite and throws otherwise.
  void set_check_finite(bool on) { check_finite_ = on; }

  std::size_t node_count() const { return nodes_.size(); }

  const Tensor<T>& value(Val v) const { return nodes_[v.i].val; }
  const Tensor<T>& grad(Val v) const { return nodes_[v.i].grad; }

  Val leaf(Tensor<T> t) { return push("leaf", std::move(t), {}); }

  Val add(Val a, Val b) {
    const Tensor<T>&A = val(a), &B = val(b);
    require(A.same_shape(B), "add", "shape mismatch");
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += B.data[i];
    return push("add", std::move(out), [a, b](Graph& g, const Node& n) {
      g.axpy(a, T(1), n.grad);
      g.axpy(b, T(1), n.grad);
    });
  }

  Val sub(Val a, Val b) {
    const Tensor<T>&A = val(a), &B = val(b);
    require(A.same_shape(B), "sub", "shape mismatch");
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= B.data[i];
    return push("sub", std::move(out), [a, b](Graph& g, const Node& n) {
      g.axpy(a, T(1), n.grad);
      g.axpy(b, T(-1), n.grad);
    });
  }

  Val mul(Val a, Val b) {
    const Tensor<T>&A = val(a), &B = val(b);
    require(A.same_shape(B), "mul", "shape mismatch");
    Tensor<T> out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= B.data[i];
    return push("mul", std::move(out), [a, b](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      Tensor<T>& gb = g.nodes_[b.i].grad;
      const Tensor<T>&A2 = g.val(a), &B2 = g.val(b);
      for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
        ga.data[i] += n.grad.data[i] * B2.data[i];
        gb.data[i] += n.grad.data[i] * A2.data[i];
      }
    });
  }

  Val scale(Val a, T s) {
    Tensor<T> out = val(a);
    for (T& x : out.data) x *= s;
    return push("scale", std::move(out), [a, s](Graph& g, const Node& n) {
      g.axpy(a, s, n.grad);
    });
  }

  Val matmul(Val a, Val b) {
    const Tensor<T>&A = val(a), &B = val(b);
    require(A.cols == B.rows, "matmul",
            cat(A.rows, "x", A.cols, " * ", B.rows, "x", B.cols));
    Tensor<T> out(A.rows, B.cols);
    MapM(out.data.data(), out.rows, out.cols) =
        CMapM(A.data.data(), A.rows, A.cols) *
        CMapM(B.data.data(), B.rows, B.cols);
    return push("matmul", std::move(out), [a, b](Graph& g, const Node& n) {
      const Tensor<T>&A2 = g.val(a), &B2 = g.val(b);
      Tensor<T>& ga = g.nodes_[a.i].grad;
      Tensor<T>& gb = g.nodes_[b.i].grad;
      CMapM G(n.grad.data.data(), n.grad.rows, n.grad.cols);
      MapM(ga.data.data(), ga.rows, ga.cols).noalias() +=
          G * CMapM(B2.data.data(), B2.rows, B2.cols).transpose();
      MapM(gb.data.data(), gb.rows, gb.cols).noalias() +=
          CMapM(A2.data.data(), A2.rows, A2.cols).transpose() * G;
    });
  }

  Val transpose(Val a) {
    const Tensor<T>& A = val(a);
    Tensor<T> out(A.cols, A.rows);
    for (std::size_t r = 0; r < A.rows; ++r)
      for (std::size_t c = 0; c < A.cols; ++c) out.at(c, r) = A.at(r, c);
    return push("transpose", std::move(out), [a](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      for (std::size_t r = 0; r < n.grad.rows; ++r)
        for (std::size_t c = 0; c < n.grad.cols; ++c)
          ga.at(c, r) += n.grad.at(r, c);
    });
  }

  // mat (m x n) + row (1 x n) broadcast over rows.
  Val add_row(Val a, Val r) {
    const Tensor<T>&A = val(a), &R = val(r);
    require(R.rows == 1 && R.cols == A.cols, "add_row", "row shape mismatch");
    Tensor<T> out = A;
    for (std::size_t i = 0; i < A.rows; ++i)
      for (std::size_t j = 0; j < A.cols; ++j) out.at(i, j) += R.at(0, j);
    return push("add_row", std::move(out), [a, r](Graph& g, const Node& n) {
      g.axpy(a, T(1), n.grad);
      Tensor<T>& gr = g.nodes_[r.i].grad;
      for (std::size_t i = 0; i < n.grad.rows; ++i)
        for (std::size_t j = 0; j < n.grad.cols; ++j)
          gr.at(0, j) += n.grad.at(i, j);
    });
  }

  // row (1 x n) replicated to (count x n).
  Val tile_rows(Val r, std::size_t count) {
    const Tensor<T>& R = val(r);
    require(R.rows == 1, "tile_rows", "input must be a row vector");
    Tensor<T> out(count, R.cols);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < R.cols; ++j) out.at(i, j) = R.at(0, j);
    return push("tile_rows", std::move(out), [r](Graph& g, const Node& n) {
      Tensor<T>& gr = g.nodes_[r.i].grad;
      for (std::size_t i = 0; i < n.grad.rows; ++i)
        for (std::size_t j = 0; j < n.grad.cols; ++j)
          gr.at(0, j) += n.grad.at(i, j);
    });
  }

  // Elementwise product with a 1x1 node.
  Val mul_scalar(Val a, Val s) {
    const Tensor<T>& S = val(s);
    require(S.size() == 1, "mul_scalar", "scale must be 1x1");
    Tensor<T> out = val(a);
    for (T& x : out.data) x *= S.data[0];
    return push("mul_scalar", std::move(out), [a, s](Graph& g, const Node& n) {
      const T sv = g.val(s).data[0];
      g.axpy(a, sv, n.grad);
      T acc = 0;
      const Tensor<T>& A2 = g.val(a);
      for (std::size_t i = 0; i < n.grad.data.size(); ++i)
        acc += n.grad.data[i] * A2.data[i];
      g.nodes_[s.i].grad.data[0] += acc;
    });
  }

  Val exp(Val a) {
    Tensor<T> out = val(a);
    for (T& x : out.data) x = std::exp(x);
    return push("exp", std::move(out), [a](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      for (std::size_t i = 0; i < n.grad.data.size(); ++i)
        ga.data[i] += n.grad.data[i] * n.val.data[i];
    });
  }

  Val clamp_max(Val a, T hi) {
    Tensor<T> out = val(a);
    for (T& x : out.data) x = std::min(x, hi);
    return push("clamp_max", std::move(out), [a, hi](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      const Tensor<T>& A2 = g.val(a);
      for (std::size_t i = 0; i < n.grad.data.size(); ++i)
        if (A2.data[i] < hi) ga.data[i] += n.grad.data[i];
    });
  }

  // Exact gelu: x * Phi(x).
  Val gelu(Val a) {
    Tensor<T> out = val(a);
    for (T& x : out.data) x = x * phi_cdf(x);
    return push("gelu", std::move(out), [a](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      const Tensor<T>& A2 = g.val(a);
      for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
        const T x = A2.data[i];
        const T d = phi_cdf(x) + x * phi_pdf(x);
        ga.data[i] += n.grad.data[i] * d;
      }
    });
  }

  // Row-wise softmax. key_mask (optional, length = cols) marks which columns
  // participate; excluded columns get probability exactly 0. Rows normalize
  // over the surviving entries, so each row still sums to 1.
  Val softmax_rows(Val a, const std::vector<std::uint8_t>* key_mask = nullptr) {
    const Tensor<T>& A = val(a);
    if (key_mask) {
      require(key_mask->size() == A.cols, "softmax_rows", "mask length");
      bool any = false;
      for (auto m : *key_mask) any |= (m != 0);
      require(any, "softmax_rows", "all keys masked");
    }
    Tensor<T> out(A.rows, A.cols);
    for (std::size_t r = 0; r < A.rows; ++r) {
      T m = -std::numeric_limits<T>::infinity();
      for (std::size_t c = 0; c < A.cols; ++c)
        if (!key_mask || (*key_mask)[c]) m = std::max(m, A.at(r, c));
      T sum = 0;
      for (std::size_t c = 0; c < A.cols; ++c) {
        if (!key_mask || (*key_mask)[c]) {
          out.at(r, c) = std::exp(A.at(r, c) - m);
          sum += out.at(r, c);
        } else {
          out.at(r, c) = 0;
        }
      }
      for (std::size_t c = 0; c < A.cols; ++c) out.at(r, c) /= sum;
    }
    return push("softmax_rows", std::move(out), [a](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      for (std::size_t r = 0; r < n.val.rows; ++r) {
        T dot = 0;
        for (std::size_t c = 0; c < n.val.cols; ++c)
          dot += n.grad.at(r, c) * n.val.at(r, c);
        for (std::size_t c = 0; c < n.val.cols; ++c)
          ga.at(r, c) += n.val.at(r, c) * (n.grad.at(r, c) - dot);
      }
    });
  }

  // Per-row layer norm with learnable gain/bias (1 x cols each).
  Val layer_norm(Val x, Val gain, Val bias) {
    const Tensor<T>& X = val(x);
    const Tensor<T>&G = val(gain), &B = val(bias);
    require(G.rows == 1 && G.cols == X.cols && B.rows == 1 && B.cols == X.cols,
            "layer_norm", "gain/bias shape");
    Tensor<T> out(X.rows, X.cols);
    for (std::size_t r = 0; r < X.rows; ++r) {
      T mean = 0;
      for (std::size_t c = 0; c < X.cols; ++c) mean += X.at(r, c);
      mean /= static_cast<T>(X.cols);
      T var = 0;
      for (std::size_t c = 0; c < X.cols; ++c) {
        const T d = X.at(r, c) - mean;
        var += d * d;
      }
      var /= static_cast<T>(X.cols);
      const T inv = T(1) / std::sqrt(var + kLnEps);
      for (std::size_t c = 0; c < X.cols; ++c)
        out.at(r, c) = (X.at(r, c) - mean) * inv * G.at(0, c) + B.at(0, c);
    }
    return push("layer_norm", std::move(out),
                [x, gain, bias](Graph& g, const Node& n) {
                  g.layer_norm_backward(x, gain, bias, n);
                });
  }

  // Weighted row mean: sum_t m_t x_t / sum_t m_t -> (1 x cols).
  Val masked_mean_rows(Val x, const std::vector<std::uint8_t>& mask) {
    const Tensor<T>& X = val(x);
    require(mask.size() == X.rows, "masked_mean_rows", "mask length");
    std::size_t m = 0;
    for (auto v : mask) m += (v != 0);
    require(m > 0, "masked_mean_rows", "all rows masked");
    Tensor<T> out(1, X.cols);
    for (std::size_t r = 0; r < X.rows; ++r)
      if (mask[r])
        for (std::size_t c = 0; c < X.cols; ++c) out.at(0, c) += X.at(r, c);
    for (T& v : out.data) v /= static_cast<T>(m);
    auto mask_copy = mask;
    return push("masked_mean_rows", std::move(out),
                [x, mask_copy, m](Graph& g, const Node& n) {
                  Tensor<T>& gx = g.nodes_[x.i].grad;
                  const T w = T(1) / static_cast<T>(m);
                  for (std::size_t r = 0; r < gx.rows; ++r)
                    if (mask_copy[r])
                      for (std::size_t c = 0; c < gx.cols; ++c)
                        gx.at(r, c) += n.grad.at(0, c) * w;
                });
  }

  Val l2_normalize_rows(Val a) {
    const Tensor<T>& A = val(a);
    Tensor<T> out = A;
    for (std::size_t r = 0; r < A.rows; ++r) {
      T s = 0;
      for (std::size_t c = 0; c < A.cols; ++c) s += A.at(r, c) * A.at(r, c);
      const T norm = std::max(std::sqrt(s), T(kNormEps));
      for (std::size_t c = 0; c < A.cols; ++c) out.at(r, c) /= norm;
    }
    return push("l2_normalize_rows", std::move(out),
                [a](Graph& g, const Node& n) {
                  Tensor<T>& ga = g.nodes_[a.i].grad;
                  const Tensor<T>& A2 = g.val(a);
                  for (std::size_t r = 0; r < n.val.rows; ++r) {
                    T s = 0;
                    for (std::size_t c = 0; c < n.val.cols; ++c)
                      s += A2.at(r, c) * A2.at(r, c);
                    const T norm = std::max(std::sqrt(s), T(kNormEps));
                    T dot = 0;
                    for (std::size_t c = 0; c < n.val.cols; ++c)
                      dot += n.grad.at(r, c) * n.val.at(r, c);
                    for (std::size_t c = 0; c < n.val.cols; ++c)
                      ga.at(r, c) +=
                          (n.grad.at(r, c) - n.val.at(r, c) * dot) / norm;
                  }
                });
  }

  Val concat_cols(Val a, Val b) {
    const Tensor<T>&A = val(a), &B = val(b);
    require(A.rows == B.rows, "concat_cols", "row count mismatch");
    Tensor<T> out(A.rows, A.cols + B.cols);
    for (std::size_t r = 0; r < A.rows; ++r) {
      for (std::size_t c = 0; c < A.cols; ++c) out.at(r, c) = A.at(r, c);
      for (std::size_t c = 0; c < B.cols; ++c)
        out.at(r, A.cols + c) = B.at(r, c);
    }
    return push("concat_cols", std::move(out), [a, b](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      Tensor<T>& gb = g.nodes_[b.i].grad;
      for (std::size_t r = 0; r < ga.rows; ++r) {
        for (std::size_t c = 0; c < ga.cols; ++c)
          ga.at(r, c) += n.grad.at(r, c);
        for (std::size_t c = 0; c < gb.cols; ++c)
          gb.at(r, c) += n.grad.at(r, ga.cols + c);
      }
    });
  }

  Val slice_cols(Val a, std::size_t c0, std::size_t c1) {
    const Tensor<T>& A = val(a);
    require(c0 < c1 && c1 <= A.cols, "slice_cols", "bad column range");
    Tensor<T> out(A.rows, c1 - c0);
    for (std::size_t r = 0; r < A.rows; ++r)
      for (std::size_t c = c0; c < c1; ++c) out.at(r, c - c0) = A.at(r, c);
    return push("slice_cols", std::move(out), [a, c0](Graph& g, const Node& n) {
      Tensor<T>& ga = g.nodes_[a.i].grad;
      for (std::size_t r = 0; r < n.grad.rows; ++r)
        for (std::size_t c = 0; c < n.grad.cols; ++c)
          ga.at(r, c0 + c) += n.grad.at(r, c);
    });
  }

  // Stacks B row vectors (1 x d each) into a (B x d) matrix.
  Val stack_rows(const std::vector<Val>& rows) {
    require(!rows.empty(), "stack_rows", "empty row list");
    const std::size_t d = val(rows[0]).cols;
    Tensor<T> out(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Tensor<T>& R = val(rows[r]);
      require(R.rows == 1 && R.cols == d, "stack_rows", "row shape mismatch");
      for (std::size_t c = 0; c < d; ++c) out.at(r, c) = R.at(0, c);
    }
    auto rows_copy = rows;
    return push("stack_rows", std::move(out),
                [rows_copy](Graph& g, const Node& n) {
                  for (std::size_t r = 0; r < rows_copy.size(); ++r) {
                    Tensor<T>& gr = g.nodes_[rows_copy[r].i].grad;
                    for (std::size_t c = 0; c < n.grad.cols; ++c)
                      gr.at(0, c) += n.grad.at(r, c);
                  }
                });
  }

  // logits (S x S) + table(head, clip(i - j, +-max_dist) + max_dist).
  // table is (heads x 2*max_dist+1); the bias depends only on i - j, which is
  // what makes the attention translation invariant.
  Val add_relative_bias(Val logits, Val table, std::size_t head) {
    const Tensor<T>& L = val(logits);
    const Tensor<T>& B = val(table);
    require(L.rows == L.cols, "add_relative_bias", "logits must be square");
    require(head < B.rows && B.cols % 2 == 1, "add_relative_bias",
            "bad table shape");
    const std::ptrdiff_t max_dist = static_cast<std::ptrdiff_t>(B.cols / 2);
    Tensor<T> out = L;
    for (std::size_t i = 0; i < L.rows; ++i)
      for (std::size_t j = 0; j < L.cols; ++j) {
        std::ptrdiff_t d = static_cast<std::ptrdiff_t>(i) -
                           static_cast<std::ptrdiff_t>(j);
        d = std::clamp(d, -max_dist, max_dist);
        out.at(i, j) += B.at(head, static_cast<std::size_t>(d + max_dist));
      }
    return push("add_relative_bias", std::move(out),
                [logits, table, head, max_dist](Graph& g, const Node& n) {
                  g.axpy(logits, T(1), n.grad);
                  Tensor<T>& gt = g.nodes_[table.i].grad;
                  for (std::size_t i = 0; i < n.grad.rows; ++i)
                    for (std::size_t j = 0; j < n.grad.cols; ++j) {
                      std::ptrdiff_t d = static_cast<std::ptrdiff_t>(i) -
                                         static_cast<std::ptrdiff_t>(j);
                      d = std::clamp(d, -max_dist, max_dist);
                      gt.at(head, static_cast<std::size_t>(d + max_dist)) +=
                          n.grad.at(i, j);
                    }
                });
  }

  // Mean squared error over all elements -> scalar.
  Val mse(Val a, Val b) {
    const Tensor<T>&A = val(a), &B = val(b);
    require(A.same_shape(B), "mse", "shape mismatch");
    T acc = 0;
    for (std::size_t i = 0; i < A.data.size(); ++i) {
      const T d = A.data[i] - B.data[i];
      acc += d * d;
    }
    Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(A.data.size()));
    return push("mse", std::move(out), [a, b](Graph& g, const Node& n) {
      const Tensor<T>&A2 = g.val(a), &B2 = g.val(b);
      Tensor<T>& ga = g.nodes_[a.i].grad;
      Tensor<T>& gb = g.nodes_[b.i].grad;
      const T w = n.grad.data[0] * T(2) / static_cast<T>(A2.data.size());
      for (std::size_t i = 0; i < A2.data.size(); ++i) {
        const T d = w * (A2.data[i] - B2.data[i]);
        ga.data[i] += d;
        gb.data[i] -= d;
      }
    });
  }

  // Mean over rows of cross-entropy against the diagonal target:
  // (1/B) sum_i (logsumexp(L_i) - L_ii).
  Val softmax_xent_diag(Val logits) {
    const Tensor<T>& L = val(logits);
    require(L.rows == L.cols, "softmax_xent_diag", "logits must be square");
    T acc = 0;
    for (std::size_t r = 0; r < L.rows; ++r) {
      T m = L.at(r, 0);
      for (std::size_t c = 1; c < L.cols; ++c) m = std::max(m, L.at(r, c));
      T sum = 0;
      for (std::size_t c = 0; c < L.cols; ++c)
        sum += std::exp(L.at(r, c) - m);
      acc += std::log(sum) + m - L.at(r, r);
    }
    Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(L.rows));
    return push("softmax_xent_diag", std::move(out),
                [logits](Graph& g, const Node& n) {
                  const Tensor<T>& L2 = g.val(logits);
                  Tensor<T>& gl = g.nodes_[logits.i].grad;
                  const T w = n.grad.data[0] / static_cast<T>(L2.rows);
                  for (std::size_t r = 0; r < L2.rows; ++r) {
                    T m = L2.at(r, 0);
                    for (std::size_t c = 1; c < L2.cols; ++c)
                      m = std::max(m, L2.at(r, c));
                    T sum = 0;
                    for (std::size_t c = 0; c < L2.cols; ++c)
                      sum += std::exp(L2.at(r, c) - m);
                    for (std::size_t c = 0; c < L2.cols; ++c) {
                      T p = std::exp(L2.at(r, c) - m) / sum;
                      if (c == r) p -= T(1);
                      gl.at(r, c) += w * p;
                    }
                  }
                });
  }

  Val mean_all(Val a) {
    const Tensor<T>& A = val(a);
    T acc = 0;
    for (T x : A.data) acc += x;
    Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(A.data.size()));
    return push("mean_all", std::move(out), [a](Graph& g, const Node& n) {
      const T w = n.grad.data[0] / static_cast<T>(g.val(a).data.size());
      Tensor<T>& ga = g.nodes_[a.i].grad;
      for (T& x : ga.data) x += w;
    });
  }

  void backward(Val loss) {
    const Tensor<T>& L = val(loss);
    if (L.size() != 1)
      throw std::invalid_argument("backward: loss must be scalar");
    nodes_[loss.i].grad.data[0] = T(1);
    for (std::size_t i = loss.i + 1; i-- > 0;) {
      if (nodes_[i].back) nodes_[i].back(*this, nodes_[i]);
    }
  }

 private:
  static constexpr T kLnEps = T(1e-5);
  static constexpr double kNormEps = 1e-12;

  struct Node {
    Tensor<T> val;
    Tensor<T> grad;
    std::function<void(Graph&, const Node&)> back;
    const char* op = "";
  };

  std::vector<Node> nodes_;
  bool check_finite_ = false;

  const Tensor<T>& val(Val v) const { return nodes_[v.i].val; }

  static T phi_cdf(T x) {
    return T(0.5) * (T(1) + std::erf(x * T(0.70710678118654752440)));
  }
  static T phi_pdf(T x) {
    return std::exp(T(-0.5) * x * x) * T(0.39894228040143267794);
  }

  void require(bool ok, const char* op, const std::string& why) const {
    if (!ok) throw std::invalid_argument(cat("graph op ", op, ": ", why));
  }

  void axpy(Val target, T a, const Tensor<T>& g) {
    Tensor<T>& dst = nodes_[target.i].grad;
    for (std::size_t i = 0; i < dst.data.size(); ++i)
      dst.data[i] += a * g.data[i];
  }

  void layer_norm_backward(Val x, Val gain, Val bias, const Node& n) {
    const Tensor<T>& X = val(x);
    const Tensor<T>& G = val(gain);
    Tensor<T>& gx = nodes_[x.i].grad;
    Tensor<T>& gg = nodes_[gain.i].grad;
    Tensor<T>& gb = nodes_[bias.i].grad;
    const std::size_t C = X.cols;
    for (std::size_t r = 0; r < X.rows; ++r) {
      T mean = 0;
      for (std::size_t c = 0; c < C; ++c) mean += X.at(r, c);
      mean /= static_cast<T>(C);
      T var = 0;
      for (std::size_t c = 0; c < C; ++c) {
        const T d = X.at(r, c) - mean;
        var += d * d;
      }
      var /= static_cast<T>(C);
      const T inv = T(1) / std::sqrt(var + kLnEps);
      // dxhat_c = g_c * gain_c; accumulate the two row reductions first.
      T sum_dxhat = 0, sum_dxhat_xhat = 0;
      for (std::size_t c = 0; c < C; ++c) {
        const T xhat = (X.at(r, c) - mean) * inv;
        const T dxhat = n.grad.at(r, c) * G.at(0, c);
        sum_dxhat += dxhat;
        sum_dxhat_xhat += dxhat * xhat;
        gg.at(0, c) += n.grad.at(r, c) * xhat;
        gb.at(0, c) += n.grad.at(r, c);
      }
      for (std::size_t c = 0; c < C; ++c) {
        const T xhat = (X.at(r, c) - mean) * inv;
        const T dxhat = n.grad.at(r, c) * G.at(0, c);
        gx.at(r, c) += inv * (dxhat - (sum_dxhat + xhat * sum_dxhat_xhat) /
                                          static_cast<T>(C));
      }
    }
  }

  Val push(const char* op, Tensor<T> out,
           std::function<void(Graph&, const Node&)> back) {
    if (check_finite_ && !out.all_finite())
      throw std::runtime_error(cat("non-finite value produced by op ", op));
    Node n;
    n.grad = Tensor<T>(out.rows, out.cols, T(0));
    n.val = std::move(out);
    n.back = std::move(back);
    n.op = op;
    nodes_.push_back(std::move(n));
    return Val{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }
};

}  // namespace gesturegen::nn
