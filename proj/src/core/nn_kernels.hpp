#pragma once

// Internal forward/backward kernels shared by the LI-NTM and ETM code
// paths. Inputs are sparse documents (index/value pairs); hidden-layer
// work is dense.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "core/array.hpp"

namespace lintm::detail {

constexpr double kProbFloor = 1e-12;

inline double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// hidden = softplus(W x + b) with sparse x.
inline void mlp_hidden_sparse(const DenseArray& w, const DenseArray& b,
                              const std::vector<std::uint32_t>& idx,
                              const std::vector<double>& val,
                              std::vector<double>& pre, std::vector<double>& post) {
  const std::size_t H = w.extent(0);
  pre.assign(b.flat().begin(), b.flat().end());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double v = val[t];
    for (std::size_t h = 0; h < H; ++h) pre[h] += w.at2(h, idx[t]) * v;
  }
  post.resize(H);
  for (std::size_t h = 0; h < H; ++h) post[h] = softplus(pre[h]);
}

inline void linear_head(const DenseArray& w, const DenseArray& b,
                        const std::vector<double>& h, double* out) {
  const std::size_t R = w.extent(0), H = w.extent(1);
  for (std::size_t r = 0; r < R; ++r) {
    double acc = b[r];
    const double* row = w.data() + r * H;
    for (std::size_t j = 0; j < H; ++j) acc += row[j] * h[j];
    out[r] = acc;
  }
}

// Softmax each length-V row of a flat (rows x V) block.
inline DenseArray row_softmax(const DenseArray& logits) {
  DenseArray out = logits;
  const std::size_t V = logits.extent(logits.ndim() - 1);
  const std::size_t rows = logits.size() / V;
  for (std::size_t r = 0; r < rows; ++r) softmax_inplace(out.data() + r * V, V);
  return out;
}

// Backward of row_softmax: adds d(loss)/d(logits) into g_logits given
// probabilities B and accumulated d(loss)/dB.
inline void row_softmax_backward(const DenseArray& B, const DenseArray& gB,
                                 DenseArray& g_logits) {
  const std::size_t V = B.extent(B.ndim() - 1);
  const std::size_t rows = B.size() / V;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* b = B.data() + r * V;
    const double* g = gB.data() + r * V;
    double dot = 0.0;
    for (std::size_t v = 0; v < V; ++v) dot += g[v] * b[v];
    double* out = g_logits.data() + r * V;
    for (std::size_t v = 0; v < V; ++v) out[v] += b[v] * (g[v] - dot);
  }
}

// Backprop through the two linear heads and the softplus hidden layer of
// an encoder. g_mu / g_lv are total gradients at the heads (length K);
// writes are scaled by s. g_h is caller-provided scratch of length H.
inline void encoder_backward(const DenseArray& w_mu, const DenseArray& w_lv,
                             const std::vector<double>& hidden_pre,
                             const std::vector<double>& hidden_post,
                             const std::vector<std::uint32_t>& idx,
                             const std::vector<double>& val, const double* g_mu,
                             const double* g_lv, double s, DenseArray& gw_mu,
                             DenseArray& gb_mu, DenseArray& gw_lv, DenseArray& gb_lv,
                             DenseArray& gw1, DenseArray& gb1,
                             std::vector<double>& g_h) {
  const std::size_t K = w_mu.extent(0), H = w_mu.extent(1);
  std::fill(g_h.begin(), g_h.begin() + H, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double gmu = g_mu[k], glv = g_lv[k];
    double* gm = gw_mu.data() + k * H;
    double* gl = gw_lv.data() + k * H;
    const double* wm = w_mu.data() + k * H;
    const double* wl = w_lv.data() + k * H;
    for (std::size_t h = 0; h < H; ++h) {
      gm[h] += s * gmu * hidden_post[h];
      gl[h] += s * glv * hidden_post[h];
      g_h[h] += wm[h] * gmu + wl[h] * glv;
    }
    gb_mu[k] += s * gmu;
    gb_lv[k] += s * glv;
  }
  for (std::size_t h = 0; h < H; ++h) {
    const double ghpre = g_h[h] * sigmoid(hidden_pre[h]);
    gb1[h] += s * ghpre;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      gw1.at2(h, idx[t]) += s * ghpre * val[t];
    }
  }
}

}  // namespace lintm::detail
