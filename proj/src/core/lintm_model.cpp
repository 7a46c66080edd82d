#include "core/lintm_model.hpp"

#include <algorithm>
#include <cmath>

#include "core/nn_kernels.hpp"
#include "core/train_loop.hpp"

namespace lintm {

using detail::kProbFloor;
using detail::linear_head;
using detail::mlp_hidden_sparse;
using detail::sigmoid;

namespace {

// RNG stream ids. Each consumer owns a stream so that adding or removing
// one (e.g. deleting the classifier) leaves the others untouched.
constexpr std::uint64_t kStreamInitEncoder = 10;
constexpr std::uint64_t kStreamInitClassifier = 11;
constexpr std::uint64_t kStreamInitTopics = 12;
constexpr std::uint64_t kStreamPretrain = 100;
constexpr std::uint64_t kStreamTrain = 200;

void check_prob_vector(const DenseArray& p, const char* what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) throw DistributionError(std::string(what) + ": negative entry");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DistributionError(std::string(what) + ": does not sum to 1");
  }
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLintm: return "lintm";
    case ModelKind::kNtm: return "ntm";
    case ModelKind::kEtm: return "etm";
    case ModelKind::kClf: return "clf";
  }
  throw ConfigError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "lintm") return ModelKind::kLintm;
  if (name == "ntm") return ModelKind::kNtm;
  if (name == "etm") return ModelKind::kEtm;
  if (name == "clf") return ModelKind::kClf;
  throw ConfigError("unknown model kind '" + name + "'");
}

void TrainConfig::validate() const {
  if (vocab_size == 0) throw ConfigError("config: vocab_size must be positive");
  if (num_labels <= 0) throw ConfigError("config: num_labels must be positive");
  if (num_topics == 0) throw ConfigError("config: num_topics must be positive");
  if (hidden_enc == 0) throw ConfigError("config: hidden_enc must be positive");
  if (use_classifier && hidden_clf == 0) {
    throw ConfigError("config: hidden_clf must be positive");
  }
  if (tau < 0.0) throw ConfigError("config: tau must be >= 0");
  if (rho < 0.0) throw ConfigError("config: rho must be >= 0");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("config: lambda must be in [0,1]");
  if (lr <= 0.0) throw ConfigError("config: lr must be positive");
  if (batch_size == 0) throw ConfigError("config: batch_size must be positive");
  if (!use_classifier && num_labels != 1) {
    throw ConfigError("config: disabling the classifier requires num_labels == 1");
  }
}

LintmParams LintmParams::like_zero() const {
  LintmParams g;
  g.enc.w1 = DenseArray(enc.w1.shape());
  g.enc.b1 = DenseArray(enc.b1.shape());
  g.enc.w_mu = DenseArray(enc.w_mu.shape());
  g.enc.b_mu = DenseArray(enc.b_mu.shape());
  g.enc.w_logvar = DenseArray(enc.w_logvar.shape());
  g.enc.b_logvar = DenseArray(enc.b_logvar.shape());
  g.clf_w1 = DenseArray(clf_w1.shape());
  g.clf_b1 = DenseArray(clf_b1.shape());
  g.clf_w2 = DenseArray(clf_w2.shape());
  g.clf_b2 = DenseArray(clf_b2.shape());
  g.beta = DenseArray(beta.shape());
  return g;
}

std::vector<std::pair<std::string, DenseArray*>> LintmParams::named() {
  return {{"enc_w1", &enc.w1},           {"enc_b1", &enc.b1},
          {"enc_w_mu", &enc.w_mu},       {"enc_b_mu", &enc.b_mu},
          {"enc_w_logvar", &enc.w_logvar}, {"enc_b_logvar", &enc.b_logvar},
          {"clf_w1", &clf_w1},           {"clf_b1", &clf_b1},
          {"clf_w2", &clf_w2},           {"clf_b2", &clf_b2},
          {"beta", &beta}};
}

std::vector<std::pair<std::string, const DenseArray*>> LintmParams::named() const {
  auto mut = const_cast<LintmParams*>(this)->named();
  std::vector<std::pair<std::string, const DenseArray*>> out;
  out.reserve(mut.size());
  for (auto& [name, arr] : mut) out.emplace_back(name, arr);
  return out;
}

std::vector<PreppedDoc> prep_corpus(const Corpus& corpus) {
  std::vector<PreppedDoc> out;
  out.reserve(corpus.docs.size());
  for (const Document& d : corpus.docs) {
    PreppedDoc p;
    p.total = static_cast<double>(d.total_count());
    if (p.total <= 0.0) throw DataError("prep_corpus: zero-count document " + d.id);
    for (const auto& [idx, c] : d.counts) {
      p.idx.push_back(idx);
      p.counts.push_back(static_cast<double>(c));
      p.norm.push_back(static_cast<double>(c) / p.total);
    }
    p.label = d.label;
    out.push_back(std::move(p));
  }
  return out;
}

// --- dense forward primitives ---

namespace {

std::vector<std::uint32_t> dense_indices(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  return idx;
}

}  // namespace

std::pair<DenseArray, DenseArray> encode(const DenseArray& x_norm,
                                         const LintmParams& params) {
  if (x_norm.ndim() != 1 || x_norm.size() != params.enc.w1.extent(1)) {
    throw DimensionError("encode: input length does not match encoder");
  }
  const std::size_t K = params.enc.w_mu.extent(0);
  std::vector<double> pre, post;
  mlp_hidden_sparse(params.enc.w1, params.enc.b1, dense_indices(x_norm.size()),
                    x_norm.flat(), pre, post);
  DenseArray mu({K}), logvar({K});
  linear_head(params.enc.w_mu, params.enc.b_mu, post, mu.data());
  linear_head(params.enc.w_logvar, params.enc.b_logvar, post, logvar.data());
  require_finite(mu, "encoder mu");
  require_finite(logvar, "encoder logvar");
  return {std::move(mu), std::move(logvar)};
}

std::pair<DenseArray, DenseArray> reparam_theta(const DenseArray& mu,
                                                const DenseArray& logvar,
                                                const DenseArray& eps) {
  if (!mu.same_shape(logvar) || !mu.same_shape(eps)) {
    throw DimensionError("reparam_theta: shape mismatch");
  }
  DenseArray delta = mu;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    delta[k] += std::exp(0.5 * logvar[k]) * eps[k];
  }
  DenseArray theta = softmax(delta);
  return {std::move(delta), std::move(theta)};
}

DenseArray classify(const DenseArray& x_norm, const LintmParams& params) {
  if (x_norm.ndim() != 1 || x_norm.size() != params.clf_w1.extent(1)) {
    throw DimensionError("classify: input length does not match classifier");
  }
  const std::size_t L = params.clf_w2.extent(0);
  std::vector<double> pre, post;
  mlp_hidden_sparse(params.clf_w1, params.clf_b1, dense_indices(x_norm.size()),
                    x_norm.flat(), pre, post);
  DenseArray logits({L});
  linear_head(params.clf_w2, params.clf_b2, post, logits.data());
  softmax_inplace(logits.data(), L);
  return logits;
}

DenseArray mix_topics(const DenseArray& beta, const DenseArray& pi) {
  if (beta.ndim() != 3) throw DimensionError("mix_topics: beta must be 3-D");
  const std::size_t L = beta.extent(0), K = beta.extent(1), V = beta.extent(2);
  if (pi.ndim() != 1 || pi.size() != L) {
    throw DimensionError("mix_topics: pi length must equal beta's label extent");
  }
  check_prob_vector(pi, "mix_topics pi");
  DenseArray mixed({K, V});
  std::vector<double> row(V);
  for (std::size_t l = 0; l < L; ++l) {
    if (pi[l] == 0.0) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double* src = beta.data() + (l * K + k) * V;
      std::copy(src, src + V, row.begin());
      softmax_inplace(row.data(), V);
      double* dst = mixed.data() + k * V;
      for (std::size_t v = 0; v < V; ++v) dst[v] += pi[l] * row[v];
    }
  }
  return mixed;
}

DenseArray decode(const DenseArray& theta, const DenseArray& mixed) {
  if (mixed.ndim() != 2 || theta.ndim() != 1 || theta.size() != mixed.extent(0)) {
    throw DimensionError("decode: theta length must equal topic count");
  }
  const std::size_t K = mixed.extent(0), V = mixed.extent(1);
  DenseArray w({V});
  for (std::size_t k = 0; k < K; ++k) {
    const double tk = theta[k];
    const double* row = mixed.data() + k * V;
    for (std::size_t v = 0; v < V; ++v) w[v] += tk * row[v];
  }
  return w;
}

double recon_loglik(const DenseArray& x_counts, const DenseArray& w_dist) {
  if (!x_counts.same_shape(w_dist)) throw DimensionError("recon_loglik: shape mismatch");
  double ll = 0.0;
  for (std::size_t v = 0; v < w_dist.size(); ++v) {
    if (x_counts[v] != 0.0) {
      ll += x_counts[v] * std::log(std::max(w_dist[v], kProbFloor));
    }
  }
  return ll;
}

double kl_diag_gaussian(const DenseArray& mu, const DenseArray& logvar) {
  if (!mu.same_shape(logvar)) throw DimensionError("kl_diag_gaussian: shape mismatch");
  double kl = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    kl += std::exp(logvar[k]) + mu[k] * mu[k] - 1.0 - logvar[k];
  }
  return 0.5 * kl;
}

double cross_entropy(const DenseArray& y_onehot, const DenseArray& pi) {
  if (!y_onehot.same_shape(pi)) throw DimensionError("cross_entropy: shape mismatch");
  double ce = 0.0;
  for (std::size_t l = 0; l < pi.size(); ++l) {
    if (y_onehot[l] != 0.0) {
      ce -= y_onehot[l] * std::log(std::max(pi[l], kProbFloor));
    }
  }
  return ce;
}

ForwardTrace forward_doc(const DenseArray& x_norm, const DenseArray& eps,
                         const LintmParams& params, const DenseArray* pi_override) {
  ForwardTrace tr;
  auto [mu, logvar] = encode(x_norm, params);
  tr.mu = mu;
  tr.logvar = logvar;
  tr.eps = eps;
  auto [delta, theta] = reparam_theta(mu, logvar, eps);
  tr.delta = std::move(delta);
  tr.theta = std::move(theta);
  tr.pi = pi_override ? *pi_override : classify(x_norm, params);
  tr.mixed = mix_topics(params.beta, tr.pi);
  tr.w_dist = decode(tr.theta, tr.mixed);
  return tr;
}

// --- fused sparse loss with analytic gradients ---

namespace {

struct BranchScratch {
  std::vector<double> enc_pre, enc_post, clf_pre, clf_post;
  std::vector<double> mu, lv, delta, theta, pi_clf, pi_mix, logits;
  std::vector<double> g_theta, g_pi, g_delta, g_mu, g_lv, g_h, g_logits, mcol;
};

// One branch (labeled or unlabeled) over a batch. Gradients are scaled by
// weight / batch_size and added into *grads; gB_acc collects dL/dB for the
// shared per-batch softmax backward.
LossBreakdown branch_loss(const std::vector<const PreppedDoc*>& batch,
                          const LintmParams& params, const TrainConfig& cfg,
                          const DenseArray& eps_batch, double tau_eff, bool labeled,
                          LintmParams* grads, DenseArray* gB_acc, const DenseArray& B) {
  const std::size_t K = cfg.num_topics;
  const std::size_t L = static_cast<std::size_t>(cfg.num_labels);
  const std::size_t H = cfg.hidden_enc;
  const std::size_t Hc = cfg.use_classifier ? cfg.hidden_clf : 0;
  const std::size_t V = cfg.vocab_size;
  const std::size_t Bn = batch.size();
  if (eps_batch.ndim() != 2 || eps_batch.extent(0) != Bn || eps_batch.extent(1) != K) {
    throw DimensionError("branch_loss: eps batch shape mismatch");
  }
  const double s = 1.0 / static_cast<double>(Bn);  // batch-mean scale

  LossBreakdown out;
  BranchScratch w;
  w.mu.resize(K);
  w.lv.resize(K);
  w.delta.resize(K);
  w.theta.resize(K);
  w.pi_mix.assign(L, 0.0);
  w.g_theta.resize(K);
  w.g_pi.resize(L);
  w.g_delta.resize(K);
  w.g_mu.resize(K);
  w.g_lv.resize(K);
  w.g_h.resize(std::max(H, Hc));
  w.g_logits.resize(L);
  w.mcol.resize(K);

  for (std::size_t d = 0; d < Bn; ++d) {
    const PreppedDoc& doc = *batch[d];
    const double* eps = eps_batch.data() + d * K;

    // encoder
    mlp_hidden_sparse(params.enc.w1, params.enc.b1, doc.idx, doc.norm, w.enc_pre,
                      w.enc_post);
    linear_head(params.enc.w_mu, params.enc.b_mu, w.enc_post, w.mu.data());
    linear_head(params.enc.w_logvar, params.enc.b_logvar, w.enc_post, w.lv.data());
    for (std::size_t k = 0; k < K; ++k) {
      w.delta[k] = w.mu[k] + std::exp(0.5 * w.lv[k]) * eps[k];
      w.theta[k] = w.delta[k];
    }
    softmax_inplace(w.theta.data(), K);

    // pi used for mixing
    const bool need_clf_forward =
        cfg.use_classifier && (!labeled || cfg.rho != 0.0);
    if (need_clf_forward) {
      mlp_hidden_sparse(params.clf_w1, params.clf_b1, doc.idx, doc.norm, w.clf_pre,
                        w.clf_post);
      w.logits.resize(L);
      linear_head(params.clf_w2, params.clf_b2, w.clf_post, w.logits.data());
      w.pi_clf = w.logits;
      softmax_inplace(w.pi_clf.data(), L);
    }
    std::fill(w.pi_mix.begin(), w.pi_mix.end(), 0.0);
    if (labeled || !cfg.use_classifier) {
      const int y = cfg.use_classifier ? doc.label : 0;
      if (y < 0 || static_cast<std::size_t>(y) >= L) {
        throw DataError("labeled loss: document without a valid label");
      }
      w.pi_mix[static_cast<std::size_t>(y)] = 1.0;
    } else {
      w.pi_mix = w.pi_clf;
    }

    // reconstruction over the document's support; backward in the same
    // pass since dL/dw_dist vanishes off-support.
    std::fill(w.g_theta.begin(), w.g_theta.end(), 0.0);
    std::fill(w.g_pi.begin(), w.g_pi.end(), 0.0);
    double recon = 0.0;
    for (std::size_t t = 0; t < doc.idx.size(); ++t) {
      const std::size_t v = doc.idx[t];
      double wv = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        double mk = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          if (w.pi_mix[l] != 0.0) mk += w.pi_mix[l] * B.at3(l, k, v);
        }
        w.mcol[k] = mk;
        wv += w.theta[k] * mk;
      }
      const double clamped = std::max(wv, kProbFloor);
      recon += doc.counts[t] * std::log(clamped);
      if (grads && wv > kProbFloor) {
        const double gw = -doc.counts[t] / clamped;  // d(-recon)/d w_v
        for (std::size_t k = 0; k < K; ++k) {
          w.g_theta[k] += w.mcol[k] * gw;
          const double tk_gw = w.theta[k] * gw;
          for (std::size_t l = 0; l < L; ++l) {
            if (w.pi_mix[l] != 0.0) {
              gB_acc->at3(l, k, v) += s * w.pi_mix[l] * tk_gw;
              w.g_pi[l] += w.theta[k] * B.at3(l, k, v) * gw;
            }
          }
        }
      }
    }

    double kl = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      kl += std::exp(w.lv[k]) + w.mu[k] * w.mu[k] - 1.0 - w.lv[k];
    }
    kl *= 0.5;

    double ce = 0.0;
    if (labeled && cfg.use_classifier && cfg.rho != 0.0) {
      const auto y = static_cast<std::size_t>(doc.label);
      ce = -std::log(std::max(w.pi_clf[y], kProbFloor));
    }

    out.recon += -s * recon;
    out.kl += s * kl;
    out.ce += s * ce;

    if (!grads) continue;

    // theta -> delta -> (mu, logvar)
    double dot = 0.0;
    for (std::size_t k = 0; k < K; ++k) dot += w.g_theta[k] * w.theta[k];
    for (std::size_t k = 0; k < K; ++k) {
      w.g_delta[k] = w.theta[k] * (w.g_theta[k] - dot);
      w.g_mu[k] = w.g_delta[k] + tau_eff * w.mu[k];
      w.g_lv[k] = w.g_delta[k] * 0.5 * std::exp(0.5 * w.lv[k]) * eps[k] +
                  tau_eff * 0.5 * (std::exp(w.lv[k]) - 1.0);
    }

    // encoder heads and hidden layer
    detail::encoder_backward(params.enc.w_mu, params.enc.w_logvar, w.enc_pre,
                             w.enc_post, doc.idx, doc.norm, w.g_mu.data(),
                             w.g_lv.data(), s, grads->enc.w_mu, grads->enc.b_mu,
                             grads->enc.w_logvar, grads->enc.b_logvar, grads->enc.w1,
                             grads->enc.b1, w.g_h);

    // classifier
    if (cfg.use_classifier) {
      bool have_glogits = false;
      std::fill(w.g_logits.begin(), w.g_logits.end(), 0.0);
      if (!labeled) {
        double pdot = 0.0;
        for (std::size_t l = 0; l < L; ++l) pdot += w.g_pi[l] * w.pi_clf[l];
        for (std::size_t l = 0; l < L; ++l) {
          w.g_logits[l] = w.pi_clf[l] * (w.g_pi[l] - pdot);
        }
        have_glogits = true;
      } else if (cfg.rho != 0.0) {
        for (std::size_t l = 0; l < L; ++l) {
          const double y = static_cast<std::size_t>(doc.label) == l ? 1.0 : 0.0;
          w.g_logits[l] = cfg.rho * (w.pi_clf[l] - y);
        }
        have_glogits = true;
      }
      if (have_glogits) {
        std::fill(w.g_h.begin(), w.g_h.begin() + Hc, 0.0);
        for (std::size_t l = 0; l < L; ++l) {
          const double gl = w.g_logits[l];
          double* gw2 = grads->clf_w2.data() + l * Hc;
          const double* w2 = params.clf_w2.data() + l * Hc;
          for (std::size_t h = 0; h < Hc; ++h) {
            gw2[h] += s * gl * w.clf_post[h];
            w.g_h[h] += w2[h] * gl;
          }
          grads->clf_b2[l] += s * gl;
        }
        for (std::size_t h = 0; h < Hc; ++h) {
          const double ghpre = w.g_h[h] * sigmoid(w.clf_pre[h]);
          grads->clf_b1[h] += s * ghpre;
          for (std::size_t t = 0; t < doc.idx.size(); ++t) {
            grads->clf_w1.at2(h, doc.idx[t]) += s * ghpre * doc.norm[t];
          }
        }
      }
    }
    (void)V;
  }

  out.total = out.recon + tau_eff * out.kl + (labeled ? cfg.rho * out.ce : 0.0);
  if (!std::isfinite(out.total)) {
    throw NumericError("branch_loss: non-finite loss");
  }
  return out;
}

void add_grads(LintmParams& dst, const LintmParams& src, double factor) {
  auto d = dst.named();
  auto sn = src.named();
  for (std::size_t i = 0; i < d.size(); ++i) {
    DenseArray& a = *d[i].second;
    const DenseArray& b = *sn[i].second;
    for (std::size_t j = 0; j < a.size(); ++j) a[j] += factor * b[j];
  }
}

LossBreakdown weighted_branch(const std::vector<const PreppedDoc*>& batch,
                              const LintmParams& params, const TrainConfig& cfg,
                              const DenseArray& eps_batch, double tau_eff,
                              bool labeled, LintmParams* grads, double weight) {
  const DenseArray B = detail::row_softmax(params.beta);
  LossBreakdown bd;
  if (grads) {
    LintmParams local = params.like_zero();
    DenseArray gB(params.beta.shape());
    bd = branch_loss(batch, params, cfg, eps_batch, tau_eff, labeled, &local, &gB, B);
    detail::row_softmax_backward(B, gB, local.beta);
    add_grads(*grads, local, weight);
  } else {
    bd = branch_loss(batch, params, cfg, eps_batch, tau_eff, labeled, nullptr, nullptr, B);
  }
  return bd;
}

}  // namespace

LossBreakdown loss_unlabeled(const std::vector<const PreppedDoc*>& batch,
                             const LintmParams& params, const TrainConfig& cfg,
                             const DenseArray& eps_batch, double tau_eff,
                             LintmParams* grads, double weight) {
  if (batch.empty()) throw ConfigError("loss_unlabeled: empty batch");
  return weighted_branch(batch, params, cfg, eps_batch, tau_eff, false, grads, weight);
}

LossBreakdown loss_labeled(const std::vector<const PreppedDoc*>& batch,
                           const LintmParams& params, const TrainConfig& cfg,
                           const DenseArray& eps_batch, double tau_eff,
                           LintmParams* grads, double weight) {
  if (batch.empty()) throw ConfigError("loss_labeled: empty batch");
  return weighted_branch(batch, params, cfg, eps_batch, tau_eff, true, grads, weight);
}

LossBreakdown loss_total(const std::vector<const PreppedDoc*>& labeled_batch,
                         const std::vector<const PreppedDoc*>& unlabeled_batch,
                         const LintmParams& params, const TrainConfig& cfg,
                         const DenseArray& eps_labeled, const DenseArray& eps_unlabeled,
                         double tau_eff, LintmParams* grads) {
  if (labeled_batch.empty() && unlabeled_batch.empty()) {
    throw ConfigError("loss_total: both batches empty");
  }
  double lambda = cfg.lambda;
  if (labeled_batch.empty()) lambda = 0.0;
  if (unlabeled_batch.empty()) lambda = 1.0;

  LossBreakdown out;
  if (lambda > 0.0) {
    const LossBreakdown l = loss_labeled(labeled_batch, params, cfg, eps_labeled,
                                         tau_eff, grads, lambda);
    out.recon += lambda * l.recon;
    out.kl += lambda * l.kl;
    out.ce += lambda * l.ce;
    out.total += lambda * l.total;
  }
  if (lambda < 1.0) {
    const LossBreakdown u = loss_unlabeled(unlabeled_batch, params, cfg, eps_unlabeled,
                                           tau_eff, grads, 1.0 - lambda);
    out.recon += (1.0 - lambda) * u.recon;
    out.kl += (1.0 - lambda) * u.kl;
    out.total += (1.0 - lambda) * u.total;
  }
  return out;
}

// --- initialization ---

namespace {

DenseArray glorot(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseArray w({rows, cols});
  const double std = std::sqrt(2.0 / static_cast<double>(rows + cols));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std * rng.next_normal();
  return w;
}

}  // namespace

LintmParams init_lintm_params(const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t V = cfg.vocab_size, K = cfg.num_topics, H = cfg.hidden_enc;
  const auto L = static_cast<std::size_t>(cfg.num_labels);
  const Rng base(cfg.seed);
  LintmParams p;

  Rng enc = base.fork(kStreamInitEncoder);
  p.enc.w1 = glorot(enc, H, V);
  p.enc.b1 = DenseArray({H});
  p.enc.w_mu = glorot(enc, K, H);
  p.enc.b_mu = DenseArray({K});
  p.enc.w_logvar = glorot(enc, K, H);
  p.enc.b_logvar = DenseArray({K});

  const std::size_t Hc = cfg.use_classifier ? cfg.hidden_clf : 1;
  if (cfg.use_classifier) {
    Rng clf = base.fork(kStreamInitClassifier);
    p.clf_w1 = glorot(clf, Hc, V);
    p.clf_b1 = DenseArray({Hc});
    p.clf_w2 = glorot(clf, L, Hc);
    p.clf_b2 = DenseArray({L});
  } else {
    p.clf_w1 = DenseArray({Hc, V});
    p.clf_b1 = DenseArray({Hc});
    p.clf_w2 = DenseArray({L, Hc});
    p.clf_b2 = DenseArray({L});
  }

  Rng top = base.fork(kStreamInitTopics);
  p.beta = DenseArray({L, K, V});
  for (std::size_t i = 0; i < p.beta.size(); ++i) p.beta[i] = 0.05 * top.next_normal();
  return p;
}

// --- training loops ---

namespace detail {

std::vector<double> run_epochs(const std::vector<PreppedDoc>& labeled_pool,
                               const std::vector<PreppedDoc>& unlabeled_pool,
                               const LoopOptions& opt,
                               const std::vector<DenseArray*>& params,
                               const std::vector<DenseArray*>& grads,
                               const StepFn& step, const std::vector<bool>& frozen) {
  const std::size_t nl = labeled_pool.size(), nu = unlabeled_pool.size();
  if (nl == 0 && nu == 0) throw ConfigError("training: no documents");

  std::vector<AdamState> adam;
  adam.reserve(params.size());
  for (DenseArray* p : params) adam.emplace_back(p->shape(), opt.lr);

  const std::size_t driver = std::max(nl, nu);
  const std::size_t steps_per_epoch = (driver + opt.batch_size - 1) / opt.batch_size;
  const std::size_t total_steps = steps_per_epoch * opt.epochs;
  const long anneal = opt.kl_anneal_steps < 0
                          ? static_cast<long>(total_steps / 5)
                          : opt.kl_anneal_steps;

  Rng base(opt.seed);
  Rng shuffle_rng = base.fork(opt.stream_base);
  Rng eps_rng = base.fork(opt.stream_base + 1);

  std::vector<std::size_t> lab_idx(nl), unl_idx(nu);
  for (std::size_t i = 0; i < nl; ++i) lab_idx[i] = i;
  for (std::size_t i = 0; i < nu; ++i) unl_idx[i] = i;

  const auto take = [](const std::vector<PreppedDoc>& pool,
                       const std::vector<std::size_t>& order, std::size_t start,
                       std::size_t count, std::vector<const PreppedDoc*>& out) {
    out.clear();
    if (pool.empty()) return;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(&pool[order[(start + i) % order.size()]]);
    }
  };

  std::vector<double> trace;
  std::vector<const PreppedDoc*> lab_batch, unl_batch;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    if (nl > 0) shuffle_rng.shuffle(lab_idx);
    if (nu > 0) shuffle_rng.shuffle(unl_idx);
    double epoch_loss = 0.0;
    for (std::size_t st = 0; st < steps_per_epoch; ++st) {
      const std::size_t lo = st * opt.batch_size;
      const std::size_t count = std::min(opt.batch_size, driver - lo);
      take(labeled_pool, lab_idx, lo, count, lab_batch);
      take(unlabeled_pool, unl_idx, lo, count, unl_batch);

      DenseArray eps_lab({lab_batch.size(), opt.eps_dim});
      DenseArray eps_unl({unl_batch.size(), opt.eps_dim});
      if (opt.eps_dim > 0) {
        for (std::size_t i = 0; i < eps_lab.size(); ++i) eps_lab[i] = eps_rng.next_normal();
        for (std::size_t i = 0; i < eps_unl.size(); ++i) eps_unl[i] = eps_rng.next_normal();
      }

      const double ramp =
          anneal > 0 ? std::min(1.0, static_cast<double>(global_step + 1) /
                                         static_cast<double>(anneal))
                     : 1.0;
      const double tau_eff = opt.tau * ramp;

      for (DenseArray* g : grads) g->fill(0.0);
      LossBreakdown bd;
      try {
        bd = step(lab_batch, unl_batch, eps_lab, eps_unl, tau_eff);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(st) + ": " + e.what());
      }
      epoch_loss += bd.total;

      for (std::size_t i = 0; i < params.size(); ++i) {
        if (!frozen.empty() && frozen[i]) continue;
        adam_update(*params[i], *grads[i], adam[i]);
        if (!params[i]->all_finite()) {
          throw NumericError("epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(st) + ": non-finite parameter update");
        }
      }
      ++global_step;
    }
    trace.push_back(epoch_loss / static_cast<double>(steps_per_epoch));
  }
  return trace;
}

}  // namespace detail

namespace {

// Plain cross-entropy over a labeled batch, classifier blocks only.
LossBreakdown classifier_ce_loss(const std::vector<const PreppedDoc*>& batch,
                                 const LintmParams& params, const TrainConfig& cfg,
                                 LintmParams* grads) {
  const std::size_t Hc = cfg.hidden_clf;
  const auto L = static_cast<std::size_t>(cfg.num_labels);
  const double s = 1.0 / static_cast<double>(batch.size());
  std::vector<double> pre, post, logits(L), g_h(Hc);
  LossBreakdown out;
  for (const PreppedDoc* docp : batch) {
    const PreppedDoc& doc = *docp;
    if (doc.label < 0) throw DataError("classifier training: unlabeled document");
    mlp_hidden_sparse(params.clf_w1, params.clf_b1, doc.idx, doc.norm, pre, post);
    linear_head(params.clf_w2, params.clf_b2, post, logits.data());
    softmax_inplace(logits.data(), L);
    const auto y = static_cast<std::size_t>(doc.label);
    out.ce += -s * std::log(std::max(logits[y], kProbFloor));
    if (!grads) continue;
    std::fill(g_h.begin(), g_h.end(), 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      const double gl = logits[l] - (l == y ? 1.0 : 0.0);
      double* gw2 = grads->clf_w2.data() + l * Hc;
      const double* w2 = params.clf_w2.data() + l * Hc;
      for (std::size_t h = 0; h < Hc; ++h) {
        gw2[h] += s * gl * post[h];
        g_h[h] += w2[h] * gl;
      }
      grads->clf_b2[l] += s * gl;
    }
    for (std::size_t h = 0; h < Hc; ++h) {
      const double ghpre = g_h[h] * sigmoid(pre[h]);
      grads->clf_b1[h] += s * ghpre;
      for (std::size_t t = 0; t < doc.idx.size(); ++t) {
        grads->clf_w1.at2(h, doc.idx[t]) += s * ghpre * doc.norm[t];
      }
    }
  }
  out.total = out.ce;
  return out;
}

std::vector<double> run_classifier_epochs(const std::vector<PreppedDoc>& labeled,
                                          LintmParams& params, const TrainConfig& cfg,
                                          std::size_t epochs) {
  detail::LoopOptions opt;
  opt.batch_size = cfg.batch_size;
  opt.epochs = epochs;
  opt.lr = cfg.lr;
  opt.tau = 0.0;
  opt.kl_anneal_steps = 0;
  opt.eps_dim = 0;
  opt.seed = cfg.seed;
  opt.stream_base = kStreamPretrain;

  LintmParams grads = params.like_zero();
  const std::vector<DenseArray*> ps = {&params.clf_w1, &params.clf_b1, &params.clf_w2,
                                       &params.clf_b2};
  const std::vector<DenseArray*> gs = {&grads.clf_w1, &grads.clf_b1, &grads.clf_w2,
                                       &grads.clf_b2};
  return detail::run_epochs(
      labeled, {}, opt, ps, gs,
      [&](const std::vector<const PreppedDoc*>& lab,
          const std::vector<const PreppedDoc*>&, const DenseArray&, const DenseArray&,
          double) { return classifier_ce_loss(lab, params, cfg, &grads); });
}

}  // namespace

void pretrain_classifier(const std::vector<PreppedDoc>& labeled, LintmParams& params,
                         const TrainConfig& cfg, std::size_t epochs_override,
                         std::vector<double>* loss_trace) {
  if (epochs_override == 0) return;
  if (labeled.empty()) throw ConfigError("pretrain_classifier: no labeled documents");
  auto trace = run_classifier_epochs(labeled, params, cfg, epochs_override);
  if (loss_trace) *loss_trace = std::move(trace);
}

namespace {

TrainConfig resolve_config(const TrainConfig& cfg, const Corpus* a, const Corpus* b) {
  TrainConfig r = cfg;
  const Corpus* ref = (a && !a->docs.empty()) ? a : b;
  if (!ref) throw ConfigError("train: no corpus given");
  if (r.vocab_size == 0) r.vocab_size = ref->vocab.size();
  if (r.num_labels == 0) r.num_labels = r.use_classifier ? ref->num_labels : 1;
  if (r.vocab_size != ref->vocab.size()) {
    throw ConfigError("train: config vocab_size does not match corpus");
  }
  if (a && b && !a->docs.empty() && !b->docs.empty() &&
      a->vocab.terms() != b->vocab.terms()) {
    throw ConfigError("train: labeled and unlabeled vocabularies differ");
  }
  r.validate();
  return r;
}

}  // namespace

TrainResult train(const Corpus& labeled, const Corpus& unlabeled, const TrainConfig& cfg0) {
  const TrainConfig cfg = resolve_config(cfg0, &labeled, &unlabeled);
  std::vector<PreppedDoc> lab = prep_corpus(labeled);
  std::vector<PreppedDoc> unl = prep_corpus(unlabeled);
  for (PreppedDoc& d : unl) d.label = -1;  // trainer never sees hidden labels

  TrainResult result;
  result.params = init_lintm_params(cfg);

  if (cfg.use_classifier && !lab.empty() && cfg.pretrain_epochs > 0) {
    pretrain_classifier(lab, result.params, cfg, cfg.pretrain_epochs);
  }

  detail::LoopOptions opt;
  opt.batch_size = cfg.batch_size;
  opt.epochs = cfg.epochs;
  opt.lr = cfg.lr;
  opt.tau = cfg.tau;
  opt.kl_anneal_steps = cfg.kl_anneal_steps;
  opt.eps_dim = cfg.num_topics;
  opt.seed = cfg.seed;
  opt.stream_base = kStreamTrain;

  LintmParams grads = result.params.like_zero();
  std::vector<DenseArray*> ps, gs;
  for (auto& [name, arr] : result.params.named()) ps.push_back(arr);
  for (auto& [name, arr] : grads.named()) gs.push_back(arr);

  result.loss_trace = detail::run_epochs(
      lab, unl, opt, ps, gs,
      [&](const std::vector<const PreppedDoc*>& lab_batch,
          const std::vector<const PreppedDoc*>& unl_batch, const DenseArray& eps_lab,
          const DenseArray& eps_unl, double tau_eff) {
        return loss_total(lab_batch, unl_batch, result.params, cfg, eps_lab, eps_unl,
                          tau_eff, &grads);
      });
  return result;
}

TrainResult train_baseline_classifier(const Corpus& labeled, const TrainConfig& cfg0) {
  if (labeled.docs.empty()) {
    throw ConfigError("baseline classifier: no labeled documents");
  }
  const TrainConfig cfg = resolve_config(cfg0, &labeled, nullptr);
  std::vector<PreppedDoc> lab = prep_corpus(labeled);
  TrainResult result;
  result.params = init_lintm_params(cfg);
  // Same budget as the joint run: pretraining plus the joint epochs.
  result.loss_trace =
      run_classifier_epochs(lab, result.params, cfg, cfg.pretrain_epochs + cfg.epochs);
  return result;
}

}  // namespace lintm
