#include "core/etm.hpp"

#include <cmath>

#include "core/nn_kernels.hpp"
#include "core/train_loop.hpp"

namespace lintm {

namespace {

constexpr std::uint64_t kStreamInitEncoder = 10;  // shared with LI-NTM
constexpr std::uint64_t kStreamInitTopics = 12;
constexpr std::uint64_t kStreamInitEmbed = 13;
constexpr std::uint64_t kStreamTrain = 200;

DenseArray glorot(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseArray w({rows, cols});
  const double std = std::sqrt(2.0 / static_cast<double>(rows + cols));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std * rng.next_normal();
  return w;
}

}  // namespace

EtmParams EtmParams::like_zero() const {
  EtmParams g;
  g.enc.w1 = DenseArray(enc.w1.shape());
  g.enc.b1 = DenseArray(enc.b1.shape());
  g.enc.w_mu = DenseArray(enc.w_mu.shape());
  g.enc.b_mu = DenseArray(enc.b_mu.shape());
  g.enc.w_logvar = DenseArray(enc.w_logvar.shape());
  g.enc.b_logvar = DenseArray(enc.b_logvar.shape());
  g.rho_embed = DenseArray(rho_embed.shape());
  g.alpha_topics = DenseArray(alpha_topics.shape());
  return g;
}

std::vector<std::pair<std::string, DenseArray*>> EtmParams::named() {
  return {{"enc_w1", &enc.w1},         {"enc_b1", &enc.b1},
          {"enc_w_mu", &enc.w_mu},     {"enc_b_mu", &enc.b_mu},
          {"enc_w_logvar", &enc.w_logvar}, {"enc_b_logvar", &enc.b_logvar},
          {"rho_embed", &rho_embed},   {"alpha_topics", &alpha_topics}};
}

std::vector<std::pair<std::string, const DenseArray*>> EtmParams::named() const {
  auto mut = const_cast<EtmParams*>(this)->named();
  std::vector<std::pair<std::string, const DenseArray*>> out;
  out.reserve(mut.size());
  for (auto& [name, arr] : mut) out.emplace_back(name, arr);
  return out;
}

DenseArray etm_topic_matrix(const EtmParams& params) {
  const std::size_t E = params.rho_embed.extent(0), V = params.rho_embed.extent(1);
  const std::size_t K = params.alpha_topics.extent(1);
  if (params.alpha_topics.extent(0) != E) {
    throw DimensionError("etm_topic_matrix: embedding dimensions differ");
  }
  DenseArray logits({K, V});
  for (std::size_t e = 0; e < E; ++e) {
    const double* rho_row = params.rho_embed.data() + e * V;
    for (std::size_t k = 0; k < K; ++k) {
      const double a = params.alpha_topics.at2(e, k);
      if (a == 0.0) continue;
      double* out = logits.data() + k * V;
      for (std::size_t v = 0; v < V; ++v) out[v] += a * rho_row[v];
    }
  }
  return detail::row_softmax(logits);
}

EtmParams init_etm_params(const TrainConfig& cfg) {
  const std::size_t V = cfg.vocab_size, K = cfg.num_topics, H = cfg.hidden_enc;
  const std::size_t E = cfg.embed_dim;
  if (V == 0 || K == 0 || H == 0 || E == 0) {
    throw ConfigError("init_etm_params: vocab_size, num_topics, hidden_enc, embed_dim "
                      "must be positive");
  }
  const Rng base(cfg.seed);
  EtmParams p;
  Rng enc = base.fork(kStreamInitEncoder);
  p.enc.w1 = glorot(enc, H, V);
  p.enc.b1 = DenseArray({H});
  p.enc.w_mu = glorot(enc, K, H);
  p.enc.b_mu = DenseArray({K});
  p.enc.w_logvar = glorot(enc, K, H);
  p.enc.b_logvar = DenseArray({K});
  Rng top = base.fork(kStreamInitTopics);
  p.alpha_topics = DenseArray({E, K});
  for (std::size_t i = 0; i < p.alpha_topics.size(); ++i) {
    p.alpha_topics[i] = 0.05 * top.next_normal();
  }
  Rng emb = base.fork(kStreamInitEmbed);
  p.rho_embed = glorot(emb, E, V);
  return p;
}

LossBreakdown etm_loss(const std::vector<const PreppedDoc*>& batch,
                       const EtmParams& params, const TrainConfig& cfg,
                       const DenseArray& eps_batch, double tau_eff, EtmParams* grads) {
  if (batch.empty()) throw ConfigError("etm_loss: empty batch");
  const std::size_t K = cfg.num_topics, H = cfg.hidden_enc;
  const std::size_t E = params.rho_embed.extent(0), V = params.rho_embed.extent(1);
  const double s = 1.0 / static_cast<double>(batch.size());
  if (eps_batch.ndim() != 2 || eps_batch.extent(0) != batch.size() ||
      eps_batch.extent(1) != K) {
    throw DimensionError("etm_loss: eps batch shape mismatch");
  }

  const DenseArray T = etm_topic_matrix(params);
  DenseArray gT = grads ? DenseArray({K, V}) : DenseArray({1});

  std::vector<double> pre, post, mu(K), lv(K), theta(K);
  std::vector<double> g_theta(K), g_delta(K), g_mu(K), g_lv(K), g_h(H);
  LossBreakdown out;
  for (std::size_t d = 0; d < batch.size(); ++d) {
    const PreppedDoc& doc = *batch[d];
    const double* eps = eps_batch.data() + d * K;
    detail::mlp_hidden_sparse(params.enc.w1, params.enc.b1, doc.idx, doc.norm, pre,
                              post);
    detail::linear_head(params.enc.w_mu, params.enc.b_mu, post, mu.data());
    detail::linear_head(params.enc.w_logvar, params.enc.b_logvar, post, lv.data());
    for (std::size_t k = 0; k < K; ++k) {
      theta[k] = mu[k] + std::exp(0.5 * lv[k]) * eps[k];
    }
    softmax_inplace(theta.data(), K);

    std::fill(g_theta.begin(), g_theta.end(), 0.0);
    double recon = 0.0;
    for (std::size_t t = 0; t < doc.idx.size(); ++t) {
      const std::size_t v = doc.idx[t];
      double wv = 0.0;
      for (std::size_t k = 0; k < K; ++k) wv += theta[k] * T.at2(k, v);
      const double clamped = std::max(wv, detail::kProbFloor);
      recon += doc.counts[t] * std::log(clamped);
      if (grads && wv > detail::kProbFloor) {
        const double gw = -doc.counts[t] / clamped;
        for (std::size_t k = 0; k < K; ++k) {
          g_theta[k] += T.at2(k, v) * gw;
          gT.at2(k, v) += s * theta[k] * gw;
        }
      }
    }

    double kl = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      kl += std::exp(lv[k]) + mu[k] * mu[k] - 1.0 - lv[k];
    }
    kl *= 0.5;
    out.recon += -s * recon;
    out.kl += s * kl;

    if (!grads) continue;
    double dot = 0.0;
    for (std::size_t k = 0; k < K; ++k) dot += g_theta[k] * theta[k];
    for (std::size_t k = 0; k < K; ++k) {
      g_delta[k] = theta[k] * (g_theta[k] - dot);
      g_mu[k] = g_delta[k] + tau_eff * mu[k];
      g_lv[k] = g_delta[k] * 0.5 * std::exp(0.5 * lv[k]) * eps[k] +
                tau_eff * 0.5 * (std::exp(lv[k]) - 1.0);
    }
    detail::encoder_backward(params.enc.w_mu, params.enc.w_logvar, pre, post, doc.idx,
                             doc.norm, g_mu.data(), g_lv.data(), s, grads->enc.w_mu,
                             grads->enc.b_mu, grads->enc.w_logvar, grads->enc.b_logvar,
                             grads->enc.w1, grads->enc.b1, g_h);
  }

  if (grads) {
    // topic-matrix softmax backward, then into the two embedding factors
    DenseArray gS({K, V});
    detail::row_softmax_backward(T, gT, gS);
    for (std::size_t e = 0; e < E; ++e) {
      const double* rho_row = params.rho_embed.data() + e * V;
      double* grho_row = grads->rho_embed.data() + e * V;
      for (std::size_t k = 0; k < K; ++k) {
        const double a = params.alpha_topics.at2(e, k);
        const double* gs_row = gS.data() + k * V;
        double ga = 0.0;
        for (std::size_t v = 0; v < V; ++v) {
          ga += rho_row[v] * gs_row[v];
          grho_row[v] += a * gs_row[v];
        }
        grads->alpha_topics.at2(e, k) += ga;
      }
    }
  }

  out.total = out.recon + tau_eff * out.kl;
  if (!std::isfinite(out.total)) throw NumericError("etm_loss: non-finite loss");
  return out;
}

EtmTrainResult train_etm(const Corpus& corpus, const TrainConfig& cfg0) {
  if (corpus.docs.empty()) throw ConfigError("train_etm: empty corpus");
  TrainConfig cfg = cfg0;
  if (cfg.vocab_size == 0) cfg.vocab_size = corpus.vocab.size();
  if (cfg.vocab_size != corpus.vocab.size()) {
    throw ConfigError("train_etm: config vocab_size does not match corpus");
  }

  std::vector<PreppedDoc> pool = prep_corpus(corpus);
  for (PreppedDoc& d : pool) d.label = -1;  // ETM never reads labels

  EtmTrainResult result;
  result.params = init_etm_params(cfg);
  EtmParams grads = result.params.like_zero();

  detail::LoopOptions opt;
  opt.batch_size = cfg.batch_size;
  opt.epochs = cfg.epochs;
  opt.lr = cfg.lr;
  opt.tau = cfg.tau;
  opt.kl_anneal_steps = cfg.kl_anneal_steps;
  opt.eps_dim = cfg.num_topics;
  opt.seed = cfg.seed;
  opt.stream_base = kStreamTrain;

  std::vector<DenseArray*> ps, gs;
  std::vector<bool> frozen;
  for (auto& [name, arr] : result.params.named()) {
    ps.push_back(arr);
    frozen.push_back(cfg.etm_freeze_rho && name == "rho_embed");
  }
  for (auto& [name, arr] : grads.named()) gs.push_back(arr);

  result.loss_trace = detail::run_epochs(
      {}, pool, opt, ps, gs,
      [&](const std::vector<const PreppedDoc*>&,
          const std::vector<const PreppedDoc*>& batch, const DenseArray&,
          const DenseArray& eps, double tau_eff) {
        return etm_loss(batch, result.params, cfg, eps, tau_eff, &grads);
      },
      frozen);
  return result;
}

}  // namespace lintm
