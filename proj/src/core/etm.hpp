#pragma once

#include "core/lintm_model.hpp"

namespace lintm {

// Embedded topic model: topics live in an embedding space shared with the
// vocabulary; topic k's word logits are rho^T alpha_k. Embeddings are
// learned jointly from scratch. Unsupervised; shares the encoder and the
// trainer plumbing with LI-NTM.
struct EtmParams {
  EncoderParams enc;
  DenseArray rho_embed;     // [E, V] word embeddings
  DenseArray alpha_topics;  // [E, K] topic embeddings

  EtmParams like_zero() const;
  std::vector<std::pair<std::string, DenseArray*>> named();
  std::vector<std::pair<std::string, const DenseArray*>> named() const;
};

// Row k = softmax over V of rho^T alpha_k; every row a word distribution.
DenseArray etm_topic_matrix(const EtmParams& params);

EtmParams init_etm_params(const TrainConfig& cfg);

// Reconstruction + tempered KL over the batch (labels ignored); analytic
// gradients accumulated into *grads.
LossBreakdown etm_loss(const std::vector<const PreppedDoc*>& batch,
                       const EtmParams& params, const TrainConfig& cfg,
                       const DenseArray& eps_batch, double tau_eff, EtmParams* grads);

struct EtmTrainResult {
  EtmParams params;
  std::vector<double> loss_trace;
};

EtmTrainResult train_etm(const Corpus& corpus, const TrainConfig& cfg);

}  // namespace lintm
