#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/adam.hpp"
#include "core/corpus.hpp"
#include "core/rng.hpp"

namespace lintm {

// Which trainable family a checkpoint holds. kNtm is the unsupervised
// reduction of LI-NTM (single label, no classifier); kClf is the
// standalone baseline classifier.
enum class ModelKind { kLintm, kNtm, kEtm, kClf };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct TrainConfig {
  std::size_t vocab_size = 0;  // V; resolved from the corpus
  int num_labels = 0;          // L; resolved from the corpus
  std::size_t num_topics = 10;  // K per label (total topics for ETM/NTM)
  std::size_t hidden_enc = 25;
  std::size_t hidden_clf = 25;
  std::size_t embed_dim = 16;  // ETM only
  double tau = 1.0;
  double rho = 1.0;
  double lambda = 0.5;
  double lr = 2e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 50;
  std::size_t pretrain_epochs = 5;
  std::uint64_t seed = 0;
  // -1: anneal the KL weight over the first 20% of steps; 0: no annealing.
  long kl_anneal_steps = -1;
  bool use_classifier = true;   // false: plain NTM
  bool etm_freeze_rho = false;  // freeze word embeddings (tests/ablation)

  void validate() const;
};

struct EncoderParams {
  DenseArray w1;        // [H, V]
  DenseArray b1;        // [H]
  DenseArray w_mu;      // [K, H]
  DenseArray b_mu;      // [K]
  DenseArray w_logvar;  // [K, H]
  DenseArray b_logvar;  // [K]
};

struct LintmParams {
  EncoderParams enc;
  DenseArray clf_w1;  // [Hc, V]
  DenseArray clf_b1;  // [Hc]
  DenseArray clf_w2;  // [L, Hc]
  DenseArray clf_b2;  // [L]
  DenseArray beta;    // [L, K, V] unconstrained topic logits

  // Zero-filled copy with identical shapes; gradient accumulators.
  LintmParams like_zero() const;
  std::vector<std::pair<std::string, DenseArray*>> named();
  std::vector<std::pair<std::string, const DenseArray*>> named() const;
};

// Sparse view of one document prepared for training.
struct PreppedDoc {
  std::vector<std::uint32_t> idx;
  std::vector<double> norm;    // counts / total, aligned with idx
  std::vector<double> counts;  // raw counts, aligned with idx
  double total = 0.0;
  int label = -1;
};

std::vector<PreppedDoc> prep_corpus(const Corpus& corpus);

// All per-document intermediates of one forward pass; kept around for
// invariant tests and backprop bookkeeping.
struct ForwardTrace {
  DenseArray hidden_enc;  // post-softplus
  DenseArray mu;
  DenseArray logvar;
  DenseArray eps;
  DenseArray delta;
  DenseArray theta;
  DenseArray pi;
  DenseArray mixed;   // [K, V]
  DenseArray w_dist;  // [V]
};

// --- forward primitives (dense; evaluation and tests) ---

std::pair<DenseArray, DenseArray> encode(const DenseArray& x_norm,
                                         const LintmParams& params);
std::pair<DenseArray, DenseArray> reparam_theta(const DenseArray& mu,
                                                const DenseArray& logvar,
                                                const DenseArray& eps);
DenseArray classify(const DenseArray& x_norm, const LintmParams& params);
// Row-softmax each label slice of beta over the vocabulary, then mix the
// slices by pi. Every row of the result is a word distribution.
DenseArray mix_topics(const DenseArray& beta, const DenseArray& pi);
DenseArray decode(const DenseArray& theta, const DenseArray& mixed);
double recon_loglik(const DenseArray& x_counts, const DenseArray& w_dist);
double kl_diag_gaussian(const DenseArray& mu, const DenseArray& logvar);
double cross_entropy(const DenseArray& y_onehot, const DenseArray& pi);

ForwardTrace forward_doc(const DenseArray& x_norm, const DenseArray& eps,
                         const LintmParams& params, const DenseArray* pi_override);

// --- losses with analytic gradients ---

struct LossBreakdown {
  double total = 0.0;
  double recon = 0.0;  // negative reconstruction log-likelihood (mean)
  double kl = 0.0;
  double ce = 0.0;
};

// Mean over the batch of [-recon_loglik + tau_eff * KL]; the classifier
// produces pi, so reconstruction gradients reach it here. eps_batch is
// [B, K]. Gradients are accumulated into *grads scaled by `weight`.
LossBreakdown loss_unlabeled(const std::vector<const PreppedDoc*>& batch,
                             const LintmParams& params, const TrainConfig& cfg,
                             const DenseArray& eps_batch, double tau_eff,
                             LintmParams* grads, double weight = 1.0);

// Labeled branch: reconstruction uses pi = one-hot(label); the classifier
// learns only through the rho * cross-entropy term.
LossBreakdown loss_labeled(const std::vector<const PreppedDoc*>& batch,
                           const LintmParams& params, const TrainConfig& cfg,
                           const DenseArray& eps_batch, double tau_eff,
                           LintmParams* grads, double weight = 1.0);

// lambda * labeled + (1 - lambda) * unlabeled; a missing side hands its
// weight to the present one.
LossBreakdown loss_total(const std::vector<const PreppedDoc*>& labeled_batch,
                         const std::vector<const PreppedDoc*>& unlabeled_batch,
                         const LintmParams& params, const TrainConfig& cfg,
                         const DenseArray& eps_labeled, const DenseArray& eps_unlabeled,
                         double tau_eff, LintmParams* grads);

// --- training ---

LintmParams init_lintm_params(const TrainConfig& cfg);

// Trains only the clf_* blocks with cross-entropy; everything else stays
// bit-identical.
void pretrain_classifier(const std::vector<PreppedDoc>& labeled, LintmParams& params,
                         const TrainConfig& cfg, std::size_t epochs_override,
                         std::vector<double>* loss_trace = nullptr);

struct TrainResult {
  LintmParams params;
  std::vector<double> loss_trace;  // per-epoch mean total loss
};

TrainResult train(const Corpus& labeled, const Corpus& unlabeled, const TrainConfig& cfg);

// Classifier trained alone (same architecture, pretrain budget plus the
// joint epochs); the Table-3 baseline.
TrainResult train_baseline_classifier(const Corpus& labeled, const TrainConfig& cfg);

}  // namespace lintm
