#pragma once

// Internal minibatch loop shared by the LI-NTM and ETM trainers: seeded
// shuffling, paired-pool batching with the shorter pool cycling, KL
// annealing, and Adam updates. Not part of the public surface.

#include <functional>

#include "core/lintm_model.hpp"

namespace lintm::detail {

// Computes the step loss and fills the gradient arrays registered with
// the loop. Batches may be empty when the corresponding pool is empty.
using StepFn = std::function<LossBreakdown(
    const std::vector<const PreppedDoc*>& labeled_batch,
    const std::vector<const PreppedDoc*>& unlabeled_batch,
    const DenseArray& eps_labeled, const DenseArray& eps_unlabeled, double tau_eff)>;

struct LoopOptions {
  std::size_t batch_size = 64;
  std::size_t epochs = 0;
  double lr = 2e-3;
  double tau = 1.0;
  long kl_anneal_steps = -1;  // -1: first 20% of steps
  std::size_t eps_dim = 0;    // per-document noise dimension (0: none)
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 200;  // shuffle = base, noise = base + 1
};

// Returns per-epoch mean total losses. `params` and `grads` are parallel;
// entries flagged in `frozen` are never updated.
std::vector<double> run_epochs(const std::vector<PreppedDoc>& labeled_pool,
                               const std::vector<PreppedDoc>& unlabeled_pool,
                               const LoopOptions& opt,
                               const std::vector<DenseArray*>& params,
                               const std::vector<DenseArray*>& grads,
                               const StepFn& step,
                               const std::vector<bool>& frozen = {});

}  // namespace lintm::detail
