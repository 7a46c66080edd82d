#pragma once

#include "core/corpus.hpp"
#include "core/rng.hpp"

namespace lintm {

// One synthetic trial: two word distributions over an even vocabulary,
// D1 concentrated on the first half and D2 on the second half.
struct SyntheticTrialParams {
  DenseArray d1_weights;  // [V], sums to 1
  DenseArray d2_weights;  // [V], sums to 1
  int doc_length_min = 20;
  int doc_length_max = 80;
  std::size_t num_docs = 2000;
  std::uint64_t seed = 0;
};

enum class LabelMode { kIdeal, kWorstCase };

// d1 = normalize(concat(u + 0.5, u' * 0.01)) with u, u' uniform(0,1)
// vectors of length V/2; d2 built the mirrored way. This puts >= 0.9 of
// each distribution's mass on its own half of the vocabulary.
SyntheticTrialParams gen_trial_params(Rng& rng, std::size_t vocab_size);

// Each document draws a source uniformly from {D1, D2}, a length from the
// uniform range, then tokens i.i.d. from the source. Ideal labels equal
// the source index; worst-case labels equal document-length parity
// (0 even, 1 odd). Deterministic given (params, label_mode).
Corpus gen_dataset(const SyntheticTrialParams& params, LabelMode label_mode);

// exp of the average per-token negative log-likelihood under the true
// generator with the true source known; no trained model can beat it in
// expectation.
double empirical_perplexity_lower_bound(const SyntheticTrialParams& params,
                                        std::size_t num_samples);

}  // namespace lintm
