#include "core/synthlab.hpp"

#include <cmath>

namespace lintm {

namespace {

constexpr std::uint64_t kDocStream = 1;
constexpr std::uint64_t kBoundStream = 2;

std::vector<std::string> synth_vocab_terms(std::size_t vocab_size) {
  std::size_t width = 1;
  for (std::size_t v = vocab_size - 1; v >= 10; v /= 10) ++width;
  std::vector<std::string> terms;
  terms.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    std::string num = std::to_string(i);
    terms.push_back("w" + std::string(width - num.size(), '0') + num);
  }
  return terms;
}

}  // namespace

SyntheticTrialParams gen_trial_params(Rng& rng, std::size_t vocab_size) {
  if (vocab_size < 2 || vocab_size % 2 != 0) {
    throw ConfigError("gen_trial_params: vocabulary size must be even and >= 2");
  }
  const std::size_t half = vocab_size / 2;
  SyntheticTrialParams p;
  p.seed = rng.next_u64();
  p.d1_weights = DenseArray({vocab_size});
  p.d2_weights = DenseArray({vocab_size});
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    p.d1_weights[i] = rng.next_uniform() + 0.5;
    s1 += p.d1_weights[i];
  }
  for (std::size_t i = half; i < vocab_size; ++i) {
    p.d1_weights[i] = rng.next_uniform() * 0.01;
    s1 += p.d1_weights[i];
  }
  for (std::size_t i = 0; i < half; ++i) {
    p.d2_weights[i] = rng.next_uniform() * 0.01;
    s2 += p.d2_weights[i];
  }
  for (std::size_t i = half; i < vocab_size; ++i) {
    p.d2_weights[i] = rng.next_uniform() + 0.5;
    s2 += p.d2_weights[i];
  }
  for (std::size_t i = 0; i < vocab_size; ++i) {
    p.d1_weights[i] /= s1;
    p.d2_weights[i] /= s2;
  }
  return p;
}

Corpus gen_dataset(const SyntheticTrialParams& params, LabelMode label_mode) {
  const std::size_t V = params.d1_weights.size();
  Corpus corpus;
  corpus.vocab = Vocabulary(synth_vocab_terms(V));
  corpus.num_labels = 2;

  // Same document stream for both label modes: the corpora differ only
  // in their labels.
  Rng rng = Rng(params.seed).fork(kDocStream);
  for (std::size_t d = 0; d < params.num_docs; ++d) {
    const int source = rng.next_uniform() < 0.5 ? 0 : 1;
    const DenseArray& dist = source == 0 ? params.d1_weights : params.d2_weights;
    const auto length = static_cast<std::size_t>(
        rng.next_int(params.doc_length_min, params.doc_length_max));
    std::vector<std::uint32_t> dense_counts(V, 0);
    for (std::size_t n = 0; n < length; ++n) {
      ++dense_counts[rng.sample_categorical(dist)];
    }
    Document doc;
    doc.id = "synth-" + std::to_string(d);
    for (std::uint32_t v = 0; v < V; ++v) {
      if (dense_counts[v] > 0) doc.counts.emplace_back(v, dense_counts[v]);
    }
    doc.label = label_mode == LabelMode::kIdeal
                    ? source
                    : static_cast<int>(length % 2);
    // Source identity is what "ideal" evaluation measures; keep it.
    doc.hidden_label = source;
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

double empirical_perplexity_lower_bound(const SyntheticTrialParams& params,
                                        std::size_t num_samples) {
  if (num_samples < 10000) {
    throw ConfigError("empirical_perplexity_lower_bound: need >= 10^4 samples");
  }
  Rng rng = Rng(params.seed).fork(kBoundStream);
  double nll = 0.0;
  for (std::size_t i = 0; i < num_samples; ++i) {
    const DenseArray& dist =
        rng.next_uniform() < 0.5 ? params.d1_weights : params.d2_weights;
    const std::size_t w = rng.sample_categorical(dist);
    nll -= std::log(dist[w]);
  }
  return std::exp(nll / static_cast<double>(num_samples));
}

}  // namespace lintm
