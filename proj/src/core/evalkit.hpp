#pragma once

#include <optional>

#include "core/checkpoint.hpp"

namespace lintm {

struct TopicWord {
  std::string word;
  double prob;
};

struct TopicTable {
  int label;  // -1 for unsupervised models
  std::size_t topic;
  std::vector<TopicWord> words;
};

struct MetricsReport {
  std::string model;
  std::optional<double> perplexity;
  std::optional<double> accuracy;
  std::vector<TopicTable> per_label_topics;
  std::vector<double> loss_trace;
  TrainConfig config;
  std::uint64_t split_seed = 0;
  double wall_time_sec = 0.0;
};

// exp of the average per-token negative log-likelihood over the test
// corpus. Deterministic: uses the variational mean (no sampling) and, for
// LI-NTM, the classifier's soft pi -- test labels are never read.
double perplexity(const Corpus& test, const Checkpoint& model);

// Fraction of documents with argmax(classify(x)) == label; ties break
// toward the lowest index.
double accuracy(const Corpus& test, const Checkpoint& model);

// The n most probable words of one (label, topic) row, descending, ties
// lexicographic. `label` is ignored for ETM/NTM checkpoints.
std::vector<TopicWord> top_words(const Checkpoint& model, int label, std::size_t topic,
                                 std::size_t n, const Vocabulary& vocab);

// Top-word tables for every (label, topic) pair of the model.
std::vector<TopicTable> all_topic_tables(const Checkpoint& model, std::size_t n,
                                         const Vocabulary& vocab);

// Full evaluation against a test corpus; accuracy/perplexity are present
// only where the model kind defines them.
MetricsReport evaluate(const Corpus& test, const Checkpoint& model);

std::string report_to_json(const MetricsReport& report);
std::string report_to_csv_row(const MetricsReport& report, bool with_header);
std::string topics_to_text(const std::vector<TopicTable>& tables);
std::string topics_to_csv(const std::vector<TopicTable>& tables);

}  // namespace lintm
