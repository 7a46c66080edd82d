#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/array.hpp"

namespace lintm {

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const { return terms_.size(); }
  const std::string& term(std::size_t i) const { return terms_.at(i); }
  const std::vector<std::string>& terms() const { return terms_; }
  // -1 if the token is out of vocabulary.
  long index_of(const std::string& token) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Document {
  std::string id;
  // token index -> count, sorted by index, counts > 0.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
  // Visible label in [0, L), or -1 when unlabeled.
  int label = -1;
  // Ground-truth label retained after label hiding; evaluation-only.
  int hidden_label = -1;

  std::uint64_t total_count() const;
  int eval_label() const { return label >= 0 ? label : hidden_label; }
};

struct Corpus {
  Vocabulary vocab;
  std::vector<Document> docs;
  int num_labels = 0;

  void validate() const;
};

struct SplitSpec {
  double labeled_frac = 0.0;
  double unlabeled_frac = 0.0;
  double test_frac = 0.2;
  std::uint64_t seed = 0;
};

struct SplitResult {
  Corpus labeled;
  Corpus unlabeled;  // labels moved to hidden_label
  Corpus test;
};

// Tokens with corpus frequency >= min_count, truncated to the max_vocab
// most frequent; ordering and ties are (frequency desc, term asc).
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& raw_docs,
                       std::size_t min_count, std::size_t max_vocab);

// Out-of-vocabulary tokens are dropped; nullopt when nothing survives
// (the caller drops the document and counts the skip).
std::optional<Document> vectorize(const std::vector<std::string>& tokens,
                                  const Vocabulary& vocab);

// Dense length-V probability vector of relative counts.
DenseArray normalize_bow(const Document& doc, std::size_t vocab_size);

// Disjoint subsets drawn from one seeded shuffle. The layout (test block,
// then labeled, then unlabeled) makes splits nested: growing
// unlabeled_frac extends the unlabeled subset and leaves the labeled and
// test subsets untouched.
SplitResult split_dataset(const Corpus& corpus, const SplitSpec& spec);

// Lowercase, map non-alphanumeric bytes to spaces, split on whitespace.
std::vector<std::string> tokenize(const std::string& text);

struct AgNewsRow {
  int label;  // 0-based
  std::vector<std::string> tokens;
};

struct AgNewsLoadStats {
  std::size_t rows_parsed = 0;
  std::size_t rows_skipped = 0;
  std::vector<std::string> row_errors;  // "line N: reason"
};

// Rows are (class index 1..4, title, description); title and description
// are concatenated before tokenization. Malformed rows are skipped and
// reported per line.
std::vector<AgNewsRow> load_agnews_csv(const std::string& path, AgNewsLoadStats* stats);

// Full ingestion: CSV -> vocabulary -> vectorized labeled corpus.
// Documents with zero in-vocabulary tokens are dropped and counted.
Corpus ingest_agnews(const std::string& path, std::size_t min_count,
                     std::size_t max_vocab, AgNewsLoadStats* stats,
                     std::size_t* docs_skipped);

// Corpus persistence: {vocab, num_labels, docs:[{id, label|null, counts}]}.
std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& json_text);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace lintm
