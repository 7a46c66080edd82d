#include "core/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "core/rng.hpp"

namespace lintm {

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].empty()) throw DataError("Vocabulary: empty token");
    if (!index_.emplace(terms_[i], i).second) {
      throw DataError("Vocabulary: duplicate token '" + terms_[i] + "'");
    }
  }
}

long Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::uint64_t Document::total_count() const {
  std::uint64_t n = 0;
  for (const auto& [idx, c] : counts) n += c;
  return n;
}

void Corpus::validate() const {
  for (const Document& d : docs) {
    if (d.counts.empty() || d.total_count() == 0) {
      throw DataError("Corpus: document '" + d.id + "' has no tokens");
    }
    for (const auto& [idx, c] : d.counts) {
      if (idx >= vocab.size()) {
        throw DataError("Corpus: token index out of range in '" + d.id + "'");
      }
    }
    if (d.label >= num_labels) {
      throw DataError("Corpus: label out of range in '" + d.id + "'");
    }
  }
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& raw_docs,
                       std::size_t min_count, std::size_t max_vocab) {
  if (raw_docs.empty()) throw DataError("build_vocab: no documents");
  std::map<std::string, std::size_t> freq;
  for (const auto& doc : raw_docs) {
    for (const auto& tok : doc) {
      if (!tok.empty()) ++freq[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, f] : freq) {
    if (f >= min_count) kept.emplace_back(tok, f);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (max_vocab > 0 && kept.size() > max_vocab) kept.resize(max_vocab);
  if (kept.empty()) throw DataError("build_vocab: empty vocabulary");
  std::vector<std::string> terms;
  terms.reserve(kept.size());
  for (auto& [tok, f] : kept) terms.push_back(std::move(tok));
  return Vocabulary(std::move(terms));
}

std::optional<Document> vectorize(const std::vector<std::string>& tokens,
                                  const Vocabulary& vocab) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& tok : tokens) {
    const long idx = vocab.index_of(tok);
    if (idx >= 0) ++counts[static_cast<std::uint32_t>(idx)];
  }
  if (counts.empty()) return std::nullopt;
  Document doc;
  doc.counts.assign(counts.begin(), counts.end());
  return doc;
}

DenseArray normalize_bow(const Document& doc, std::size_t vocab_size) {
  const std::uint64_t total = doc.total_count();
  if (total == 0) throw DistributionError("normalize_bow: zero-count document");
  DenseArray x({vocab_size});
  for (const auto& [idx, c] : doc.counts) {
    if (idx >= vocab_size) throw DimensionError("normalize_bow: index out of range");
    x[idx] = static_cast<double>(c) / static_cast<double>(total);
  }
  return x;
}

SplitResult split_dataset(const Corpus& corpus, const SplitSpec& spec) {
  const std::size_t D = corpus.docs.size();
  if (spec.labeled_frac < 0 || spec.unlabeled_frac < 0 || spec.test_frac <= 0 ||
      spec.test_frac >= 1) {
    throw ConfigError("split_dataset: fractions out of range");
  }
  const auto n_of = [D](double f) {
    return static_cast<std::size_t>(std::llround(f * static_cast<double>(D)));
  };
  const std::size_t n_test = n_of(spec.test_frac);
  const std::size_t n_lab = n_of(spec.labeled_frac);
  const std::size_t n_unl = n_of(spec.unlabeled_frac);
  if (n_test + n_lab + n_unl > D) {
    throw ConfigError("split_dataset: requested fractions exceed corpus size");
  }
  for (const Document& d : corpus.docs) {
    if (d.label < 0) throw ConfigError("split_dataset: corpus must be fully labeled");
  }

  std::vector<std::size_t> perm(D);
  for (std::size_t i = 0; i < D; ++i) perm[i] = i;
  Rng rng(spec.seed);
  rng.shuffle(perm);

  SplitResult out;
  out.labeled.vocab = out.unlabeled.vocab = out.test.vocab = corpus.vocab;
  out.labeled.num_labels = out.unlabeled.num_labels = out.test.num_labels =
      corpus.num_labels;
  for (std::size_t i = 0; i < n_test; ++i) out.test.docs.push_back(corpus.docs[perm[i]]);
  for (std::size_t i = 0; i < n_lab; ++i) {
    out.labeled.docs.push_back(corpus.docs[perm[n_test + i]]);
  }
  for (std::size_t i = 0; i < n_unl; ++i) {
    Document d = corpus.docs[perm[n_test + n_lab + i]];
    d.hidden_label = d.label;
    d.label = -1;
    out.unlabeled.docs.push_back(std::move(d));
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::string clean;
  clean.reserve(text.size());
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      clean.push_back(static_cast<char>(std::tolower(c)));
    } else {
      clean.push_back(' ');
    }
  }
  std::vector<std::string> tokens;
  std::istringstream ss(clean);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

namespace {

// One CSV record; handles quoted fields, "" escapes, and newlines inside
// quotes. Returns false at end of stream with no data consumed.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                     std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++line_no;
      fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

std::vector<AgNewsRow> load_agnews_csv(const std::string& path, AgNewsLoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_agnews_csv: cannot open " + path);
  AgNewsLoadStats local;
  AgNewsLoadStats& st = stats ? *stats : local;
  std::vector<AgNewsRow> rows;
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  while (true) {
    const std::size_t record_line = line_no;
    if (!read_csv_record(in, fields, line_no)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() < 2) {
      ++st.rows_skipped;
      st.row_errors.push_back("line " + std::to_string(record_line) +
                              ": expected (class, title, description)");
      continue;
    }
    int cls = 0;
    try {
      cls = std::stoi(fields[0]);
    } catch (const std::exception&) {
      cls = 0;
    }
    if (cls < 1 || cls > 4) {
      ++st.rows_skipped;
      st.row_errors.push_back("line " + std::to_string(record_line) +
                              ": bad class index '" + fields[0] + "'");
      continue;
    }
    std::string text = fields[1];
    for (std::size_t i = 2; i < fields.size(); ++i) {
      text += ' ';
      text += fields[i];
    }
    AgNewsRow row;
    row.label = cls - 1;
    row.tokens = tokenize(text);
    rows.push_back(std::move(row));
    ++st.rows_parsed;
  }
  return rows;
}

Corpus ingest_agnews(const std::string& path, std::size_t min_count,
                     std::size_t max_vocab, AgNewsLoadStats* stats,
                     std::size_t* docs_skipped) {
  const std::vector<AgNewsRow> rows = load_agnews_csv(path, stats);
  if (rows.empty()) throw DataError("ingest_agnews: no rows parsed from " + path);
  std::vector<std::vector<std::string>> raw;
  raw.reserve(rows.size());
  for (const auto& r : rows) raw.push_back(r.tokens);
  Corpus corpus;
  corpus.vocab = build_vocab(raw, min_count, max_vocab);
  corpus.num_labels = 4;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto doc = vectorize(rows[i].tokens, corpus.vocab);
    if (!doc) {
      ++skipped;
      continue;
    }
    doc->id = "agnews-" + std::to_string(i);
    doc->label = rows[i].label;
    corpus.docs.push_back(std::move(*doc));
  }
  if (docs_skipped) *docs_skipped = skipped;
  if (corpus.docs.empty()) throw DataError("ingest_agnews: all documents empty");
  return corpus;
}

std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::json j;
  j["vocab"] = corpus.vocab.terms();
  j["num_labels"] = corpus.num_labels;
  nlohmann::json docs = nlohmann::json::array();
  for (const Document& d : corpus.docs) {
    nlohmann::json jd;
    jd["id"] = d.id;
    if (d.label >= 0) {
      jd["label"] = d.label;
    } else {
      jd["label"] = nullptr;
    }
    if (d.hidden_label >= 0) jd["hidden_label"] = d.hidden_label;
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [idx, c] : d.counts) counts[std::to_string(idx)] = c;
    jd["counts"] = std::move(counts);
    docs.push_back(std::move(jd));
  }
  j["docs"] = std::move(docs);
  return j.dump();
}

Corpus corpus_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corpus JSON parse error: ") + e.what());
  }
  try {
    Corpus corpus;
    corpus.vocab = Vocabulary(j.at("vocab").get<std::vector<std::string>>());
    corpus.num_labels = j.at("num_labels").get<int>();
    for (const auto& jd : j.at("docs")) {
      Document d;
      d.id = jd.at("id").get<std::string>();
      if (!jd.at("label").is_null()) d.label = jd.at("label").get<int>();
      if (jd.contains("hidden_label")) d.hidden_label = jd.at("hidden_label").get<int>();
      std::map<std::uint32_t, std::uint32_t> counts;
      for (const auto& [k, v] : jd.at("counts").items()) {
        counts[static_cast<std::uint32_t>(std::stoul(k))] = v.get<std::uint32_t>();
      }
      d.counts.assign(counts.begin(), counts.end());
      corpus.docs.push_back(std::move(d));
    }
    corpus.validate();
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corpus JSON schema error: ") + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("save_corpus: cannot open " + path);
  out << corpus_to_json(corpus);
  if (!out) throw DataError("save_corpus: write failed for " + path);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_corpus: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return corpus_from_json(ss.str());
}

}  // namespace lintm
