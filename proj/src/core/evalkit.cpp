#include "core/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "core/nn_kernels.hpp"

namespace lintm {

namespace {

void check_vocab_compat(const Corpus& corpus, const Checkpoint& model) {
  const std::size_t V = model.kind == ModelKind::kEtm
                            ? model.etm.enc.w1.extent(1)
                            : model.lintm.enc.w1.extent(1);
  if (corpus.vocab.size() != V) {
    throw ConfigError("evaluate: corpus vocabulary size " +
                      std::to_string(corpus.vocab.size()) +
                      " does not match checkpoint vocabulary size " + std::to_string(V));
  }
}

// Mean-field theta for one document: softmax of the encoder mean.
void eval_theta(const EncoderParams& enc, const PreppedDoc& doc,
                std::vector<double>& scratch_pre, std::vector<double>& scratch_post,
                std::vector<double>& theta) {
  detail::mlp_hidden_sparse(enc.w1, enc.b1, doc.idx, doc.norm, scratch_pre,
                            scratch_post);
  theta.resize(enc.w_mu.extent(0));
  detail::linear_head(enc.w_mu, enc.b_mu, scratch_post, theta.data());
  softmax_inplace(theta.data(), theta.size());
}

void eval_pi(const LintmParams& p, const PreppedDoc& doc,
             std::vector<double>& scratch_pre, std::vector<double>& scratch_post,
             std::vector<double>& pi) {
  detail::mlp_hidden_sparse(p.clf_w1, p.clf_b1, doc.idx, doc.norm, scratch_pre,
                            scratch_post);
  pi.resize(p.clf_w2.extent(0));
  detail::linear_head(p.clf_w2, p.clf_b2, scratch_post, pi.data());
  softmax_inplace(pi.data(), pi.size());
}

}  // namespace

double perplexity(const Corpus& test, const Checkpoint& model) {
  if (test.docs.empty()) throw ConfigError("perplexity: empty test corpus");
  if (model.kind == ModelKind::kClf) {
    throw ConfigError("perplexity: classifier-only checkpoints have no decoder");
  }
  check_vocab_compat(test, model);

  const bool is_etm = model.kind == ModelKind::kEtm;
  const DenseArray probs = is_etm ? etm_topic_matrix(model.etm)
                                  : detail::row_softmax(model.lintm.beta);
  const std::size_t K = is_etm ? model.etm.alpha_topics.extent(1)
                               : model.lintm.beta.extent(1);
  const std::size_t L = is_etm ? 1 : model.lintm.beta.extent(0);

  const std::vector<PreppedDoc> docs = prep_corpus(test);
  std::vector<double> pre, post, theta, pi;
  double nll = 0.0, tokens = 0.0;
  for (const PreppedDoc& doc : docs) {
    eval_theta(is_etm ? model.etm.enc : model.lintm.enc, doc, pre, post, theta);
    if (is_etm || !model.config.use_classifier) {
      pi.assign(L, 0.0);
      pi[0] = 1.0;
    } else {
      eval_pi(model.lintm, doc, pre, post, pi);
    }
    for (std::size_t t = 0; t < doc.idx.size(); ++t) {
      const std::size_t v = doc.idx[t];
      double wv = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        double mk = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          mk += pi[l] * probs[(l * K + k) * test.vocab.size() + v];
        }
        wv += theta[k] * mk;
      }
      nll -= doc.counts[t] * std::log(std::max(wv, detail::kProbFloor));
      tokens += doc.counts[t];
    }
  }
  return std::exp(nll / tokens);
}

double accuracy(const Corpus& test, const Checkpoint& model) {
  if (test.docs.empty()) throw ConfigError("accuracy: empty test corpus");
  if (model.kind == ModelKind::kEtm || model.kind == ModelKind::kNtm) {
    throw ConfigError("accuracy: model has no classifier");
  }
  check_vocab_compat(test, model);
  const std::vector<PreppedDoc> docs = prep_corpus(test);
  std::vector<double> pre, post, pi;
  std::size_t correct = 0;
  for (const PreppedDoc& doc : docs) {
    if (doc.label < 0) throw ConfigError("accuracy: unlabeled test document");
    eval_pi(model.lintm, doc, pre, post, pi);
    std::size_t best = 0;
    for (std::size_t l = 1; l < pi.size(); ++l) {
      if (pi[l] > pi[best]) best = l;  // ties keep the lowest index
    }
    if (static_cast<int>(best) == doc.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(docs.size());
}

std::vector<TopicWord> top_words(const Checkpoint& model, int label, std::size_t topic,
                                 std::size_t n, const Vocabulary& vocab) {
  const bool is_etm = model.kind == ModelKind::kEtm;
  const std::size_t K = is_etm ? model.etm.alpha_topics.extent(1)
                               : model.lintm.beta.extent(1);
  if (topic >= K) throw ConfigError("top_words: topic index out of range");
  const std::size_t V = vocab.size();
  std::vector<double> row(V);
  if (is_etm) {
    if (model.etm.rho_embed.extent(1) != V) {
      throw ConfigError("top_words: vocabulary does not match checkpoint");
    }
    const DenseArray T = etm_topic_matrix(model.etm);
    std::copy(T.data() + topic * V, T.data() + (topic + 1) * V, row.begin());
  } else {
    const std::size_t L = model.lintm.beta.extent(0);
    if (model.lintm.beta.extent(2) != V) {
      throw ConfigError("top_words: vocabulary does not match checkpoint");
    }
    std::size_t l = 0;
    if (L > 1) {
      if (label < 0 || static_cast<std::size_t>(label) >= L) {
        throw ConfigError("top_words: label index out of range");
      }
      l = static_cast<std::size_t>(label);
    }
    const double* src = model.lintm.beta.data() + (l * K + topic) * V;
    std::copy(src, src + V, row.begin());
    softmax_inplace(row.data(), V);
  }
  std::vector<std::size_t> order(V);
  for (std::size_t v = 0; v < V; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return vocab.term(a) < vocab.term(b);
  });
  std::vector<TopicWord> out;
  for (std::size_t i = 0; i < std::min(n, V); ++i) {
    out.push_back({vocab.term(order[i]), row[order[i]]});
  }
  return out;
}

std::vector<TopicTable> all_topic_tables(const Checkpoint& model, std::size_t n,
                                         const Vocabulary& vocab) {
  if (model.kind == ModelKind::kClf) return {};
  const bool is_etm = model.kind == ModelKind::kEtm;
  const std::size_t K = is_etm ? model.etm.alpha_topics.extent(1)
                               : model.lintm.beta.extent(1);
  const std::size_t L = is_etm ? 1 : model.lintm.beta.extent(0);
  std::vector<TopicTable> tables;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      TopicTable table;
      table.label = (is_etm || L == 1) ? -1 : static_cast<int>(l);
      table.topic = k;
      table.words = top_words(model, static_cast<int>(l), k, n, vocab);
      tables.push_back(std::move(table));
    }
  }
  return tables;
}

MetricsReport evaluate(const Corpus& test, const Checkpoint& model) {
  MetricsReport report;
  report.model = model_kind_name(model.kind);
  report.config = model.config;
  report.loss_trace = model.loss_trace;
  if (model.kind != ModelKind::kClf) {
    report.perplexity = perplexity(test, model);
    report.per_label_topics = all_topic_tables(model, 10, test.vocab);
  }
  if (model.kind == ModelKind::kLintm || model.kind == ModelKind::kClf) {
    report.accuracy = accuracy(test, model);
  }
  return report;
}

namespace {

nlohmann::json topics_to_jobj(const std::vector<TopicTable>& tables) {
  nlohmann::json out = nlohmann::json::array();
  for (const TopicTable& t : tables) {
    nlohmann::json jt;
    if (t.label >= 0) {
      jt["label"] = t.label;
    } else {
      jt["label"] = nullptr;
    }
    jt["topic"] = t.topic;
    nlohmann::json words = nlohmann::json::array();
    for (const TopicWord& w : t.words) words.push_back({{"word", w.word}, {"prob", w.prob}});
    jt["words"] = std::move(words);
    out.push_back(std::move(jt));
  }
  return out;
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["model"] = report.model;
  if (report.perplexity) {
    j["perplexity"] = *report.perplexity;
  }
  if (report.accuracy) {
    j["accuracy"] = *report.accuracy;
  }
  j["per_label_topics"] = topics_to_jobj(report.per_label_topics);
  j["loss_trace"] = report.loss_trace;
  j["config"] = nlohmann::json::parse(train_config_to_json(report.config));
  j["split_seed"] = report.split_seed;
  j["wall_time_sec"] = report.wall_time_sec;
  return j.dump(2);
}

std::string report_to_csv_row(const MetricsReport& report, bool with_header) {
  std::ostringstream out;
  if (with_header) {
    out << "model,num_topics,num_labels,tau,rho,lambda,seed,perplexity,accuracy\n";
  }
  out << report.model << ',' << report.config.num_topics << ','
      << report.config.num_labels << ',' << report.config.tau << ','
      << report.config.rho << ',' << report.config.lambda << ','
      << report.config.seed << ',';
  out << std::setprecision(17);
  if (report.perplexity) out << *report.perplexity;
  out << ',';
  if (report.accuracy) out << *report.accuracy;
  out << '\n';
  return out.str();
}

std::string topics_to_text(const std::vector<TopicTable>& tables) {
  std::ostringstream out;
  for (const TopicTable& t : tables) {
    if (t.label >= 0) {
      out << "label " << t.label << "  ";
    }
    out << "topic " << t.topic << '\n';
    for (const TopicWord& w : t.words) {
      out << "  " << std::left << std::setw(20) << w.word << ' ' << std::fixed
          << std::setprecision(6) << w.prob << '\n';
    }
    out.unsetf(std::ios::fixed | std::ios::left);
  }
  return out.str();
}

std::string topics_to_csv(const std::vector<TopicTable>& tables) {
  std::ostringstream out;
  out << "label,topic,rank,word,prob\n" << std::setprecision(17);
  for (const TopicTable& t : tables) {
    for (std::size_t r = 0; r < t.words.size(); ++r) {
      if (t.label >= 0) out << t.label;
      out << ',' << t.topic << ',' << r << ',' << t.words[r].word << ','
          << t.words[r].prob << '\n';
    }
  }
  return out.str();
}

}  // namespace lintm
