#include "lintm/lintm.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/checkpoint.hpp"
#include "core/errors.hpp"
#include "core/evalkit.hpp"
#include "core/synthlab.hpp"

struct lintm_corpus {
  lintm::Corpus corpus;
};

struct lintm_model {
  lintm::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs `fn`, mapping the library's exception hierarchy onto the C codes.
template <typename Fn>
int guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LINTM_OK;
  } catch (const lintm::ConfigError& e) {
    g_last_error = e.what();
    return LINTM_ERR_CONFIG;
  } catch (const lintm::DimensionError& e) {
    g_last_error = e.what();
    return LINTM_ERR_CONFIG;
  } catch (const lintm::DataError& e) {
    g_last_error = e.what();
    return LINTM_ERR_DATA;
  } catch (const lintm::NumericError& e) {
    g_last_error = e.what();
    return LINTM_ERR_NUMERIC;
  } catch (const lintm::DistributionError& e) {
    g_last_error = e.what();
    return LINTM_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LINTM_ERR_DATA;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw lintm::ConfigError(std::string("null argument: ") + what);
}

// All documents of both pools with labels stripped; for the unsupervised
// families.
lintm::Corpus merge_unlabeled(const lintm::Corpus* a, const lintm::Corpus* b) {
  const lintm::Corpus* ref = (a && !a->docs.empty()) ? a : b;
  if (!ref || ref->docs.empty()) {
    throw lintm::ConfigError("train: no documents given");
  }
  if (a && b && !a->docs.empty() && !b->docs.empty() &&
      a->vocab.terms() != b->vocab.terms()) {
    throw lintm::ConfigError("train: corpus vocabularies differ");
  }
  lintm::Corpus merged;
  merged.vocab = ref->vocab;
  merged.num_labels = ref->num_labels > 0 ? ref->num_labels : 1;
  for (const lintm::Corpus* c : {a, b}) {
    if (!c) continue;
    for (const lintm::Document& d : c->docs) {
      lintm::Document copy = d;
      copy.hidden_label = copy.eval_label();
      copy.label = -1;
      merged.docs.push_back(std::move(copy));
    }
  }
  return merged;
}

}  // namespace

extern "C" {

const char* lintm_version(void) { return "0.1.0"; }

const char* lintm_last_error(void) { return g_last_error.c_str(); }

void lintm_string_free(char* s) { std::free(s); }

int lintm_corpus_load(const char* path, lintm_corpus** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto* handle = new lintm_corpus{lintm::load_corpus(path)};
    *out = handle;
  });
}

int lintm_corpus_save(const lintm_corpus* corpus, const char* path) {
  return guard([&] {
    require(corpus, "corpus");
    require(path, "path");
    lintm::save_corpus(corpus->corpus, path);
  });
}

int lintm_corpus_from_agnews(const char* csv_path, size_t min_count,
                             size_t max_vocab, lintm_corpus** out,
                             char** stats_json) {
  return guard([&] {
    require(csv_path, "csv_path");
    require(out, "out");
    lintm::AgNewsLoadStats stats;
    std::size_t docs_skipped = 0;
    lintm::Corpus corpus =
        lintm::ingest_agnews(csv_path, min_count, max_vocab, &stats, &docs_skipped);
    if (stats_json) {
      nlohmann::json j = {{"rows_parsed", stats.rows_parsed},
                          {"rows_skipped", stats.rows_skipped},
                          {"row_errors", stats.row_errors},
                          {"docs_skipped", docs_skipped},
                          {"vocab_size", corpus.vocab.size()},
                          {"num_docs", corpus.docs.size()}};
      *stats_json = dup_string(j.dump(2));
    }
    *out = new lintm_corpus{std::move(corpus)};
  });
}

int lintm_corpus_split(const lintm_corpus* corpus, double labeled_frac,
                       double unlabeled_frac, double test_frac, uint64_t seed,
                       lintm_corpus** labeled, lintm_corpus** unlabeled,
                       lintm_corpus** test) {
  return guard([&] {
    require(corpus, "corpus");
    lintm::SplitSpec spec;
    spec.labeled_frac = labeled_frac;
    spec.unlabeled_frac = unlabeled_frac;
    spec.test_frac = test_frac;
    spec.seed = seed;
    lintm::SplitResult r = lintm::split_dataset(corpus->corpus, spec);
    if (labeled) *labeled = new lintm_corpus{std::move(r.labeled)};
    if (unlabeled) *unlabeled = new lintm_corpus{std::move(r.unlabeled)};
    if (test) *test = new lintm_corpus{std::move(r.test)};
  });
}

int lintm_corpus_stats(const lintm_corpus* corpus, char** stats_json) {
  return guard([&] {
    require(corpus, "corpus");
    require(stats_json, "stats_json");
    const lintm::Corpus& c = corpus->corpus;
    std::size_t labeled_docs = 0;
    std::uint64_t total_tokens = 0;
    for (const lintm::Document& d : c.docs) {
      if (d.label >= 0) ++labeled_docs;
      total_tokens += d.total_count();
    }
    nlohmann::json j = {{"num_docs", c.docs.size()},
                        {"vocab_size", c.vocab.size()},
                        {"num_labels", c.num_labels},
                        {"labeled_docs", labeled_docs},
                        {"total_tokens", total_tokens}};
    *stats_json = dup_string(j.dump(2));
  });
}

void lintm_corpus_free(lintm_corpus* corpus) { delete corpus; }

int lintm_synth_generate(size_t vocab_size, size_t num_docs, uint64_t seed,
                         lintm_corpus** ideal, lintm_corpus** worst,
                         double* lower_bound) {
  return guard([&] {
    lintm::Rng rng(seed);
    lintm::SyntheticTrialParams params = lintm::gen_trial_params(rng, vocab_size);
    params.num_docs = num_docs;
    if (ideal) {
      *ideal = new lintm_corpus{lintm::gen_dataset(params, lintm::LabelMode::kIdeal)};
    }
    if (worst) {
      *worst =
          new lintm_corpus{lintm::gen_dataset(params, lintm::LabelMode::kWorstCase)};
    }
    if (lower_bound) {
      *lower_bound = lintm::empirical_perplexity_lower_bound(params, 200000);
    }
  });
}

int lintm_train(const char* config_json, const lintm_corpus* labeled,
                const lintm_corpus* unlabeled, lintm_model** out) {
  return guard([&] {
    require(config_json, "config_json");
    require(out, "out");

    lintm::ModelKind kind = lintm::ModelKind::kLintm;
    {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        throw lintm::ConfigError(std::string("config JSON parse error: ") + e.what());
      }
      if (!j.is_object()) throw lintm::ConfigError("config: expected a JSON object");
      if (j.contains("model")) {
        kind = lintm::model_kind_from_name(j.at("model").get<std::string>());
      }
    }
    lintm::TrainConfig cfg = lintm::train_config_from_json(config_json);

    auto ckpt = std::make_unique<lintm_model>();
    ckpt->ckpt.kind = kind;
    switch (kind) {
      case lintm::ModelKind::kLintm: {
        require(labeled, "labeled");
        lintm::Corpus empty_side;
        if (!unlabeled) {
          empty_side.vocab = labeled->corpus.vocab;
          empty_side.num_labels = labeled->corpus.num_labels;
        }
        const lintm::Corpus* unl = unlabeled ? &unlabeled->corpus : &empty_side;
        lintm::TrainResult r = lintm::train(labeled->corpus, *unl, cfg);
        ckpt->ckpt.lintm = std::move(r.params);
        ckpt->ckpt.loss_trace = std::move(r.loss_trace);
        cfg.vocab_size = ckpt->ckpt.lintm.enc.w1.extent(1);
        cfg.num_labels = static_cast<int>(ckpt->ckpt.lintm.beta.extent(0));
        break;
      }
      case lintm::ModelKind::kNtm: {
        cfg.use_classifier = false;
        cfg.num_labels = 1;
        lintm::Corpus pool = merge_unlabeled(labeled ? &labeled->corpus : nullptr,
                                             unlabeled ? &unlabeled->corpus : nullptr);
        pool.num_labels = 1;
        lintm::Corpus empty_side;
        empty_side.vocab = pool.vocab;
        empty_side.num_labels = 1;
        lintm::TrainResult r = lintm::train(empty_side, pool, cfg);
        ckpt->ckpt.lintm = std::move(r.params);
        ckpt->ckpt.loss_trace = std::move(r.loss_trace);
        cfg.vocab_size = ckpt->ckpt.lintm.enc.w1.extent(1);
        break;
      }
      case lintm::ModelKind::kEtm: {
        lintm::Corpus pool = merge_unlabeled(labeled ? &labeled->corpus : nullptr,
                                             unlabeled ? &unlabeled->corpus : nullptr);
        cfg.num_labels = 1;
        lintm::EtmTrainResult r = lintm::train_etm(pool, cfg);
        ckpt->ckpt.etm = std::move(r.params);
        ckpt->ckpt.loss_trace = std::move(r.loss_trace);
        cfg.vocab_size = ckpt->ckpt.etm.rho_embed.extent(1);
        break;
      }
      case lintm::ModelKind::kClf: {
        require(labeled, "labeled");
        lintm::TrainResult r = lintm::train_baseline_classifier(labeled->corpus, cfg);
        ckpt->ckpt.lintm = std::move(r.params);
        ckpt->ckpt.loss_trace = std::move(r.loss_trace);
        cfg.vocab_size = ckpt->ckpt.lintm.enc.w1.extent(1);
        cfg.num_labels = static_cast<int>(ckpt->ckpt.lintm.clf_w2.extent(0));
        break;
      }
    }
    ckpt->ckpt.config = cfg;
    *out = ckpt.release();
  });
}

int lintm_model_save(const lintm_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    lintm::save_checkpoint(model->ckpt, path);
  });
}

int lintm_model_load(const char* path, lintm_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new lintm_model{lintm::load_checkpoint(path)};
  });
}

void lintm_model_free(lintm_model* model) { delete model; }

int lintm_model_loss_trace(const lintm_model* model, const double** data,
                           size_t* len) {
  return guard([&] {
    require(model, "model");
    require(data, "data");
    require(len, "len");
    *data = model->ckpt.loss_trace.data();
    *len = model->ckpt.loss_trace.size();
  });
}

int lintm_eval(const lintm_model* model, const lintm_corpus* test,
               char** report_json) {
  return guard([&] {
    require(model, "model");
    require(test, "test");
    require(report_json, "report_json");
    lintm::MetricsReport report = lintm::evaluate(test->corpus, model->ckpt);
    *report_json = dup_string(lintm::report_to_json(report));
  });
}

int lintm_topics_text(const lintm_model* model, const lintm_corpus* corpus,
                      size_t top_n, char** text) {
  return guard([&] {
    require(model, "model");
    require(corpus, "corpus");
    require(text, "text");
    auto tables = lintm::all_topic_tables(model->ckpt, top_n, corpus->corpus.vocab);
    *text = dup_string(lintm::topics_to_text(tables));
  });
}

int lintm_topics_csv(const lintm_model* model, const lintm_corpus* corpus,
                     size_t top_n, char** csv) {
  return guard([&] {
    require(model, "model");
    require(corpus, "corpus");
    require(csv, "csv");
    auto tables = lintm::all_topic_tables(model->ckpt, top_n, corpus->corpus.vocab);
    *csv = dup_string(lintm::topics_to_csv(tables));
  });
}

}  // extern "C"
