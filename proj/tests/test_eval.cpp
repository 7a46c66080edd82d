#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "core/evalkit.hpp"
#include "core/synthlab.hpp"

using namespace lintm;

namespace {

Corpus small_corpus(std::uint64_t seed, std::size_t docs = 300) {
  Rng rng(seed);
  SyntheticTrialParams tp = gen_trial_params(rng, 20);
  tp.num_docs = docs;
  return gen_dataset(tp, LabelMode::kIdeal);
}

Checkpoint trained_checkpoint(const Corpus& train_split, const Corpus& unl_split,
                              std::size_t epochs = 10) {
  TrainConfig cfg;
  cfg.num_topics = 2;
  cfg.hidden_enc = 25;
  cfg.hidden_clf = 25;
  cfg.epochs = epochs;
  cfg.pretrain_epochs = 2;
  cfg.seed = 11;
  TrainResult r = train(train_split, unl_split, cfg);
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kLintm;
  cfg.vocab_size = train_split.vocab.size();
  cfg.num_labels = train_split.num_labels;
  ckpt.config = cfg;
  ckpt.lintm = std::move(r.params);
  ckpt.loss_trace = std::move(r.loss_trace);
  return ckpt;
}

}  // namespace

TEST_CASE("perplexity: forced uniform decoder gives exactly V") {
  Corpus c = small_corpus(1);
  TrainConfig cfg;
  cfg.vocab_size = 20;
  cfg.num_labels = 2;
  cfg.num_topics = 2;
  cfg.hidden_enc = 5;
  cfg.hidden_clf = 5;
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kLintm;
  ckpt.config = cfg;
  ckpt.lintm = init_lintm_params(cfg);
  ckpt.lintm.beta.fill(0.0);  // every topic row becomes uniform
  CHECK(perplexity(c, ckpt) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("perplexity: near-one-hot decoder approaches 1") {
  // single degenerate topic putting all mass on word 0, documents of only
  // word 0
  TrainConfig cfg;
  cfg.vocab_size = 4;
  cfg.num_labels = 1;
  cfg.num_topics = 1;
  cfg.hidden_enc = 3;
  cfg.use_classifier = false;
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kNtm;
  ckpt.config = cfg;
  ckpt.lintm = init_lintm_params(cfg);
  for (std::size_t v = 0; v < 4; ++v) {
    ckpt.lintm.beta.at3(0, 0, v) = v == 0 ? 60.0 : 0.0;
  }
  Corpus c;
  c.vocab = Vocabulary({"w0", "w1", "w2", "w3"});
  c.num_labels = 1;
  Document d;
  d.id = "d0";
  d.counts = {{0, 5}};
  d.label = 0;
  c.docs.push_back(d);
  CHECK(perplexity(c, ckpt) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("perplexity: trained model beats uniform and eval is deterministic") {
  Corpus c = small_corpus(2, 600);
  SplitSpec spec;
  spec.labeled_frac = 0.5;
  spec.unlabeled_frac = 0.3;
  spec.test_frac = 0.2;
  SplitResult split = split_dataset(c, spec);
  Checkpoint ckpt = trained_checkpoint(split.labeled, split.unlabeled, 20);
  const double p1 = perplexity(split.test, ckpt);
  const double p2 = perplexity(split.test, ckpt);
  CHECK(p1 == p2);
  CHECK(p1 < 20.0);
}

TEST_CASE("perplexity: vocabulary mismatch and empty test are rejected") {
  Corpus c = small_corpus(3);
  TrainConfig cfg;
  cfg.vocab_size = 10;
  cfg.num_labels = 2;
  cfg.num_topics = 2;
  cfg.hidden_enc = 3;
  cfg.hidden_clf = 3;
  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.lintm = init_lintm_params(cfg);
  CHECK_THROWS_AS(perplexity(c, ckpt), ConfigError);
  Corpus empty;
  empty.vocab = c.vocab;
  empty.num_labels = 2;
  CHECK_THROWS_AS(perplexity(empty, ckpt), ConfigError);
}

TEST_CASE("accuracy: uniform classifier degenerates to the class-0 base rate") {
  Corpus c = small_corpus(4);
  TrainConfig cfg;
  cfg.vocab_size = 20;
  cfg.num_labels = 2;
  cfg.num_topics = 2;
  cfg.hidden_enc = 5;
  cfg.hidden_clf = 5;
  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.lintm = init_lintm_params(cfg);
  ckpt.lintm.clf_w1.fill(0.0);
  ckpt.lintm.clf_b1.fill(0.0);
  ckpt.lintm.clf_w2.fill(0.0);
  ckpt.lintm.clf_b2.fill(0.0);
  std::size_t zeros = 0;
  for (const Document& d : c.docs) zeros += d.label == 0 ? 1 : 0;
  CHECK(accuracy(c, ckpt) ==
        doctest::Approx(static_cast<double>(zeros) / c.docs.size()));
}

TEST_CASE("accuracy: trained classifier is essentially perfect here") {
  Corpus c = small_corpus(5, 600);
  SplitSpec spec;
  spec.labeled_frac = 0.5;
  spec.unlabeled_frac = 0.3;
  spec.test_frac = 0.2;
  SplitResult split = split_dataset(c, spec);
  Checkpoint ckpt = trained_checkpoint(split.labeled, split.unlabeled);
  Corpus test = split.test;
  CHECK(accuracy(test, ckpt) >= 0.95);
}

TEST_CASE("top_words: uniform rows fall back to lexicographic order") {
  TrainConfig cfg;
  cfg.vocab_size = 5;
  cfg.num_labels = 1;
  cfg.num_topics = 1;
  cfg.hidden_enc = 3;
  cfg.use_classifier = false;
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kNtm;
  ckpt.config = cfg;
  ckpt.lintm = init_lintm_params(cfg);
  ckpt.lintm.beta.fill(0.0);
  Vocabulary vocab({"delta", "alpha", "echo", "bravo", "charlie"});
  auto words = top_words(ckpt, 0, 0, 3, vocab);
  REQUIRE(words.size() == 3);
  CHECK(words[0].word == "alpha");
  CHECK(words[1].word == "bravo");
  CHECK(words[2].word == "charlie");
  for (const auto& w : words) CHECK(w.prob == doctest::Approx(0.2));

  auto all = top_words(ckpt, 0, 0, 5, vocab);
  double sum = 0.0;
  for (const auto& w : all) sum += w.prob;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("evaluate: report fields follow the model kind") {
  Corpus c = small_corpus(6, 400);
  SplitSpec spec;
  spec.labeled_frac = 0.5;
  spec.unlabeled_frac = 0.3;
  spec.test_frac = 0.2;
  SplitResult split = split_dataset(c, spec);
  Checkpoint ckpt = trained_checkpoint(split.labeled, split.unlabeled, 3);
  MetricsReport r = evaluate(split.test, ckpt);
  CHECK(r.model == "lintm");
  CHECK(r.perplexity.has_value());
  CHECK(r.accuracy.has_value());
  CHECK(r.per_label_topics.size() == 4);  // L=2 labels x K=2 topics

  const std::string json_text = report_to_json(r);
  CHECK(json_text.find("\"perplexity\"") != std::string::npos);
  const std::string csv = report_to_csv_row(r, true);
  CHECK(csv.find("model,") == 0);
}

TEST_CASE("checkpoint: json round-trip is bit-exact") {
  Corpus c = small_corpus(7, 300);
  SplitSpec spec;
  spec.labeled_frac = 0.5;
  spec.unlabeled_frac = 0.3;
  spec.test_frac = 0.2;
  SplitResult split = split_dataset(c, spec);
  Checkpoint ckpt = trained_checkpoint(split.labeled, split.unlabeled, 2);

  const std::string j = checkpoint_to_json(ckpt);
  Checkpoint back = checkpoint_from_json(j);
  CHECK(back.kind == ckpt.kind);
  CHECK(back.loss_trace == ckpt.loss_trace);
  auto na = ckpt.named_params();
  auto nb = back.named_params();
  REQUIRE(na.size() == nb.size());
  for (std::size_t i = 0; i < na.size(); ++i) {
    CHECK(na[i].second->flat() == nb[i].second->flat());
  }
  CHECK(checkpoint_to_json(back) == j);

  // metrics after the round trip are bit-identical
  CHECK(perplexity(split.test, back) == perplexity(split.test, ckpt));
  CHECK(accuracy(split.test, back) == accuracy(split.test, ckpt));
}

TEST_CASE("checkpoint: file save/load and schema errors") {
  TrainConfig cfg;
  cfg.vocab_size = 6;
  cfg.num_labels = 2;
  cfg.num_topics = 2;
  cfg.hidden_enc = 3;
  cfg.hidden_clf = 3;
  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.lintm = init_lintm_params(cfg);
  const char* path = "./tmp_test_ckpt.json";
  save_checkpoint(ckpt, path);
  Checkpoint back = load_checkpoint(path);
  CHECK(back.lintm.beta.flat() == ckpt.lintm.beta.flat());
  std::remove(path);

  CHECK_THROWS_AS(checkpoint_from_json("nope"), DataError);
  CHECK_THROWS_AS(checkpoint_from_json("{\"model\":\"lintm\"}"), DataError);
}

TEST_CASE("train_config json: defaults, overrides, unknown keys") {
  TrainConfig cfg = train_config_from_json("{\"num_topics\": 7, \"rho\": 0.0}");
  CHECK(cfg.num_topics == 7);
  CHECK(cfg.rho == 0.0);
  CHECK(cfg.lambda == 0.5);
  CHECK_THROWS_AS(train_config_from_json("{\"numtopics\": 7}"), ConfigError);
  CHECK_THROWS_AS(train_config_from_json("{\"rho\": \"x\"}"), ConfigError);
}
