// Command-line surface for the lintm shared library: corpus ingestion,
// synthetic data generation, training, evaluation, and grid sweeps.
// Everything model-related goes through the C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lintm/lintm.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A failed library call, carrying the C API code as the exit code.
struct ApiError {
  int code;
  std::string message;
};

void check(int code, const std::string& what) {
  if (code != LINTM_OK) throw ApiError{code, what + ": " + lintm_last_error()};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  lintm_string_free(s);
  return out;
}

struct CorpusHandle {
  lintm_corpus* ptr = nullptr;
  CorpusHandle() = default;
  explicit CorpusHandle(lintm_corpus* p) : ptr(p) {}
  CorpusHandle(CorpusHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  CorpusHandle& operator=(CorpusHandle&& o) noexcept {
    std::swap(ptr, o.ptr);
    return *this;
  }
  CorpusHandle(const CorpusHandle&) = delete;
  CorpusHandle& operator=(const CorpusHandle&) = delete;
  ~CorpusHandle() { lintm_corpus_free(ptr); }
  lintm_corpus** out() { return &ptr; }
};

struct ModelHandle {
  lintm_model* ptr = nullptr;
  ~ModelHandle() { lintm_model_free(ptr); }
  lintm_model** out() { return &ptr; }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ApiError{3, "cannot open " + path.string() + " for writing"};
  out << content;
  if (!out) throw ApiError{3, "write failed for " + path.string()};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiError{3, "cannot open " + path.string()};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flat experiment description: corpus source, split, model, training
// overrides. Train-config keys stay in a pass-through JSON object that the
// library validates.
struct Experiment {
  std::string model = "lintm";
  std::string corpus_path;
  std::string agnews_csv;
  std::size_t min_count = 10;
  std::size_t max_vocab = 5000;
  std::size_t synth_vocab = 20;
  std::size_t synth_docs = 2000;
  std::uint64_t synth_seed = 0;
  std::string synth_labels = "ideal";  // or "worst"
  double labeled_frac = 0.4;
  double unlabeled_frac = 0.4;
  double test_frac = 0.2;
  std::uint64_t split_seed = 0;
  std::string out_dir;
  json train = json::object();

  json to_json() const {
    json j = {{"model", model},
              {"min_count", min_count},
              {"max_vocab", max_vocab},
              {"synth_vocab", synth_vocab},
              {"synth_docs", synth_docs},
              {"synth_seed", synth_seed},
              {"synth_labels", synth_labels},
              {"labeled_frac", labeled_frac},
              {"unlabeled_frac", unlabeled_frac},
              {"test_frac", test_frac},
              {"split_seed", split_seed}};
    if (!corpus_path.empty()) j["corpus"] = corpus_path;
    if (!agnews_csv.empty()) j["agnews_csv"] = agnews_csv;
    if (!out_dir.empty()) j["out_dir"] = out_dir;
    for (const auto& [key, value] : train.items()) j[key] = value;
    return j;
  }
};

template <typename T>
void take(json& j, const char* key, T& into) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      into = it->get<T>();
    } catch (const json::exception&) {
      throw ApiError{2, std::string("config: bad value for field '") + key + "'"};
    }
    j.erase(it);
  }
}

Experiment parse_experiment(const std::string& path) {
  Experiment e;
  if (path.empty()) return e;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& ex) {
    throw ApiError{2, "config JSON parse error: " + std::string(ex.what())};
  }
  if (!j.is_object()) throw ApiError{2, "config: expected a JSON object"};
  take(j, "model", e.model);
  take(j, "corpus", e.corpus_path);
  take(j, "agnews_csv", e.agnews_csv);
  take(j, "min_count", e.min_count);
  take(j, "max_vocab", e.max_vocab);
  take(j, "synth_vocab", e.synth_vocab);
  take(j, "synth_docs", e.synth_docs);
  take(j, "synth_seed", e.synth_seed);
  take(j, "synth_labels", e.synth_labels);
  take(j, "labeled_frac", e.labeled_frac);
  take(j, "unlabeled_frac", e.unlabeled_frac);
  take(j, "test_frac", e.test_frac);
  take(j, "split_seed", e.split_seed);
  take(j, "out_dir", e.out_dir);
  e.train = std::move(j);  // remaining keys are TrainConfig fields
  return e;
}

CorpusHandle load_source(const Experiment& e) {
  CorpusHandle corpus;
  if (!e.corpus_path.empty()) {
    check(lintm_corpus_load(e.corpus_path.c_str(), corpus.out()), "load corpus");
  } else if (!e.agnews_csv.empty()) {
    char* stats = nullptr;
    check(lintm_corpus_from_agnews(e.agnews_csv.c_str(), e.min_count, e.max_vocab,
                                   corpus.out(), &stats),
          "ingest csv");
    std::cerr << "ingest stats: " << take_string(stats) << '\n';
  } else {
    if (e.synth_labels != "ideal" && e.synth_labels != "worst") {
      throw ApiError{2, "config: synth_labels must be 'ideal' or 'worst'"};
    }
    CorpusHandle other;
    const bool ideal = e.synth_labels == "ideal";
    check(lintm_synth_generate(e.synth_vocab, e.synth_docs, e.synth_seed,
                               ideal ? corpus.out() : other.out(),
                               ideal ? other.out() : corpus.out(), nullptr),
          "generate synthetic corpus");
  }
  return corpus;
}

struct RunMetrics {
  std::optional<double> perplexity;
  std::optional<double> accuracy;
  json report;
};

// One full experiment: source -> split -> train -> evaluate.
RunMetrics run_experiment(const Experiment& e, ModelHandle* model_out) {
  CorpusHandle full = load_source(e);
  CorpusHandle labeled, unlabeled, test;
  check(lintm_corpus_split(full.ptr, e.labeled_frac, e.unlabeled_frac, e.test_frac,
                           e.split_seed, labeled.out(), unlabeled.out(), test.out()),
        "split corpus");

  json cfg = e.train;
  cfg["model"] = e.model;
  ModelHandle local;
  ModelHandle& model = model_out ? *model_out : local;
  const auto t0 = std::chrono::steady_clock::now();
  check(lintm_train(cfg.dump().c_str(), labeled.ptr, unlabeled.ptr, model.out()),
        "train");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  char* report_json = nullptr;
  check(lintm_eval(model.ptr, test.ptr, &report_json), "evaluate");
  RunMetrics m;
  m.report = json::parse(take_string(report_json));
  m.report["split_seed"] = e.split_seed;
  m.report["wall_time_sec"] = wall;
  if (m.report.contains("perplexity")) m.perplexity = m.report["perplexity"].get<double>();
  if (m.report.contains("accuracy")) m.accuracy = m.report["accuracy"].get<double>();
  return m;
}

std::string report_csv(const json& report) {
  std::ostringstream out;
  out.precision(17);
  out << "model,perplexity,accuracy,split_seed,wall_time_sec\n";
  out << report.value("model", std::string());
  out << ',';
  if (report.contains("perplexity")) out << report["perplexity"].get<double>();
  out << ',';
  if (report.contains("accuracy")) out << report["accuracy"].get<double>();
  out << ',' << report.value("split_seed", 0ULL) << ','
      << report.value("wall_time_sec", 0.0) << '\n';
  return out.str();
}

void write_artifacts(const Experiment& e, const ModelHandle& model,
                     const RunMetrics& metrics, const CorpusHandle& vocab_source) {
  if (e.out_dir.empty()) return;
  fs::create_directories(e.out_dir);
  const fs::path dir(e.out_dir);
  write_file(dir / "config.json", e.to_json().dump(2) + "\n");
  check(lintm_model_save(model.ptr, (dir / "checkpoint.json").string().c_str()),
        "save checkpoint");
  write_file(dir / "report.json", metrics.report.dump(2) + "\n");
  write_file(dir / "report.csv", report_csv(metrics.report));
  char* topics = nullptr;
  check(lintm_topics_text(model.ptr, vocab_source.ptr, 10, &topics), "render topics");
  write_file(dir / "topics.txt", take_string(topics));
}

void print_summary(const RunMetrics& m) {
  std::cout << "model: " << m.report.value("model", std::string()) << '\n';
  if (m.perplexity) std::cout << "perplexity: " << *m.perplexity << '\n';
  if (m.accuracy) std::cout << "accuracy: " << *m.accuracy << '\n';
}

// ---- subcommands ----

int cmd_synth_gen(const std::string& out_dir, std::size_t vocab, std::size_t docs,
                  std::uint64_t seed) {
  if (docs == 0) throw ApiError{2, "synth-gen: --num-docs must be positive"};
  CorpusHandle ideal, worst;
  double bound = 0.0;
  check(lintm_synth_generate(vocab, docs, seed, ideal.out(), worst.out(), &bound),
        "generate synthetic corpus");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  check(lintm_corpus_save(ideal.ptr, (dir / "ideal.json").string().c_str()),
        "save ideal corpus");
  check(lintm_corpus_save(worst.ptr, (dir / "worst.json").string().c_str()),
        "save worst-case corpus");
  json meta = {{"lower_bound", bound},
               {"vocab_size", vocab},
               {"num_docs", docs},
               {"seed", seed}};
  write_file(dir / "lower_bound.json", meta.dump(2) + "\n");
  std::cout << "lower bound: " << bound << '\n';
  return 0;
}

int cmd_train(const Experiment& e) {
  ModelHandle model;
  RunMetrics metrics = run_experiment(e, &model);
  CorpusHandle full = load_source(e);  // vocabulary for the topic tables
  write_artifacts(e, model, metrics, full);
  print_summary(metrics);
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& corpus_path,
             const std::string& out_path) {
  ModelHandle model;
  check(lintm_model_load(ckpt_path.c_str(), model.out()), "load checkpoint");
  CorpusHandle corpus;
  check(lintm_corpus_load(corpus_path.c_str(), corpus.out()), "load corpus");
  char* report = nullptr;
  check(lintm_eval(model.ptr, corpus.ptr, &report), "evaluate");
  const std::string text = take_string(report);
  if (!out_path.empty()) write_file(out_path, text + "\n");
  std::cout << text << '\n';
  return 0;
}

int cmd_topics(const std::string& ckpt_path, const std::string& corpus_path,
               std::size_t top_n, bool csv) {
  ModelHandle model;
  check(lintm_model_load(ckpt_path.c_str(), model.out()), "load checkpoint");
  CorpusHandle corpus;
  check(lintm_corpus_load(corpus_path.c_str(), corpus.out()), "load corpus");
  char* text = nullptr;
  check(csv ? lintm_topics_csv(model.ptr, corpus.ptr, top_n, &text)
            : lintm_topics_text(model.ptr, corpus.ptr, top_n, &text),
        "render topics");
  std::cout << take_string(text);
  return 0;
}

// ---- sweep ----

struct Stat {
  std::vector<double> xs;
  void add(double x) { xs.push_back(x); }
  double mean() const {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  }
  double stddev() const {
    if (xs.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
  }
};

struct SweepAxes {
  std::vector<std::string> model;
  std::vector<double> unlabeled_frac, rho, tau, lambda;
  std::vector<std::size_t> num_topics;
  std::vector<std::uint64_t> seed;
};

// One grid point's aggregate over trials; schema-stable regardless of
// which runs failed.
json sweep_row(const Experiment& base, const std::string& model, double unl_frac,
               std::size_t topics, double rho, double tau, double lambda,
               std::uint64_t seed, std::size_t trials) {
  json row = {{"model", model},          {"unlabeled_frac", unl_frac},
              {"num_topics", topics},    {"rho", rho},
              {"tau", tau},              {"lambda", lambda},
              {"seed", seed},            {"trials", trials},
              {"perplexity_mean", nullptr}, {"perplexity_std", nullptr},
              {"accuracy_mean", nullptr},   {"accuracy_std", nullptr},
              {"status", "ok"},          {"error", ""}};
  Stat ppl, acc;
  for (std::size_t t = 0; t < trials; ++t) {
    Experiment e = base;
    e.model = model;
    e.unlabeled_frac = unl_frac;
    e.train["num_topics"] = topics;
    e.train["rho"] = rho;
    e.train["tau"] = tau;
    e.train["lambda"] = lambda;
    e.train["seed"] = seed + t;
    e.split_seed = base.split_seed + t;
    e.synth_seed = base.synth_seed + t;
    e.out_dir.clear();
    try {
      RunMetrics m = run_experiment(e, nullptr);
      if (m.perplexity) ppl.add(*m.perplexity);
      if (m.accuracy) acc.add(*m.accuracy);
    } catch (const ApiError& err) {
      row["status"] = "failed";
      row["error"] = err.message;
      break;
    }
  }
  if (row["status"] == "ok") {
    if (!ppl.xs.empty()) {
      row["perplexity_mean"] = ppl.mean();
      row["perplexity_std"] = ppl.stddev();
    }
    if (!acc.xs.empty()) {
      row["accuracy_mean"] = acc.mean();
      row["accuracy_std"] = acc.stddev();
    }
  }
  return row;
}

std::string sweep_csv(const json& rows) {
  static const char* kCols[] = {"model",           "unlabeled_frac", "num_topics",
                                "rho",             "tau",            "lambda",
                                "seed",            "trials",         "perplexity_mean",
                                "perplexity_std",  "accuracy_mean",  "accuracy_std",
                                "status",          "error"};
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < std::size(kCols); ++i) {
    out << (i ? "," : "") << kCols[i];
  }
  out << '\n';
  for (const json& row : rows) {
    for (std::size_t i = 0; i < std::size(kCols); ++i) {
      if (i) out << ',';
      const json& cell = row.at(kCols[i]);
      if (cell.is_null()) continue;
      if (cell.is_string()) {
        std::string s = cell.get<std::string>();
        for (char& c : s) {
          if (c == ',' || c == '\n') c = ';';
        }
        out << s;
      } else if (cell.is_number_float()) {
        out << cell.get<double>();
      } else {
        out << cell.dump();
      }
    }
    out << '\n';
  }
  return out.str();
}

int cmd_sweep(const std::string& config_path, std::size_t trials_flag) {
  json raw;
  try {
    raw = json::parse(read_file(config_path));
  } catch (const json::exception& ex) {
    throw ApiError{2, "config JSON parse error: " + std::string(ex.what())};
  }
  if (!raw.is_object()) throw ApiError{2, "config: expected a JSON object"};

  SweepAxes axes;
  std::size_t trials = trials_flag;
  take(raw, "sweep_model", axes.model);
  take(raw, "sweep_unlabeled_frac", axes.unlabeled_frac);
  take(raw, "sweep_num_topics", axes.num_topics);
  take(raw, "sweep_rho", axes.rho);
  take(raw, "sweep_tau", axes.tau);
  take(raw, "sweep_lambda", axes.lambda);
  take(raw, "sweep_seed", axes.seed);
  if (trials == 0) {
    trials = 1;
    take(raw, "trials", trials);
  } else {
    std::size_t ignored = 0;
    take(raw, "trials", ignored);
  }
  if (trials == 0) throw ApiError{2, "sweep: trials must be positive"};

  const std::string tmp = "__sweep_base__";
  write_file(tmp, raw.dump());
  Experiment base = parse_experiment(tmp);
  fs::remove(tmp);
  if (base.out_dir.empty()) throw ApiError{2, "sweep: out_dir is required"};

  // Unset axes collapse to the base config's value.
  if (axes.model.empty()) axes.model = {base.model};
  if (axes.unlabeled_frac.empty()) axes.unlabeled_frac = {base.unlabeled_frac};
  if (axes.num_topics.empty()) {
    axes.num_topics = {base.train.value("num_topics", std::size_t{10})};
  }
  if (axes.rho.empty()) axes.rho = {base.train.value("rho", 1.0)};
  if (axes.tau.empty()) axes.tau = {base.train.value("tau", 1.0)};
  if (axes.lambda.empty()) axes.lambda = {base.train.value("lambda", 0.5)};
  if (axes.seed.empty()) axes.seed = {base.train.value("seed", std::uint64_t{0})};

  json rows = json::array();
  for (const std::string& model : axes.model) {
    for (double uf : axes.unlabeled_frac) {
      for (std::size_t k : axes.num_topics) {
        for (double rho : axes.rho) {
          for (double tau : axes.tau) {
            for (double lambda : axes.lambda) {
              for (std::uint64_t seed : axes.seed) {
                json row =
                    sweep_row(base, model, uf, k, rho, tau, lambda, seed, trials);
                std::cerr << row.dump() << '\n';
                rows.push_back(std::move(row));
              }
            }
          }
        }
      }
    }
  }
  fs::create_directories(base.out_dir);
  const fs::path dir(base.out_dir);
  write_file(dir / "sweep.json", rows.dump(2) + "\n");
  write_file(dir / "sweep.csv", sweep_csv(rows));
  std::cout << "wrote " << rows.size() << " rows to " << base.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lintm: semi-supervised neural topic modeling"};
  app.require_subcommand(1);

  // synth-gen
  std::string sg_out = "synth";
  std::size_t sg_vocab = 20, sg_docs = 2000;
  std::uint64_t sg_seed = 0;
  auto* synth = app.add_subcommand("synth-gen", "Generate a synthetic corpus pair");
  synth->add_option("--out", sg_out, "Output directory");
  synth->add_option("--vocab-size", sg_vocab, "Vocabulary size (even)");
  synth->add_option("--num-docs", sg_docs, "Number of documents");
  synth->add_option("--seed", sg_seed, "Trial seed");

  // shared train-like options
  auto add_experiment_flags = [](CLI::App* cmd, std::string& config_path,
                                 Experiment& flags, std::vector<std::string>& set) {
    cmd->add_option("--config", config_path, "Experiment config JSON");
    cmd->add_option("--model", flags.model)->each([&set](const std::string&) {
      set.push_back("model");
    });
    cmd->add_option("--corpus", flags.corpus_path, "Corpus JSON path")
        ->each([&set](const std::string&) { set.push_back("corpus"); });
    cmd->add_option("--agnews-csv", flags.agnews_csv)
        ->each([&set](const std::string&) { set.push_back("agnews_csv"); });
    cmd->add_option("--out", flags.out_dir, "Run directory")
        ->each([&set](const std::string&) { set.push_back("out_dir"); });
    cmd->add_option("--labeled-frac", flags.labeled_frac)
        ->each([&set](const std::string&) { set.push_back("labeled_frac"); });
    cmd->add_option("--unlabeled-frac", flags.unlabeled_frac)
        ->each([&set](const std::string&) { set.push_back("unlabeled_frac"); });
    cmd->add_option("--test-frac", flags.test_frac)
        ->each([&set](const std::string&) { set.push_back("test_frac"); });
    cmd->add_option("--split-seed", flags.split_seed)
        ->each([&set](const std::string&) { set.push_back("split_seed"); });
    cmd->add_option("--synth-seed", flags.synth_seed)
        ->each([&set](const std::string&) { set.push_back("synth_seed"); });
    cmd->add_option("--synth-labels", flags.synth_labels)
        ->each([&set](const std::string&) { set.push_back("synth_labels"); });
  };
  auto add_train_overrides = [](CLI::App* cmd, json& overrides) {
    static const char* kDoubleKeys[] = {"tau", "rho", "lambda", "lr"};
    static const char* kSizeKeys[] = {"num_topics", "hidden_enc", "hidden_clf",
                                      "embed_dim", "batch_size", "epochs",
                                      "pretrain_epochs"};
    for (const char* key : kDoubleKeys) {
      cmd->add_option_function<double>(
          std::string("--") + key, [&overrides, key](double v) { overrides[key] = v; });
    }
    for (const char* key : kSizeKeys) {
      std::string flag = std::string("--") + key;
      for (char& c : flag) {
        if (c == '_') c = '-';
      }
      cmd->add_option_function<std::size_t>(
          flag, [&overrides, key](std::size_t v) { overrides[key] = v; });
    }
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&overrides](std::uint64_t v) { overrides["seed"] = v; });
    cmd->add_option_function<long>("--kl-anneal-steps", [&overrides](long v) {
      overrides["kl_anneal_steps"] = v;
    });
  };

  std::string tr_config;
  Experiment tr_flags;
  std::vector<std::string> tr_set;
  json tr_overrides = json::object();
  auto* train_cmd = app.add_subcommand("train", "Train a model and evaluate it");
  add_experiment_flags(train_cmd, tr_config, tr_flags, tr_set);
  add_train_overrides(train_cmd, tr_overrides);

  std::string bc_config;
  Experiment bc_flags;
  std::vector<std::string> bc_set;
  json bc_overrides = json::object();
  auto* baseline_cmd =
      app.add_subcommand("baseline-clf", "Train the standalone baseline classifier");
  add_experiment_flags(baseline_cmd, bc_config, bc_flags, bc_set);
  add_train_overrides(baseline_cmd, bc_overrides);

  std::string ev_ckpt, ev_corpus, ev_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a corpus");
  eval_cmd->add_option("--checkpoint", ev_ckpt)->required();
  eval_cmd->add_option("--corpus", ev_corpus)->required();
  eval_cmd->add_option("--out", ev_out, "Also write the report here");

  std::string tp_ckpt, tp_corpus;
  std::size_t tp_n = 10;
  bool tp_csv = false;
  auto* topics_cmd = app.add_subcommand("topics", "Print per-topic top words");
  topics_cmd->add_option("--checkpoint", tp_ckpt)->required();
  topics_cmd->add_option("--corpus", tp_corpus)->required();
  topics_cmd->add_option("--top-n", tp_n);
  topics_cmd->add_flag("--csv", tp_csv, "CSV instead of aligned text");

  std::string sw_config;
  std::size_t sw_trials = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config-driven grid sweep");
  sweep_cmd->add_option("--config", sw_config)->required();
  sweep_cmd->add_option("--trials", sw_trials, "Trials per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  auto merge = [](const std::string& config_path, Experiment& flags,
                  const std::vector<std::string>& set, const json& overrides) {
    Experiment e = parse_experiment(config_path);
    auto on = [&set](const char* k) {
      return std::find(set.begin(), set.end(), k) != set.end();
    };
    if (on("model")) e.model = flags.model;
    if (on("corpus")) e.corpus_path = flags.corpus_path;
    if (on("agnews_csv")) e.agnews_csv = flags.agnews_csv;
    if (on("out_dir")) e.out_dir = flags.out_dir;
    if (on("labeled_frac")) e.labeled_frac = flags.labeled_frac;
    if (on("unlabeled_frac")) e.unlabeled_frac = flags.unlabeled_frac;
    if (on("test_frac")) e.test_frac = flags.test_frac;
    if (on("split_seed")) e.split_seed = flags.split_seed;
    if (on("synth_seed")) e.synth_seed = flags.synth_seed;
    if (on("synth_labels")) e.synth_labels = flags.synth_labels;
    for (const auto& [key, value] : overrides.items()) e.train[key] = value;
    return e;
  };

  try {
    if (synth->parsed()) return cmd_synth_gen(sg_out, sg_vocab, sg_docs, sg_seed);
    if (train_cmd->parsed()) {
      return cmd_train(merge(tr_config, tr_flags, tr_set, tr_overrides));
    }
    if (baseline_cmd->parsed()) {
      Experiment e = merge(bc_config, bc_flags, bc_set, bc_overrides);
      e.model = "clf";
      return cmd_train(e);
    }
    if (eval_cmd->parsed()) return cmd_eval(ev_ckpt, ev_corpus, ev_out);
    if (topics_cmd->parsed()) return cmd_topics(tp_ckpt, tp_corpus, tp_n, tp_csv);
    if (sweep_cmd->parsed()) return cmd_sweep(sw_config, sw_trials);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
