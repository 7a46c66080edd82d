#include "core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lintm {

namespace {

const char* kHexDigits = "0123456789abcdef";

std::string doubles_to_hex(const std::vector<double>& values) {
  std::string out;
  out.reserve(values.size() * 16);
  for (double d : values) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int shift = 60; shift >= 0; shift -= 4) {
      out.push_back(kHexDigits[(bits >> shift) & 0xF]);
    }
  }
  return out;
}

std::vector<double> hex_to_doubles(const std::string& hex) {
  if (hex.size() % 16 != 0) throw DataError("checkpoint: malformed hex payload");
  std::vector<double> out;
  out.reserve(hex.size() / 16);
  for (std::size_t i = 0; i < hex.size(); i += 16) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < 16; ++j) {
      const char c = hex[i + j];
      std::uint64_t nibble;
      if (c >= '0' && c <= '9') {
        nibble = static_cast<std::uint64_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        nibble = static_cast<std::uint64_t>(c - 'a' + 10);
      } else {
        throw DataError("checkpoint: invalid hex digit");
      }
      bits = (bits << 4) | nibble;
    }
    out.push_back(std::bit_cast<double>(bits));
  }
  return out;
}

nlohmann::json config_to_jobj(const TrainConfig& c) {
  return {{"vocab_size", c.vocab_size},
          {"num_labels", c.num_labels},
          {"num_topics", c.num_topics},
          {"hidden_enc", c.hidden_enc},
          {"hidden_clf", c.hidden_clf},
          {"embed_dim", c.embed_dim},
          {"tau", c.tau},
          {"rho", c.rho},
          {"lambda", c.lambda},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"pretrain_epochs", c.pretrain_epochs},
          {"seed", c.seed},
          {"kl_anneal_steps", c.kl_anneal_steps},
          {"use_classifier", c.use_classifier},
          {"etm_freeze_rho", c.etm_freeze_rho}};
}

TrainConfig config_from_jobj(const nlohmann::json& j, const TrainConfig& base) {
  TrainConfig c = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "vocab_size") c.vocab_size = value.get<std::size_t>();
      else if (key == "num_labels") c.num_labels = value.get<int>();
      else if (key == "num_topics") c.num_topics = value.get<std::size_t>();
      else if (key == "hidden_enc") c.hidden_enc = value.get<std::size_t>();
      else if (key == "hidden_clf") c.hidden_clf = value.get<std::size_t>();
      else if (key == "embed_dim") c.embed_dim = value.get<std::size_t>();
      else if (key == "tau") c.tau = value.get<double>();
      else if (key == "rho") c.rho = value.get<double>();
      else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "lr") c.lr = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "pretrain_epochs") c.pretrain_epochs = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "kl_anneal_steps") c.kl_anneal_steps = value.get<long>();
      else if (key == "use_classifier") c.use_classifier = value.get<bool>();
      else if (key == "etm_freeze_rho") c.etm_freeze_rho = value.get<bool>();
      else if (key == "model") { /* handled by the caller */ }
      else throw ConfigError("config: unknown field '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config: bad value for field '" + key + "'");
    }
  }
  return c;
}

nlohmann::json params_to_jobj(
    const std::vector<std::pair<std::string, const DenseArray*>>& named) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, arr] : named) {
    out[name] = {{"shape", arr->shape()}, {"data", doubles_to_hex(arr->flat())}};
  }
  return out;
}

DenseArray param_from_jobj(const nlohmann::json& j) {
  auto shape = j.at("shape").get<std::vector<std::size_t>>();
  auto data = hex_to_doubles(j.at("data").get<std::string>());
  return DenseArray(std::move(shape), std::move(data));
}

}  // namespace

std::vector<std::pair<std::string, const DenseArray*>> Checkpoint::named_params()
    const {
  return kind == ModelKind::kEtm ? etm.named() : lintm.named();
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["model"] = model_kind_name(ckpt.kind);
  j["config"] = config_to_jobj(ckpt.config);
  j["params"] = params_to_jobj(ckpt.named_params());
  j["loss_trace"] = ckpt.loss_trace;
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint JSON parse error: ") + e.what());
  }
  try {
    Checkpoint ckpt;
    ckpt.kind = model_kind_from_name(j.at("model").get<std::string>());
    ckpt.config = config_from_jobj(j.at("config"), TrainConfig{});
    if (j.contains("loss_trace")) {
      ckpt.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    }
    const nlohmann::json& params = j.at("params");
    if (ckpt.kind == ModelKind::kEtm) {
      for (auto& [name, arr] : ckpt.etm.named()) *arr = param_from_jobj(params.at(name));
    } else {
      for (auto& [name, arr] : ckpt.lintm.named()) {
        *arr = param_from_jobj(params.at(name));
      }
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint JSON schema error: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("save_checkpoint: cannot open " + path);
  out << checkpoint_to_json(ckpt);
  if (!out) throw DataError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_checkpoint: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

std::string train_config_to_json(const TrainConfig& cfg) {
  return config_to_jobj(cfg).dump();
}

TrainConfig train_config_from_json(const std::string& json_text,
                                   const TrainConfig& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  return config_from_jobj(j, base);
}

}  // namespace lintm
