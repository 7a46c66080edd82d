#pragma once

#include "core/etm.hpp"
#include "core/lintm_model.hpp"

namespace lintm {

// A trained model: kind, resolved config, parameters, loss history.
// JSON round-trips are lossless (doubles stored as 64-bit hex patterns).
struct Checkpoint {
  ModelKind kind = ModelKind::kLintm;
  TrainConfig config;
  LintmParams lintm;  // kLintm / kNtm / kClf
  EtmParams etm;      // kEtm
  std::vector<double> loss_trace;

  std::vector<std::pair<std::string, const DenseArray*>> named_params() const;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& json_text);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// TrainConfig <-> flat JSON object. Parsing starts from defaults (or the
// given base) and rejects unknown keys with a field-level message.
std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const std::string& json_text,
                                   const TrainConfig& base = {});

}  // namespace lintm
