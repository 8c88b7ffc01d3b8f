#pragma once

#include <string>

#include <json.hpp>

#include "textpure/advtrain.hpp"
#include "textpure/attack.hpp"
#include "textpure/model.hpp"
#include "textpure/noise.hpp"
#include "textpure/purify.hpp"
#include "textpure/train.hpp"

namespace textpure {

struct DataConfig {
  std::string train_path;
  std::string test_path;
  std::string embeddings_fixture;  // optional; skip-gram fallback when empty
  std::string format = "csv";
  int num_classes = 2;

  void validate() const;
};

struct EvalConfig {
  int sample = 0;  // 0: full test set
  int workers = 1;

  void validate() const;
};

// The single experiment configuration file. Flags override file values; the
// merged effective config is persisted verbatim into every output directory.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "runs/exp";
  DataConfig data;
  ModelConfig model;
  TrainConfig train;
  AdvTrainConfig adv;  // base mirrors `train`
  NoiseSpec noise;
  PurifyConfig purify;
  AttackConfig attack;
  EvalConfig eval;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::ordered_json to_json() const;
  void validate() const;

  // Hash of the canonical serialized config; stamped into reports.
  std::string fingerprint() const;

  // Derived per-purpose seeds so subsystems draw from disjoint streams.
  void propagate_seed();
};

// manifest.json listing FNV-1a hashes of every file under dir.
void write_manifest(const std::string& dir);

std::string hex64(std::uint64_t h);

}  // namespace textpure
