#pragma once

#include <string>

#include "textpure/config.hpp"
#include "textpure/embedding.hpp"
#include "textpure/evaluate.hpp"

namespace textpure {

// Everything assembled from the data section of a config: vocabulary from the
// training corpus, encoded splits, attack-side embeddings and synonym table.
struct CorpusBundle {
  Vocabulary vocab;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  EmbeddingTable embeddings;
  SynonymTable synonyms;
};

CorpusBundle load_corpus_bundle(const ExperimentConfig& cfg);

AttackResources attack_resources(const CorpusBundle& bundle);

enum class TrainMode { kPlain, kMlm, kJoint, kAdv };

TrainMode parse_train_mode(const std::string& name);
std::string train_mode_name(TrainMode mode);

JointModel run_training(const CorpusBundle& bundle, const ExperimentConfig& cfg,
                        TrainMode mode, TrainLog* log = nullptr);

}  // namespace textpure
