#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "textpure/dataset.hpp"
#include "textpure/embedding.hpp"
#include "textpure/vocab.hpp"

// Score-based black-box attackers. This module never sees model internals:
// the victim is an opaque text -> probability-vector query interface.

namespace textpure {

class Victim {
 public:
  virtual ~Victim() = default;
  virtual Eigen::VectorXd scores(const TokenSequence& text) const = 0;
};

enum class CandidateSource { kSynonymTable, kMlm };

struct AttackConfig {
  int k = 8;                          // candidate list size
  double sim_threshold = 0.5;         // per-word embedding cosine floor
  double sentence_sim_threshold = 0.7;
  double max_change_rate = 0.4;       // fraction of substitutable tokens
  CandidateSource source = CandidateSource::kSynonymTable;
  int query_budget = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

// Attacker-side mask-and-propose callback for MLM candidates; supplied from
// outside so this module stays independent of the model implementation.
using MlmProposer =
    std::function<std::vector<int>(const TokenSequence&, int pos, int k)>;

struct AttackResources {
  const SynonymTable* synonyms = nullptr;
  const EmbeddingTable* embeddings = nullptr;  // sentence-similarity surrogate
  const Vocabulary* vocab = nullptr;
  MlmProposer mlm;
};

struct Substitution {
  int position = 0;
  int original_id = 0;
  int new_id = 0;
};

struct AttackResult {
  bool attacked = false;  // false: victim already misclassified the example
  bool success = false;
  TokenSequence adversarial;
  std::vector<Substitution> substitutions;
  int queries = 0;
  double change_rate = 0.0;
  Eigen::VectorXd final_scores;
};

struct AttackSummary {
  int total = 0;
  int attacked = 0;
  int successes = 0;
  double mean_queries = 0.0;
  double mean_change_rate = 0.0;  // over successful attacks
};

bool is_substitutable(int id, const Vocabulary& vocab);

// Positions ranked by the drop in true-class probability when the token is
// blanked to UNK; descending, ties broken by position.
std::vector<int> word_importance(const Victim& victim,
                                 const TokenSequence& text, int label,
                                 const Vocabulary& vocab, int& queries,
                                 int query_budget = 1 << 30);

std::vector<int> get_candidates(int original_id, int pos,
                                const TokenSequence& text,
                                const AttackConfig& cfg,
                                const AttackResources& res);

AttackResult greedy_attack(const Victim& victim, const LabeledExample& example,
                           const AttackConfig& cfg,
                           const AttackResources& res);

struct DatasetAttackOutcome {
  std::vector<AttackResult> results;
  AttackSummary summary;
};

DatasetAttackOutcome attack_dataset(const Victim& victim,
                                    const std::vector<LabeledExample>& examples,
                                    const AttackConfig& cfg,
                                    const AttackResources& res,
                                    int workers = 1);

}  // namespace textpure
