#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "textpure/attack.hpp"
#include "textpure/purify.hpp"
#include "textpure/victims.hpp"

namespace textpure {

struct ExampleOutcome {
  int index = 0;
  bool correct_clean = false;
  bool attack_success = false;
  int queries = 0;
  double change_rate = 0.0;
};

struct EvalReport {
  double original_accuracy = 0.0;
  double after_attack_accuracy = 0.0;  // denominated over the full test set
  double attack_success_rate = 0.0;
  double mean_change_rate = 0.0;
  double mean_queries = 0.0;
  int total = 0;
  std::vector<ExampleOutcome> outcomes;
  std::string config_fingerprint;

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

// Clean pass + attack pass over the full test set; examples the victim already
// misclassifies count against after-attack accuracy without being attacked.
EvalReport evaluate_defense(const Victim& victim,
                            const std::vector<LabeledExample>& examples,
                            const AttackConfig& cfg,
                            const AttackResources& res,
                            const std::string& fingerprint, int workers = 1);

enum class ClassifierKind { kNone, kVanilla, kCombined, kAdversarial };

struct DefenseSpec {
  std::string name;
  ClassifierKind kind = ClassifierKind::kNone;
  bool purify = false;
  bool multi_recovery = true;
  bool mask_insertion = true;
};

struct AblationModels {
  const JointModel* classifier = nullptr;  // plain fine-tuned classifier
  const JointModel* mlm = nullptr;         // vanilla MLM-only model
  const JointModel* joint = nullptr;       // combined classifier + MLM
  const JointModel* adversarial = nullptr; // adversarially trained joint model
};

// The four defense configurations compared in the ablation study.
std::vector<DefenseSpec> default_ablation_grid();

std::unique_ptr<Victim> make_defense_victim(const DefenseSpec& spec,
                                            const AblationModels& models,
                                            const Vocabulary& vocab,
                                            const PurifyConfig& purify_cfg);

struct AblationRow {
  std::string name;
  EvalReport report;
};

std::vector<AblationRow> ablation_grid(
    const std::vector<LabeledExample>& examples, const AblationModels& models,
    const Vocabulary& vocab, const PurifyConfig& purify_cfg,
    const AttackConfig& attack_cfg, const AttackResources& res,
    const std::vector<DefenseSpec>& grid, const std::string& fingerprint,
    int workers = 1);

// After-attack accuracy as a function of candidate size K, shared seeds.
std::vector<std::pair<int, double>> candidate_size_sweep(
    const Victim& victim, const std::vector<LabeledExample>& examples,
    const AttackConfig& base_cfg, const AttackResources& res,
    const std::vector<int>& k_values, const std::string& fingerprint,
    int workers = 1);

void write_attack_traces(const std::string& path,
                         const std::vector<AttackResult>& results,
                         const std::vector<LabeledExample>& examples,
                         const Vocabulary& vocab);

// Deterministic subsample for desk-scale evaluation.
std::vector<LabeledExample> sample_examples(
    const std::vector<LabeledExample>& examples, std::size_t n,
    std::uint64_t seed);

}  // namespace textpure
