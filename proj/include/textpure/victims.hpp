#pragma once

#include "textpure/attack.hpp"
#include "textpure/model.hpp"
#include "textpure/purify.hpp"

namespace textpure {

// Undefended victim: softmax of the classifier logits.
class RawVictim : public Victim {
 public:
  explicit RawVictim(const JointModel& model) : model_(&model) {}
  Eigen::VectorXd scores(const TokenSequence& text) const override {
    return softmax(model_->classify_logits(text));
  }

 private:
  const JointModel* model_;
};

// Purification-defended victim: every query triggers a full N-recovery
// purification; the attacker only ever sees the aggregated score vector.
class PurifiedVictim : public Victim {
 public:
  PurifiedVictim(const JointModel& recover, const JointModel& classify,
                 const Vocabulary& vocab, const PurifyConfig& cfg)
      : recover_(&recover), classify_(&classify), vocab_(&vocab), cfg_(cfg) {}

  Eigen::VectorXd scores(const TokenSequence& text) const override {
    return purify_predict(text, *recover_, *classify_, *vocab_, cfg_).probs;
  }

 private:
  const JointModel* recover_;
  const JointModel* classify_;
  const Vocabulary* vocab_;
  PurifyConfig cfg_;
};

// Attacker-side MLM proposer backed by a model of the attacker's choosing.
MlmProposer make_mlm_proposer(const JointModel& model);

}  // namespace textpure
