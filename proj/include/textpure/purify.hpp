#pragma once

#include <vector>

#include "textpure/dataset.hpp"
#include "textpure/model.hpp"
#include "textpure/noise.hpp"

namespace textpure {

struct PurifyConfig {
  int n = 16;                   // recovery count
  NoiseSpec noise;
  bool average_logits = false;  // ablation flag; default averages softmax

  void validate() const;
};

struct PurifiedPrediction {
  Vec probs;                            // mean softmax over recoveries
  int label = 0;                        // argmax, lowest index on ties
  std::vector<TokenSequence> recoveries;
};

// Noisy copies -> MLM recovery. Element i is fill_masks of copy i. The noise
// stream is derived from (spec.seed, input hash) so identical inputs purify
// identically.
std::vector<TokenSequence> purify(const TokenSequence& text,
                                  const JointModel& recover_model,
                                  const Vocabulary& vocab,
                                  const NoiseSpec& noise, int n);

// Mean of per-recovery softmax scores; recover and classify may be the same
// model (the combined setup) or distinct (vanilla MLM + plain classifier).
PurifiedPrediction purify_predict(const TokenSequence& text,
                                  const JointModel& recover_model,
                                  const JointModel& classify_model,
                                  const Vocabulary& vocab,
                                  const PurifyConfig& cfg);

Vec aggregate_mean_softmax(const std::vector<Vec>& logits);
int argmax_lowest_tie(const Vec& probs);

// Clean-accuracy sweep sharing one pool of max(n) recoveries per example;
// reports prefix-ensemble accuracy for each requested n.
std::vector<std::pair<int, double>> sweep_recovery_count(
    const std::vector<LabeledExample>& examples,
    const JointModel& recover_model, const JointModel& classify_model,
    const Vocabulary& vocab, const PurifyConfig& cfg,
    const std::vector<int>& n_values);

}  // namespace textpure
