#include "textpure/purify.hpp"

#include <algorithm>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

void PurifyConfig::validate() const {
  if (n < 1) throw std::invalid_argument("purify.n must be >= 1");
  noise.validate();
}

std::vector<TokenSequence> purify(const TokenSequence& text,
                                  const JointModel& recover_model,
                                  const Vocabulary& vocab,
                                  const NoiseSpec& noise, int n) {
  NoiseSpec per_input = noise;
  per_input.seed = derive_stream(noise.seed, sequence_hash(text));
  auto copies = make_noisy_copies(text, vocab, per_input, n,
                                  recover_model.config().max_len);
  std::vector<TokenSequence> recovered;
  recovered.reserve(copies.size());
  for (auto& c : copies) recovered.push_back(recover_model.fill_masks(c));
  return recovered;
}

Vec aggregate_mean_softmax(const std::vector<Vec>& logits) {
  if (logits.empty()) throw std::invalid_argument("no logits to aggregate");
  Vec s = Vec::Zero(logits.front().size());
  for (const auto& l : logits) s += softmax(l);
  return s / static_cast<double>(logits.size());
}

int argmax_lowest_tie(const Vec& probs) {
  int best = 0;
  for (int i = 1; i < probs.size(); ++i)
    if (probs(i) > probs(best)) best = i;
  return best;
}

PurifiedPrediction purify_predict(const TokenSequence& text,
                                  const JointModel& recover_model,
                                  const JointModel& classify_model,
                                  const Vocabulary& vocab,
                                  const PurifyConfig& cfg) {
  cfg.validate();
  PurifiedPrediction pred;
  pred.recoveries = purify(text, recover_model, vocab, cfg.noise, cfg.n);
  if (cfg.average_logits) {
    Vec mean = Vec::Zero(classify_model.config().num_classes);
    for (const auto& r : pred.recoveries)
      mean += classify_model.classify_logits(r);
    pred.probs = softmax(mean / static_cast<double>(pred.recoveries.size()));
  } else {
    std::vector<Vec> logits;
    logits.reserve(pred.recoveries.size());
    for (const auto& r : pred.recoveries)
      logits.push_back(classify_model.classify_logits(r));
    pred.probs = aggregate_mean_softmax(logits);
  }
  pred.label = argmax_lowest_tie(pred.probs);
  return pred;
}

std::vector<std::pair<int, double>> sweep_recovery_count(
    const std::vector<LabeledExample>& examples,
    const JointModel& recover_model, const JointModel& classify_model,
    const Vocabulary& vocab, const PurifyConfig& cfg,
    const std::vector<int>& n_values) {
  if (n_values.empty()) throw std::invalid_argument("n_values is empty");
  const int n_max = *std::max_element(n_values.begin(), n_values.end());
  if (n_max < 1) throw std::invalid_argument("n_values must be >= 1");

  // One recovery pool per example; each requested n reads a prefix.
  std::vector<std::vector<Vec>> probs_pool(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto recoveries =
        purify(examples[i].text, recover_model, vocab, cfg.noise, n_max);
    for (const auto& r : recoveries)
      probs_pool[i].push_back(softmax(classify_model.classify_logits(r)));
  }

  std::vector<std::pair<int, double>> curve;
  for (int n : n_values) {
    int correct = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      Vec s = Vec::Zero(probs_pool[i].front().size());
      for (int j = 0; j < n; ++j) s += probs_pool[i][static_cast<std::size_t>(j)];
      s /= n;
      if (argmax_lowest_tie(s) == examples[i].label) ++correct;
    }
    curve.emplace_back(
        n, static_cast<double>(correct) / static_cast<double>(examples.size()));
  }
  return curve;
}

}  // namespace textpure
