#pragma once

#include <random>

#include "textpure/train.hpp"

namespace textpure {

struct AdvTrainConfig {
  TrainConfig base;
  int adv_steps = 2;          // T_a; the perturbation loop runs T_a + 1 times
  double alpha = 0.1;         // adversarial step size
  double eps_ball = 0.2;      // Frobenius-norm bound
  double sigma = 1e-2;        // init noise scale
  bool raw_sum_update = false;    // literal accumulated-gradient update
  bool disable_noise_loss = false;

  void validate() const;
};

// delta_0 = (1/sqrt(D)) * N(0, sigma^2), entrywise.
Mat init_perturbation(Eigen::Index rows, Eigen::Index cols, double sigma,
                      int dim, std::mt19937_64& rng);

// Normalized-gradient ascent step followed by Frobenius-ball projection.
// Zero gradient leaves delta unchanged and sets *skipped.
Mat perturb_step(const Mat& delta, const Mat& grad, double alpha,
                 double eps_ball, bool* skipped = nullptr);

struct AdvBatchStats {
  double l_c = 0.0;
  double l_mlm = 0.0;
  double l_noise = 0.0;
  double grad_norm = 0.0;
  int zero_grad_skips = 0;
};

// One batch of the embedding-perturbation training loop. `epoch` selects the
// per-example masking streams.
AdvBatchStats adv_train_batch(JointModel& model,
                              const std::vector<const LabeledExample*>& batch,
                              const std::vector<std::size_t>& indices,
                              const Vocabulary& vocab,
                              const AdvTrainConfig& cfg,
                              const NoiseSpec& noise, int epoch, Adam& opt);

JointModel train_adversarial(const std::vector<LabeledExample>& dataset,
                             const Vocabulary& vocab,
                             const ModelConfig& model_cfg,
                             const AdvTrainConfig& cfg, const NoiseSpec& noise,
                             TrainLog* log = nullptr);

}  // namespace textpure
