#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textpure/dataset.hpp"
#include "textpure/model.hpp"
#include "textpure/noise.hpp"

namespace textpure {

struct TrainConfig {
  double lr = 1e-3;
  int batch_size = 32;
  int epochs = 10;
  int max_len = 64;
  double w_c = 1.0;
  double w_mlm = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double l_c = 0.0;
  double l_mlm = 0.0;
  double l_noise = 0.0;
  double clean_acc = 0.0;
  double mlm_acc = 0.0;
  double grad_norm = 0.0;
};

using TrainLog = std::vector<EpochStats>;

void write_train_log_csv(const std::string& path, const TrainLog& log);

class Adam {
 public:
  explicit Adam(const Params& shape);
  void step(Params& params, const Params& grads, double lr);

 private:
  Params m_, v_;
  int t_ = 0;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
};

// Per-example masking stream shared by the joint and adversarial trainers so
// that degenerate adversarial configs reproduce joint training exactly.
std::mt19937_64 example_rng(std::uint64_t seed, int epoch, std::size_t index);

// Gradient of the joint objective for one example; accumulates into grads,
// returns the unweighted loss terms.
PassResult example_joint_grad(const JointModel& model,
                              const LabeledExample& ex,
                              const MaskedText& masked, const PassWeights& w,
                              Params& grads);

JointModel train_joint(const std::vector<LabeledExample>& dataset,
                       const Vocabulary& vocab, const ModelConfig& model_cfg,
                       const TrainConfig& cfg, const NoiseSpec& noise,
                       TrainLog* log = nullptr);

double clean_accuracy(const JointModel& model,
                      const std::vector<LabeledExample>& dataset);

// Fraction of masked positions recovered exactly, with a fixed eval mask.
double mlm_accuracy(const JointModel& model,
                    const std::vector<LabeledExample>& dataset,
                    const Vocabulary& vocab, double mask_rate,
                    std::uint64_t seed, std::size_t max_examples = 200);

}  // namespace textpure
