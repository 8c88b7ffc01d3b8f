#include "textpure/advtrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

void AdvTrainConfig::validate() const {
  base.validate();
  if (adv_steps < 1) throw std::invalid_argument("adv.adv_steps must be >= 1");
  if (alpha < 0.0) throw std::invalid_argument("adv.alpha must be nonnegative");
  if (eps_ball <= 0.0) throw std::invalid_argument("adv.eps_ball must be positive");
  if (sigma < 0.0) throw std::invalid_argument("adv.sigma must be nonnegative");
}

Mat init_perturbation(Eigen::Index rows, Eigen::Index cols, double sigma,
                      int dim, std::mt19937_64& rng) {
  if (dim <= 0) throw std::invalid_argument("perturbation dim must be positive");
  if (sigma == 0.0) return Mat::Zero(rows, cols);
  std::normal_distribution<double> d(0.0, sigma);
  Mat delta(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) delta(i, j) = scale * d(rng);
  return delta;
}

Mat perturb_step(const Mat& delta, const Mat& grad, double alpha,
                 double eps_ball, bool* skipped) {
  if (skipped) *skipped = false;
  double gnorm = grad.norm();
  if (gnorm == 0.0) {
    if (skipped) *skipped = true;
    return delta;
  }
  Mat next = delta + (alpha / gnorm) * grad;
  double dnorm = next.norm();
  if (dnorm > eps_ball) next *= eps_ball / dnorm;
  return next;
}

AdvBatchStats adv_train_batch(JointModel& model,
                              const std::vector<const LabeledExample*>& batch,
                              const std::vector<std::size_t>& indices,
                              const Vocabulary& vocab,
                              const AdvTrainConfig& cfg,
                              const NoiseSpec& noise, int epoch, Adam& opt) {
  const int steps = cfg.adv_steps + 1;  // t = 0..T_a inclusive
  PassWeights w{cfg.base.w_c, cfg.base.w_mlm, cfg.disable_noise_loss ? 0.0 : 1.0};
  AdvBatchStats stats;
  Params g_acc = Params::zeros_like(model.params());
  Params scratch = Params::zeros_like(model.params());

  for (std::size_t bi = 0; bi < batch.size(); ++bi) {
    const auto& ex = *batch[bi];
    auto rng = example_rng(cfg.base.seed, epoch, indices[bi]);
    MaskedText masked =
        mask_for_training(ex.text, vocab, noise.mask_rate, rng);
    auto real = JointModel::real_mask(masked.masked);

    // The clean classification branch never sees the perturbation; its
    // gradient repeats unchanged every loop iteration.
    Params g_clean = Params::zeros_like(model.params());
    double l_c_clean = 0.0;
    if (w.w_c > 0.0) {
      PassTargets t_clean;
      t_clean.label = ex.label;
      Mat demb;
      auto r = forward_backward(model, model.embed(ex.text),
                                JointModel::real_mask(ex.text), t_clean, w,
                                &g_clean, &demb);
      accumulate_embedding_grad(g_clean, ex.text, demb);
      l_c_clean = r.l_c;
    }

    Mat running = model.embed(masked.masked);  // X' as embedding output
    auto delta_rng =
        make_rng(derive_stream(cfg.base.seed, 0x64656c74ULL),
                 static_cast<std::uint64_t>(epoch) * 0x1000003ULL + indices[bi]);
    Mat delta = init_perturbation(running.rows(), running.cols(), cfg.sigma,
                                  model.config().dim, delta_rng);

    PassTargets t_masked;
    t_masked.label = w.w_c > 0.0 ? ex.label : -1;
    t_masked.clean = &ex.text;
    if (w.w_mlm > 0.0) t_masked.mlm_positions = &masked.positions;

    for (int t = 0; t < steps; ++t) {
      // g_delta = grad of (L_c + L_mlm) w.r.t. the perturbation.
      Mat g_delta;
      scratch.for_each_tensor([](const std::string&, Mat& m) { m.setZero(); });
      forward_backward(model, running + delta, real, t_masked, w, &scratch,
                       &g_delta);
      bool skipped = false;
      delta = perturb_step(delta, g_delta, cfg.alpha, cfg.eps_ball, &skipped);
      if (skipped) ++stats.zero_grad_skips;

      running += delta;  // X' <- X' + delta_t

      PassTargets t_step = t_masked;
      t_step.noise_all = !cfg.disable_noise_loss;
      Mat demb;
      auto r = forward_backward(model, running, real, t_step, w, &g_acc, &demb);
      accumulate_embedding_grad(g_acc, masked.masked, demb);
      stats.l_c += (r.l_c + l_c_clean) / steps;
      stats.l_mlm += r.l_mlm / steps;
      stats.l_noise += r.l_noise / steps;
      if (!std::isfinite(r.l_c) || !std::isfinite(r.l_mlm) ||
          !std::isfinite(r.l_noise))
        throw std::runtime_error("non-finite adversarial loss at epoch " +
                                 std::to_string(epoch));
    }
    // Clean branch contributes at every accumulation step.
    {
      std::vector<Mat*> dst;
      std::vector<const Mat*> src;
      g_acc.for_each_tensor([&](const std::string&, Mat& m) { dst.push_back(&m); });
      g_clean.for_each_tensor(
          [&](const std::string&, const Mat& m) { src.push_back(&m); });
      for (std::size_t i = 0; i < dst.size(); ++i)
        *dst[i] += static_cast<double>(steps) * *src[i];
    }
  }

  const double denom =
      static_cast<double>(batch.size()) * static_cast<double>(steps);
  stats.l_c /= static_cast<double>(batch.size());
  stats.l_mlm /= static_cast<double>(batch.size());
  stats.l_noise /= static_cast<double>(batch.size());

  if (cfg.raw_sum_update) {
    // Algorithm-literal update: theta <- theta - accumulated gradient.
    std::vector<Mat*> ps;
    std::vector<const Mat*> gs;
    model.params().for_each_tensor(
        [&](const std::string&, Mat& m) { ps.push_back(&m); });
    g_acc.for_each_tensor(
        [&](const std::string&, const Mat& m) { gs.push_back(&m); });
    for (std::size_t i = 0; i < ps.size(); ++i) *ps[i] -= *gs[i];
    stats.grad_norm = std::sqrt(g_acc.squared_norm());
  } else {
    g_acc.for_each_tensor([&](const std::string&, Mat& m) { m /= denom; });
    stats.grad_norm = std::sqrt(g_acc.squared_norm());
    opt.step(model.params(), g_acc, cfg.base.lr);
  }
  return stats;
}

JointModel train_adversarial(const std::vector<LabeledExample>& dataset,
                             const Vocabulary& vocab,
                             const ModelConfig& model_cfg,
                             const AdvTrainConfig& cfg, const NoiseSpec& noise,
                             TrainLog* log) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
  ModelConfig mc = model_cfg;
  mc.vocab_size = vocab.size();
  mc.seed = cfg.base.seed;
  JointModel model(mc);
  Adam opt(model.params());

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.base.epochs; ++epoch) {
    auto shuffle_rng = make_rng(derive_stream(cfg.base.seed, 0x73687566ULL),
                                static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    AdvBatchStats epoch_stats;
    int batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.base.batch_size)) {
      std::size_t end =
          std::min(order.size(),
                   start + static_cast<std::size_t>(cfg.base.batch_size));
      std::vector<const LabeledExample*> batch;
      std::vector<std::size_t> indices;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&dataset[order[i]]);
        indices.push_back(order[i]);
      }
      auto s = adv_train_batch(model, batch, indices, vocab, cfg, noise, epoch,
                               opt);
      epoch_stats.l_c += s.l_c;
      epoch_stats.l_mlm += s.l_mlm;
      epoch_stats.l_noise += s.l_noise;
      epoch_stats.grad_norm += s.grad_norm;
      epoch_stats.zero_grad_skips += s.zero_grad_skips;
      ++batches;
    }

    if (log) {
      EpochStats s;
      s.epoch = epoch;
      s.l_c = epoch_stats.l_c / batches;
      s.l_mlm = epoch_stats.l_mlm / batches;
      s.l_noise = epoch_stats.l_noise / batches;
      s.grad_norm = epoch_stats.grad_norm / batches;
      s.clean_acc = clean_accuracy(model, dataset);
      s.mlm_acc =
          mlm_accuracy(model, dataset, vocab, noise.mask_rate, cfg.base.seed);
      log->push_back(s);
    }
  }
  return model;
}

}  // namespace textpure
