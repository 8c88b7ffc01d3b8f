#include "textpure/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

void TrainConfig::validate() const {
  if (lr <= 0.0) throw std::invalid_argument("train.lr must be positive");
  if (batch_size <= 0) throw std::invalid_argument("train.batch_size must be positive");
  if (epochs <= 0) throw std::invalid_argument("train.epochs must be positive");
  if (max_len <= 0) throw std::invalid_argument("train.max_len must be positive");
  if (w_c < 0.0 || w_mlm < 0.0)
    throw std::invalid_argument("train loss weights must be nonnegative");
}

void write_train_log_csv(const std::string& path, const TrainLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write training log: " + path);
  out << "epoch,L_c,L_mlm,L_noise,clean_acc,mlm_acc,grad_norm\n";
  for (const auto& e : log)
    out << e.epoch << "," << e.l_c << "," << e.l_mlm << "," << e.l_noise << ","
        << e.clean_acc << "," << e.mlm_acc << "," << e.grad_norm << "\n";
}

Adam::Adam(const Params& shape)
    : m_(Params::zeros_like(shape)), v_(Params::zeros_like(shape)) {}

void Adam::step(Params& params, const Params& grads, double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  // Tensor enumeration order is identical across Params instances.
  std::vector<Mat*> ps, ms, vs;
  std::vector<const Mat*> gs;
  params.for_each_tensor([&](const std::string&, Mat& m) { ps.push_back(&m); });
  m_.for_each_tensor([&](const std::string&, Mat& m) { ms.push_back(&m); });
  v_.for_each_tensor([&](const std::string&, Mat& m) { vs.push_back(&m); });
  grads.for_each_tensor(
      [&](const std::string&, const Mat& m) { gs.push_back(&m); });
  for (std::size_t i = 0; i < ps.size(); ++i) {
    *ms[i] = beta1_ * *ms[i] + (1.0 - beta1_) * *gs[i];
    vs[i]->array() =
        beta2_ * vs[i]->array() + (1.0 - beta2_) * gs[i]->array().square();
    ps[i]->array() -=
        lr * (ms[i]->array() / bc1) / ((vs[i]->array() / bc2).sqrt() + eps_);
  }
}

std::mt19937_64 example_rng(std::uint64_t seed, int epoch, std::size_t index) {
  return make_rng(derive_stream(seed, 0x6d61736bULL),
                  static_cast<std::uint64_t>(epoch) * 0x1000003ULL + index);
}

PassResult example_joint_grad(const JointModel& model,
                              const LabeledExample& ex,
                              const MaskedText& masked, const PassWeights& w,
                              Params& grads) {
  PassResult total;
  Mat demb;
  if (w.w_c > 0.0) {
    PassTargets t_clean;
    t_clean.label = ex.label;
    auto r = forward_backward(model, model.embed(ex.text),
                              JointModel::real_mask(ex.text), t_clean, w,
                              &grads, &demb);
    accumulate_embedding_grad(grads, ex.text, demb);
    total.l_c += r.l_c;
  }
  PassTargets t_masked;
  t_masked.label = w.w_c > 0.0 ? ex.label : -1;
  if (w.w_mlm > 0.0) {
    t_masked.mlm_positions = &masked.positions;
    t_masked.clean = &ex.text;
  }
  if (t_masked.label >= 0 || w.w_mlm > 0.0) {
    auto r = forward_backward(model, model.embed(masked.masked),
                              JointModel::real_mask(masked.masked), t_masked,
                              w, &grads, &demb);
    accumulate_embedding_grad(grads, masked.masked, demb);
    total.l_c += r.l_c;
    total.l_mlm += r.l_mlm;
  }
  return total;
}

double clean_accuracy(const JointModel& model,
                      const std::vector<LabeledExample>& dataset) {
  if (dataset.empty()) return 0.0;
  int correct = 0;
  for (const auto& ex : dataset) {
    Vec logits = model.classify_logits(ex.text);
    int pred = 0;
    logits.maxCoeff(&pred);
    if (pred == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

double mlm_accuracy(const JointModel& model,
                    const std::vector<LabeledExample>& dataset,
                    const Vocabulary& vocab, double mask_rate,
                    std::uint64_t seed, std::size_t max_examples) {
  std::size_t n = std::min(dataset.size(), max_examples);
  int total = 0, hit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = make_rng(derive_stream(seed, 0x6576616cULL), i);
    auto masked = mask_for_training(dataset[i].text, vocab, mask_rate, rng);
    if (masked.positions.empty()) continue;
    auto filled = model.fill_masks(masked.masked);
    for (int p : masked.positions) {
      ++total;
      if (filled.ids[static_cast<std::size_t>(p)] ==
          dataset[i].text.ids[static_cast<std::size_t>(p)])
        ++hit;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / total;
}

JointModel train_joint(const std::vector<LabeledExample>& dataset,
                       const Vocabulary& vocab, const ModelConfig& model_cfg,
                       const TrainConfig& cfg, const NoiseSpec& noise,
                       TrainLog* log) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
  ModelConfig mc = model_cfg;
  mc.vocab_size = vocab.size();
  mc.seed = cfg.seed;
  JointModel model(mc);
  Adam opt(model.params());
  PassWeights w{cfg.w_c, cfg.w_mlm, 0.0};

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto shuffle_rng = make_rng(derive_stream(cfg.seed, 0x73687566ULL),
                                static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double sum_lc = 0.0, sum_lmlm = 0.0, sum_gnorm = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(order.size(),
                                 start + static_cast<std::size_t>(cfg.batch_size));
      Params grads = Params::zeros_like(model.params());
      double batch_lc = 0.0, batch_lmlm = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = dataset[order[i]];
        auto rng = example_rng(cfg.seed, epoch, order[i]);
        MaskedText masked = mask_for_training(ex.text, vocab, noise.mask_rate, rng);
        auto r = example_joint_grad(model, ex, masked, w, grads);
        batch_lc += r.l_c;
        batch_lmlm += r.l_mlm;
      }
      const double inv_b = 1.0 / static_cast<double>(end - start);
      if (!std::isfinite(batch_lc) || !std::isfinite(batch_lmlm))
        throw std::runtime_error(
            "non-finite loss at epoch " + std::to_string(epoch) + " batch " +
            std::to_string(batches) + " (L_c=" + std::to_string(batch_lc) +
            ", L_mlm=" + std::to_string(batch_lmlm) + ")");
      grads.for_each_tensor([&](const std::string&, Mat& m) { m *= inv_b; });
      sum_gnorm += std::sqrt(grads.squared_norm());
      opt.step(model.params(), grads, cfg.lr);
      sum_lc += batch_lc * inv_b;
      sum_lmlm += batch_lmlm * inv_b;
      ++batches;
    }

    if (log) {
      EpochStats s;
      s.epoch = epoch;
      s.l_c = sum_lc / batches;
      s.l_mlm = sum_lmlm / batches;
      s.grad_norm = sum_gnorm / batches;
      s.clean_acc = clean_accuracy(model, dataset);
      s.mlm_acc = mlm_accuracy(model, dataset, vocab, noise.mask_rate, cfg.seed);
      log->push_back(s);
    }
  }
  return model;
}

}  // namespace textpure
