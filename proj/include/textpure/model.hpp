#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "textpure/vocab.hpp"

namespace textpure {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct ModelConfig {
  int vocab_size = 0;
  int num_classes = 2;
  int dim = 64;
  int heads = 4;
  int blocks = 2;
  int ffn_dim = 0;  // 0 -> 4*dim
  int max_len = 64;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct BlockParams {
  Mat wq, wk, wv, wo;       // D x D
  Mat bq, bk, bv, bo;       // 1 x D
  Mat ln1_g, ln1_b;         // 1 x D
  Mat w1, b1;               // D x F, 1 x F
  Mat w2, b2;               // F x D, 1 x D
  Mat ln2_g, ln2_b;         // 1 x D
};

struct Params {
  Mat tok_emb;              // V x D
  std::vector<BlockParams> blocks;
  Mat lnf_g, lnf_b;         // 1 x D
  Mat w_cls, b_cls;         // D x C, 1 x C
  Mat w_mlm, b_mlm;         // D x V, 1 x V

  // Stable enumeration of every tensor; serialization, optimizers and the
  // finite-difference oracle all iterate through this.
  void for_each_tensor(const std::function<void(const std::string&, Mat&)>& f);
  void for_each_tensor(
      const std::function<void(const std::string&, const Mat&)>& f) const;

  static Params zeros_like(const Params& other);
  double squared_norm() const;
};

// Per-sequence forward cache retained for the backward pass.
struct LnCache {
  Mat xhat;
  Vec inv_sigma;
};

struct BlockCache {
  Mat x_in, a, q, k, v, o, x1, a2, hff, gelu;
  LnCache ln1, ln2;
  std::vector<Mat> probs;  // per head, L x L
};

struct EncodeCache {
  std::vector<BlockCache> blocks;
  LnCache lnf;
  Mat emb, xf;
  std::vector<bool> real;
};

// Shared-encoder joint model: classification head F_c over mean-pooled hidden
// states and per-position MLM head F_m over the vocabulary.
class JointModel {
 public:
  JointModel() = default;
  explicit JointModel(const ModelConfig& cfg);  // seeded random init

  const ModelConfig& config() const { return cfg_; }
  Params& params() { return p_; }
  const Params& params() const { return p_; }

  // Token embedding + sinusoidal position encoding; the perturbation site for
  // adversarial training.
  Mat embed(const TokenSequence& text) const;
  static std::vector<bool> real_mask(const TokenSequence& text);

  Mat encode(const Mat& emb, const std::vector<bool>& real,
             EncodeCache* cache) const;
  Vec cls_head(const Mat& xf, const std::vector<bool>& real) const;
  Mat mlm_head(const Mat& xf) const;

  // Backward through the encoder stack; accumulates into `grads`, returns the
  // gradient w.r.t. the embedding output.
  Mat encode_backward(const Mat& dxf, const EncodeCache& cache,
                      Params& grads) const;
  void head_backward(const EncodeCache& cache, const Vec* dlogits_cls,
                     const Mat* dlogits_mlm, Params& grads, Mat& dxf) const;

  Vec classify_logits(const TokenSequence& text) const;
  TokenSequence fill_masks(const TokenSequence& text) const;

  void save(const std::string& path, std::uint64_t vocab_hash) const;
  static JointModel load(const std::string& path,
                         std::uint64_t expected_vocab_hash);

 private:
  ModelConfig cfg_;
  Params p_;
  Mat pos_;  // max_len x D, fixed sinusoidal table
};

// Single forward(/backward) pass over one sequence embedding with the losses
// of the joint objective attached.
struct PassTargets {
  int label = -1;                                  // -1: no classification term
  const std::vector<int>* mlm_positions = nullptr; // masked positions
  const TokenSequence* clean = nullptr;            // MLM / noise targets
  bool noise_all = false;                          // reconstruct every position
};

struct PassWeights {
  double w_c = 1.0;
  double w_mlm = 1.0;
  double w_noise = 1.0;
};

struct PassResult {
  double l_c = 0.0;
  double l_mlm = 0.0;
  double l_noise = 0.0;
};

PassResult forward_backward(const JointModel& model, const Mat& emb,
                            const std::vector<bool>& real,
                            const PassTargets& targets, const PassWeights& w,
                            Params* grads, Mat* demb);

// Scatter the embedding-output gradient back onto the token embedding table.
void accumulate_embedding_grad(Params& grads, const TokenSequence& text,
                               const Mat& demb);

// w_c * (CE(F_c(X'), y) + CE(F_c(X), y)) + w_mlm * CE(F_m(X') at masked
// positions, X). Zero masked positions contribute zero MLM loss.
double joint_loss(const JointModel& model, const TokenSequence& clean,
                  const TokenSequence& masked,
                  const std::vector<int>& mlm_positions, int label, double w_c,
                  double w_mlm);

double cross_entropy(const Vec& logits, int target);
Vec softmax(const Vec& logits);

}  // namespace textpure
