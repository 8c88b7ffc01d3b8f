#include "textpure/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "textpure/rng.hpp"

namespace textpure {
namespace {

constexpr double kLnEps = 1e-5;
constexpr double kNegInf = -1e30;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_grad(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) +
         x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

void ln_forward(const Mat& x, const Mat& g, const Mat& b, LnCache& c,
                Mat& out) {
  const auto rows = x.rows();
  const auto cols = x.cols();
  c.xhat.resize(rows, cols);
  c.inv_sigma.resize(rows);
  out.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double mu = x.row(i).mean();
    double var = (x.row(i).array() - mu).square().mean();
    double inv_sigma = 1.0 / std::sqrt(var + kLnEps);
    c.inv_sigma(i) = inv_sigma;
    c.xhat.row(i) = (x.row(i).array() - mu) * inv_sigma;
    out.row(i) =
        c.xhat.row(i).array() * g.row(0).array() + b.row(0).array();
  }
}

void ln_backward(const Mat& dy, const LnCache& c, const Mat& g, Mat& dg,
                 Mat& db, Mat& dx) {
  const auto rows = dy.rows();
  const auto cols = dy.cols();
  dx.resize(rows, cols);
  dg.row(0).array() += (dy.array() * c.xhat.array()).colwise().sum();
  db.row(0).array() += dy.array().colwise().sum();
  for (Eigen::Index i = 0; i < rows; ++i) {
    Eigen::RowVectorXd dxhat =
        (dy.row(i).array() * g.row(0).array()).matrix();
    double m1 = dxhat.mean();
    double m2 = (dxhat.array() * c.xhat.row(i).array()).mean();
    dx.row(i) = c.inv_sigma(i) *
                (dxhat.array() - m1 - c.xhat.row(i).array() * m2).matrix();
  }
}

void fill_normal(Mat& m, double std_dev, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, std_dev);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = d(rng);
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= Vocabulary::kNumSpecial)
    throw std::invalid_argument("model.vocab_size too small");
  if (num_classes < 2) throw std::invalid_argument("model.num_classes must be >= 2");
  if (dim <= 0 || heads <= 0 || blocks <= 0 || max_len <= 0)
    throw std::invalid_argument("model dimensions must be positive");
  if (dim % heads != 0)
    throw std::invalid_argument("model.dim must be divisible by model.heads");
}

void Params::for_each_tensor(
    const std::function<void(const std::string&, Mat&)>& f) {
  f("tok_emb", tok_emb);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& blk = blocks[b];
    const std::string p = "block" + std::to_string(b) + ".";
    f(p + "wq", blk.wq); f(p + "bq", blk.bq);
    f(p + "wk", blk.wk); f(p + "bk", blk.bk);
    f(p + "wv", blk.wv); f(p + "bv", blk.bv);
    f(p + "wo", blk.wo); f(p + "bo", blk.bo);
    f(p + "ln1_g", blk.ln1_g); f(p + "ln1_b", blk.ln1_b);
    f(p + "w1", blk.w1); f(p + "b1", blk.b1);
    f(p + "w2", blk.w2); f(p + "b2", blk.b2);
    f(p + "ln2_g", blk.ln2_g); f(p + "ln2_b", blk.ln2_b);
  }
  f("lnf_g", lnf_g); f("lnf_b", lnf_b);
  f("w_cls", w_cls); f("b_cls", b_cls);
  f("w_mlm", w_mlm); f("b_mlm", b_mlm);
}

void Params::for_each_tensor(
    const std::function<void(const std::string&, const Mat&)>& f) const {
  const_cast<Params*>(this)->for_each_tensor(
      [&](const std::string& name, Mat& m) { f(name, m); });
}

Params Params::zeros_like(const Params& other) {
  Params z = other;
  z.for_each_tensor([](const std::string&, Mat& m) { m.setZero(); });
  return z;
}

double Params::squared_norm() const {
  double s = 0.0;
  for_each_tensor(
      [&](const std::string&, const Mat& m) { s += m.squaredNorm(); });
  return s;
}

JointModel::JointModel(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg_.ffn_dim == 0) cfg_.ffn_dim = 4 * cfg_.dim;
  cfg_.validate();
  const int d = cfg_.dim, f = cfg_.ffn_dim, v = cfg_.vocab_size,
            c = cfg_.num_classes;
  auto rng = make_rng(cfg_.seed, 0x6d6f64u);
  const double std_dev = 0.02;

  p_.tok_emb.resize(v, d);
  fill_normal(p_.tok_emb, std_dev, rng);
  p_.blocks.resize(static_cast<std::size_t>(cfg_.blocks));
  for (auto& blk : p_.blocks) {
    blk.wq.resize(d, d); blk.wk.resize(d, d); blk.wv.resize(d, d);
    blk.wo.resize(d, d);
    fill_normal(blk.wq, std_dev, rng);
    fill_normal(blk.wk, std_dev, rng);
    fill_normal(blk.wv, std_dev, rng);
    fill_normal(blk.wo, std_dev, rng);
    blk.bq = Mat::Zero(1, d); blk.bk = Mat::Zero(1, d);
    blk.bv = Mat::Zero(1, d); blk.bo = Mat::Zero(1, d);
    blk.ln1_g = Mat::Ones(1, d); blk.ln1_b = Mat::Zero(1, d);
    blk.ln2_g = Mat::Ones(1, d); blk.ln2_b = Mat::Zero(1, d);
    blk.w1.resize(d, f); blk.w2.resize(f, d);
    fill_normal(blk.w1, std_dev, rng);
    fill_normal(blk.w2, std_dev, rng);
    blk.b1 = Mat::Zero(1, f); blk.b2 = Mat::Zero(1, d);
  }
  p_.lnf_g = Mat::Ones(1, d);
  p_.lnf_b = Mat::Zero(1, d);
  // Heads start at zero: untrained classifiers emit all-zero logits.
  p_.w_cls = Mat::Zero(d, c); p_.b_cls = Mat::Zero(1, c);
  p_.w_mlm = Mat::Zero(d, v); p_.b_mlm = Mat::Zero(1, v);

  pos_.resize(cfg_.max_len, d);
  for (int p = 0; p < cfg_.max_len; ++p)
    for (int i = 0; i < d; ++i) {
      double angle = p / std::pow(10000.0, 2.0 * (i / 2) / d);
      pos_(p, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
}

std::vector<bool> JointModel::real_mask(const TokenSequence& text) {
  std::vector<bool> real(text.ids.size());
  for (std::size_t i = 0; i < text.ids.size(); ++i)
    real[i] = text.ids[i] != Vocabulary::kPad;
  return real;
}

Mat JointModel::embed(const TokenSequence& text) const {
  const int len = text.length();
  if (len > cfg_.max_len)
    throw std::invalid_argument("sequence length " + std::to_string(len) +
                                " exceeds max length " +
                                std::to_string(cfg_.max_len));
  Mat emb(len, cfg_.dim);
  for (int i = 0; i < len; ++i) {
    int id = text.ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= cfg_.vocab_size)
      throw std::invalid_argument("token id out of range");
    emb.row(i) = p_.tok_emb.row(id) + pos_.row(i);
  }
  return emb;
}

Mat JointModel::encode(const Mat& emb, const std::vector<bool>& real,
                       EncodeCache* cache) const {
  const int h = cfg_.heads;
  const Eigen::Index len = emb.rows();
  const int hd = cfg_.dim / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  EncodeCache local;
  EncodeCache& c = cache ? *cache : local;
  c.blocks.resize(p_.blocks.size());
  c.real = real;
  c.emb = emb;

  Mat x = emb;
  for (std::size_t b = 0; b < p_.blocks.size(); ++b) {
    const auto& blk = p_.blocks[b];
    auto& bc = c.blocks[b];
    bc.x_in = x;
    ln_forward(x, blk.ln1_g, blk.ln1_b, bc.ln1, bc.a);
    bc.q = (bc.a * blk.wq).rowwise() + blk.bq.row(0);
    bc.k = (bc.a * blk.wk).rowwise() + blk.bk.row(0);
    bc.v = (bc.a * blk.wv).rowwise() + blk.bv.row(0);
    bc.o.resize(len, cfg_.dim);
    bc.probs.assign(static_cast<std::size_t>(h), Mat());
    for (int head = 0; head < h; ++head) {
      auto qh = bc.q.middleCols(head * hd, hd);
      auto kh = bc.k.middleCols(head * hd, hd);
      auto vh = bc.v.middleCols(head * hd, hd);
      Mat scores = scale * (qh * kh.transpose());
      for (Eigen::Index j = 0; j < len; ++j)
        if (!real[static_cast<std::size_t>(j)]) scores.col(j).setConstant(kNegInf);
      Mat& probs = bc.probs[static_cast<std::size_t>(head)];
      probs.resize(len, len);
      for (Eigen::Index i = 0; i < len; ++i) {
        double m = scores.row(i).maxCoeff();
        Eigen::RowVectorXd e = (scores.row(i).array() - m).exp();
        probs.row(i) = e / e.sum();
      }
      bc.o.middleCols(head * hd, hd) = probs * vh;
    }
    Mat m = (bc.o * blk.wo).rowwise() + blk.bo.row(0);
    bc.x1 = x + m;
    ln_forward(bc.x1, blk.ln2_g, blk.ln2_b, bc.ln2, bc.a2);
    bc.hff = (bc.a2 * blk.w1).rowwise() + blk.b1.row(0);
    bc.gelu = bc.hff.unaryExpr([](double v) { return gelu(v); });
    x = bc.x1 + ((bc.gelu * blk.w2).rowwise() + blk.b2.row(0));
  }
  ln_forward(x, p_.lnf_g, p_.lnf_b, c.lnf, c.xf);
  return c.xf;
}

Vec JointModel::cls_head(const Mat& xf, const std::vector<bool>& real) const {
  Vec pool = Vec::Zero(cfg_.dim);
  int n = 0;
  for (Eigen::Index i = 0; i < xf.rows(); ++i)
    if (real[static_cast<std::size_t>(i)]) {
      pool += xf.row(i).transpose();
      ++n;
    }
  if (n == 0) throw std::invalid_argument("sequence has no non-pad tokens");
  pool /= n;
  return p_.w_cls.transpose() * pool + p_.b_cls.row(0).transpose();
}

Mat JointModel::mlm_head(const Mat& xf) const {
  return (xf * p_.w_mlm).rowwise() + p_.b_mlm.row(0);
}

void JointModel::head_backward(const EncodeCache& cache, const Vec* dlogits_cls,
                               const Mat* dlogits_mlm, Params& grads,
                               Mat& dxf) const {
  const Mat& xf = cache.xf;
  if (dlogits_cls) {
    Vec pool = Vec::Zero(cfg_.dim);
    int n = 0;
    for (Eigen::Index i = 0; i < xf.rows(); ++i)
      if (cache.real[static_cast<std::size_t>(i)]) {
        pool += xf.row(i).transpose();
        ++n;
      }
    pool /= n;
    grads.w_cls += pool * dlogits_cls->transpose();
    grads.b_cls.row(0) += dlogits_cls->transpose();
    Vec dpool = p_.w_cls * (*dlogits_cls);
    for (Eigen::Index i = 0; i < xf.rows(); ++i)
      if (cache.real[static_cast<std::size_t>(i)])
        dxf.row(i) += dpool.transpose() / n;
  }
  if (dlogits_mlm) {
    dxf += *dlogits_mlm * p_.w_mlm.transpose();
    grads.w_mlm += xf.transpose() * (*dlogits_mlm);
    grads.b_mlm.row(0) += dlogits_mlm->colwise().sum();
  }
}

Mat JointModel::encode_backward(const Mat& dxf, const EncodeCache& cache,
                                Params& grads) const {
  const int h = cfg_.heads;
  const int hd = cfg_.dim / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  const Eigen::Index len = dxf.rows();

  Mat dx;
  ln_backward(dxf, cache.lnf, p_.lnf_g, grads.lnf_g, grads.lnf_b, dx);

  for (std::size_t bi = p_.blocks.size(); bi-- > 0;) {
    const auto& blk = p_.blocks[bi];
    const auto& bc = cache.blocks[bi];
    auto& gblk = grads.blocks[bi];

    // FFN branch: x_out = x1 + gelu(a2*w1 + b1)*w2 + b2
    Mat dff = dx;  // gradient into the FFN output
    Mat dgelu = dff * blk.w2.transpose();
    gblk.w2 += bc.gelu.transpose() * dff;
    gblk.b2.row(0) += dff.colwise().sum();
    Mat dhff =
        dgelu.array() * bc.hff.unaryExpr([](double v) { return gelu_grad(v); }).array();
    Mat da2 = dhff * blk.w1.transpose();
    gblk.w1 += bc.a2.transpose() * dhff;
    gblk.b1.row(0) += dhff.colwise().sum();
    Mat dx1;
    ln_backward(da2, bc.ln2, blk.ln2_g, gblk.ln2_g, gblk.ln2_b, dx1);
    dx1 += dx;  // residual

    // Attention branch: x1 = x_in + o*wo + bo
    Mat dm = dx1;
    Mat do_ = dm * blk.wo.transpose();
    gblk.wo += bc.o.transpose() * dm;
    gblk.bo.row(0) += dm.colwise().sum();

    Mat dq = Mat::Zero(len, cfg_.dim);
    Mat dk = Mat::Zero(len, cfg_.dim);
    Mat dv = Mat::Zero(len, cfg_.dim);
    for (int head = 0; head < h; ++head) {
      auto qh = bc.q.middleCols(head * hd, hd);
      auto kh = bc.k.middleCols(head * hd, hd);
      auto vh = bc.v.middleCols(head * hd, hd);
      const Mat& probs = bc.probs[static_cast<std::size_t>(head)];
      Mat doh = do_.middleCols(head * hd, hd);
      Mat dprobs = doh * vh.transpose();
      dv.middleCols(head * hd, hd) = probs.transpose() * doh;
      Mat dscores(len, len);
      for (Eigen::Index i = 0; i < len; ++i) {
        double dot = dprobs.row(i).dot(probs.row(i));
        dscores.row(i) =
            probs.row(i).array() * (dprobs.row(i).array() - dot);
      }
      dq.middleCols(head * hd, hd) = scale * (dscores * kh);
      dk.middleCols(head * hd, hd) = scale * (dscores.transpose() * qh);
    }
    Mat da = dq * blk.wq.transpose() + dk * blk.wk.transpose() +
             dv * blk.wv.transpose();
    gblk.wq += bc.a.transpose() * dq;
    gblk.bq.row(0) += dq.colwise().sum();
    gblk.wk += bc.a.transpose() * dk;
    gblk.bk.row(0) += dk.colwise().sum();
    gblk.wv += bc.a.transpose() * dv;
    gblk.bv.row(0) += dv.colwise().sum();

    Mat dx_in;
    ln_backward(da, bc.ln1, blk.ln1_g, gblk.ln1_g, gblk.ln1_b, dx_in);
    dx = dx1 + dx_in;
  }
  return dx;
}

Vec softmax(const Vec& logits) {
  double m = logits.maxCoeff();
  Vec e = (logits.array() - m).exp();
  return e / e.sum();
}

double cross_entropy(const Vec& logits, int target) {
  double m = logits.maxCoeff();
  double lse = m + std::log((logits.array() - m).exp().sum());
  return lse - logits(target);
}

Vec JointModel::classify_logits(const TokenSequence& text) const {
  Mat emb = embed(text);
  auto real = real_mask(text);
  EncodeCache cache;
  Mat xf = encode(emb, real, &cache);
  return cls_head(xf, real);
}

TokenSequence JointModel::fill_masks(const TokenSequence& text) const {
  std::vector<int> mask_pos;
  for (std::size_t i = 0; i < text.ids.size(); ++i)
    if (text.ids[i] == Vocabulary::kMask) mask_pos.push_back(static_cast<int>(i));
  if (mask_pos.empty()) return text;

  Mat emb = embed(text);
  auto real = real_mask(text);
  EncodeCache cache;
  Mat xf = encode(emb, real, &cache);
  TokenSequence out = text;
  for (int p : mask_pos) {
    Eigen::RowVectorXd logits =
        xf.row(p) * p_.w_mlm + p_.b_mlm.row(0);
    int best = Vocabulary::kNumSpecial;
    for (int id = Vocabulary::kNumSpecial + 1; id < cfg_.vocab_size; ++id)
      if (logits(id) > logits(best)) best = id;
    out.ids[static_cast<std::size_t>(p)] = best;
  }
  return out;
}

PassResult forward_backward(const JointModel& model, const Mat& emb,
                            const std::vector<bool>& real,
                            const PassTargets& targets, const PassWeights& w,
                            Params* grads, Mat* demb) {
  const bool need_back = grads != nullptr || demb != nullptr;
  Params scratch;
  if (need_back && grads == nullptr) {
    scratch = Params::zeros_like(model.params());
    grads = &scratch;
  }
  EncodeCache cache;
  Mat xf = model.encode(emb, real, need_back ? &cache : nullptr);

  PassResult res;
  Vec dl_c;
  Mat dl_m;
  bool have_cls = false, have_mlm = false;

  if (targets.label >= 0) {
    Vec logits = model.cls_head(xf, real);
    res.l_c = cross_entropy(logits, targets.label);
    if (need_back) {
      dl_c = softmax(logits);
      dl_c(targets.label) -= 1.0;
      dl_c *= w.w_c;
      have_cls = true;
    }
  }

  const bool want_mlm =
      targets.mlm_positions != nullptr && !targets.mlm_positions->empty();
  if (want_mlm || targets.noise_all) {
    if (targets.clean == nullptr)
      throw std::invalid_argument("MLM targets require clean text");
    Mat logits_m = model.mlm_head(xf);
    if (need_back) dl_m = Mat::Zero(logits_m.rows(), logits_m.cols());
    auto add_term = [&](const std::vector<int>& positions, double weight,
                        double& loss_out) {
      const double inv_n = 1.0 / static_cast<double>(positions.size());
      for (int p : positions) {
        int tgt = targets.clean->ids[static_cast<std::size_t>(p)];
        Vec row = logits_m.row(p).transpose();
        loss_out += cross_entropy(row, tgt) * inv_n;
        if (need_back) {
          Vec d = softmax(row);
          d(tgt) -= 1.0;
          dl_m.row(p) += (weight * inv_n) * d.transpose();
        }
      }
    };
    if (want_mlm) {
      add_term(*targets.mlm_positions, w.w_mlm, res.l_mlm);
      have_mlm = true;
    }
    if (targets.noise_all) {
      if (targets.clean->length() != static_cast<int>(emb.rows()))
        throw std::invalid_argument(
            "noise reconstruction requires aligned clean text");
      std::vector<int> all;
      for (int i = 0; i < targets.clean->length(); ++i)
        if (targets.clean->ids[static_cast<std::size_t>(i)] != Vocabulary::kPad)
          all.push_back(i);
      if (!all.empty()) {
        add_term(all, w.w_noise, res.l_noise);
        have_mlm = true;
      }
    }
  }

  if (need_back) {
    Mat dxf = Mat::Zero(xf.rows(), xf.cols());
    model.head_backward(cache, have_cls ? &dl_c : nullptr,
                        have_mlm ? &dl_m : nullptr, *grads, dxf);
    Mat d_emb = model.encode_backward(dxf, cache, *grads);
    // Embedding-table rows receive the embedding gradient when the pass came
    // from real token ids; callers that pass synthetic embeddings handle the
    // table themselves via the returned demb.
    if (demb) *demb = std::move(d_emb);
  }
  return res;
}

void accumulate_embedding_grad(Params& grads, const TokenSequence& text,
                               const Mat& demb) {
  for (int i = 0; i < text.length(); ++i)
    grads.tok_emb.row(text.ids[static_cast<std::size_t>(i)]) += demb.row(i);
}

double joint_loss(const JointModel& model, const TokenSequence& clean,
                  const TokenSequence& masked,
                  const std::vector<int>& mlm_positions, int label, double w_c,
                  double w_mlm) {
  PassWeights w{w_c, w_mlm, 0.0};
  PassTargets t_clean;
  t_clean.label = label;
  PassResult r_clean = forward_backward(model, model.embed(clean),
                                        JointModel::real_mask(clean), t_clean,
                                        w, nullptr, nullptr);
  PassTargets t_masked;
  t_masked.label = label;
  t_masked.mlm_positions = &mlm_positions;
  t_masked.clean = &clean;
  PassResult r_masked = forward_backward(model, model.embed(masked),
                                         JointModel::real_mask(masked),
                                         t_masked, w, nullptr, nullptr);
  return w_c * (r_clean.l_c + r_masked.l_c) + w_mlm * r_masked.l_mlm;
}

namespace {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void JointModel::save(const std::string& path, std::uint64_t vocab_hash) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  json header{{"format", "textpure-ckpt-v1"},
              {"vocab_size", cfg_.vocab_size},
              {"num_classes", cfg_.num_classes},
              {"dim", cfg_.dim},
              {"heads", cfg_.heads},
              {"blocks", cfg_.blocks},
              {"ffn_dim", cfg_.ffn_dim},
              {"max_len", cfg_.max_len},
              {"seed", cfg_.seed},
              {"vocab_hash", hash_hex(vocab_hash)}};
  std::string hs = header.dump();
  std::uint64_t hlen = hs.size();
  out.write("TXPCKPT1", 8);
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  p_.for_each_tensor([&](const std::string&, const Mat& m) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(
                  static_cast<std::size_t>(m.size()) * sizeof(double)));
  });
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

JointModel JointModel::load(const std::string& path,
                            std::uint64_t expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "TXPCKPT1")
    throw std::runtime_error("not a checkpoint file: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  json header = json::parse(hs);
  if (header.value("format", "") != "textpure-ckpt-v1")
    throw std::runtime_error("unsupported checkpoint format");
  if (header.at("vocab_hash").get<std::string>() !=
      hash_hex(expected_vocab_hash))
    throw std::runtime_error(
        "checkpoint vocabulary hash mismatch; refusing to load");
  ModelConfig cfg;
  cfg.vocab_size = header.at("vocab_size").get<int>();
  cfg.num_classes = header.at("num_classes").get<int>();
  cfg.dim = header.at("dim").get<int>();
  cfg.heads = header.at("heads").get<int>();
  cfg.blocks = header.at("blocks").get<int>();
  cfg.ffn_dim = header.at("ffn_dim").get<int>();
  cfg.max_len = header.at("max_len").get<int>();
  cfg.seed = header.at("seed").get<std::uint64_t>();
  JointModel model(cfg);
  model.p_.for_each_tensor([&](const std::string& name, Mat& m) {
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(static_cast<std::size_t>(m.size()) *
                                         sizeof(double)));
    if (!in)
      throw std::runtime_error("checkpoint truncated while reading " + name);
  });
  return model;
}

}  // namespace textpure
