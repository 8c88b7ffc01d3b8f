#include "textpure/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

EmbeddingTable load_embedding_fixture(const std::string& path,
                                      const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding fixture: " + path);
  std::string line;
  int dim = -1;
  EmbeddingTable table(static_cast<std::size_t>(vocab.size()));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string surface;
    ss >> surface;
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.empty())
      throw std::runtime_error("embedding fixture line " + std::to_string(row) +
                               ": no values");
    if (dim < 0) dim = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dim)
      throw std::runtime_error("embedding fixture line " + std::to_string(row) +
                               ": inconsistent dimension");
    if (!vocab.contains(surface)) continue;
    int id = vocab.id(surface);
    if (vocab.is_special(id)) continue;
    table[static_cast<std::size_t>(id)] =
        Eigen::Map<Eigen::VectorXd>(vals.data(), dim);
  }
  if (dim < 0) throw std::runtime_error("embedding fixture is empty: " + path);
  for (auto& e : table)
    if (e.size() == 0) e = Eigen::VectorXd::Zero(dim);
  return table;
}

EmbeddingTable train_skipgram(const std::vector<LabeledExample>& corpus,
                              const Vocabulary& vocab,
                              const SkipGramConfig& cfg) {
  const int v = vocab.size();
  auto rng = make_rng(cfg.seed, 0x5697u);
  std::normal_distribution<double> init(0.0, 1.0 / std::sqrt(cfg.dim));
  Eigen::MatrixXd in_vec(v, cfg.dim), out_vec(v, cfg.dim);
  for (int i = 0; i < v; ++i)
    for (int d = 0; d < cfg.dim; ++d) {
      in_vec(i, d) = init(rng);
      out_vec(i, d) = init(rng);
    }

  // Unigram table for negative sampling (frequency^0.75).
  std::vector<double> freq(static_cast<std::size_t>(v), 0.0);
  for (const auto& ex : corpus)
    for (int id : ex.text.ids)
      if (!vocab.is_special(id)) freq[static_cast<std::size_t>(id)] += 1.0;
  for (auto& f : freq) f = std::pow(f, 0.75);
  std::discrete_distribution<int> neg_dist(freq.begin(), freq.end());
  std::uniform_int_distribution<int> win_dist(1, cfg.window);

  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& ex : corpus) {
      const auto& ids = ex.text.ids;
      for (std::size_t c = 0; c < ids.size(); ++c) {
        int center = ids[c];
        if (vocab.is_special(center)) continue;
        int win = win_dist(rng);
        for (int off = -win; off <= win; ++off) {
          if (off == 0) continue;
          std::ptrdiff_t t = static_cast<std::ptrdiff_t>(c) + off;
          if (t < 0 || t >= static_cast<std::ptrdiff_t>(ids.size())) continue;
          int ctx = ids[static_cast<std::size_t>(t)];
          if (vocab.is_special(ctx)) continue;
          Eigen::VectorXd grad_in = Eigen::VectorXd::Zero(cfg.dim);
          auto vi = in_vec.row(center);
          for (int n = 0; n <= cfg.negatives; ++n) {
            int target = n == 0 ? ctx : neg_dist(rng);
            double label = n == 0 ? 1.0 : 0.0;
            if (n > 0 && target == ctx) continue;
            auto vo = out_vec.row(target);
            double g = (sigmoid(vi.dot(vo)) - label) * cfg.lr;
            grad_in += g * vo.transpose();
            out_vec.row(target) -= g * vi;
          }
          in_vec.row(center) -= grad_in.transpose();
        }
      }
    }
  }

  EmbeddingTable table(static_cast<std::size_t>(v));
  for (int i = 0; i < v; ++i) {
    if (vocab.is_special(i) || freq[static_cast<std::size_t>(i)] == 0.0)
      table[static_cast<std::size_t>(i)] = Eigen::VectorXd::Zero(cfg.dim);
    else
      table[static_cast<std::size_t>(i)] = in_vec.row(i).transpose();
  }
  return table;
}

SynonymTable build_synonym_table(const EmbeddingTable& embeddings, int k_max,
                                 double threshold) {
  const int v = static_cast<int>(embeddings.size());
  SynonymTable table;
  table.neighbors.resize(static_cast<std::size_t>(v));
  std::vector<double> norms(static_cast<std::size_t>(v));
  for (int i = 0; i < v; ++i) norms[static_cast<std::size_t>(i)] = embeddings[static_cast<std::size_t>(i)].norm();

  for (int i = Vocabulary::kNumSpecial; i < v; ++i) {
    if (norms[static_cast<std::size_t>(i)] == 0.0) continue;
    auto& list = table.neighbors[static_cast<std::size_t>(i)];
    for (int j = Vocabulary::kNumSpecial; j < v; ++j) {
      if (j == i || norms[static_cast<std::size_t>(j)] == 0.0) continue;
      double sim = embeddings[static_cast<std::size_t>(i)].dot(
                       embeddings[static_cast<std::size_t>(j)]) /
                   (norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)]);
      if (sim >= threshold) list.emplace_back(j, sim);
    }
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (static_cast<int>(list.size()) > k_max)
      list.resize(static_cast<std::size_t>(k_max));
  }
  return table;
}

double sentence_similarity(const EmbeddingTable& embeddings,
                           const TokenSequence& a, const TokenSequence& b) {
  if (a == b) return 1.0;
  if (embeddings.empty()) return 1.0;
  auto mean_of = [&](const TokenSequence& s) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(embeddings[0].size());
    int n = 0;
    for (int id : s.ids) {
      const auto& e = embeddings[static_cast<std::size_t>(id)];
      if (e.norm() == 0.0) continue;
      m += e;
      ++n;
    }
    if (n > 0) m /= n;
    return m;
  };
  return cosine(mean_of(a), mean_of(b));
}

}  // namespace textpure
