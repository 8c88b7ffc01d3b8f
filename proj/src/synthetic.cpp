#include "textpure/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {
namespace {

Eigen::VectorXd random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = d(rng);
  return v / v.norm();
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.keyword_groups < 1 || spec.forms_per_class < 1)
    throw std::invalid_argument("synthetic spec needs at least one keyword");
  SyntheticCorpus corpus;
  auto rng = make_rng(spec.seed, 0x67656eULL);
  std::normal_distribution<double> noise(0.0, 1.0);

  // Keyword embeddings: group anchor + signed class offset + jitter. Same
  // group, same class ~0.9 cosine; same group, opposite class ~0.7 — both
  // above the attacker's 0.5 candidate threshold.
  std::vector<std::vector<std::string>> kw(2);
  Eigen::VectorXd class_axis = random_unit(spec.embedding_dim, rng);
  for (int g = 0; g < spec.keyword_groups; ++g) {
    Eigen::VectorXd anchor = random_unit(spec.embedding_dim, rng);
    for (int cls = 0; cls < 2; ++cls) {
      double sign = cls == 1 ? 1.0 : -1.0;
      for (int f = 0; f < spec.forms_per_class; ++f) {
        std::string w = (cls == 1 ? "pw" : "nw") + std::to_string(g) +
                        static_cast<char>('a' + f);
        Eigen::VectorXd jitter(spec.embedding_dim);
        for (int i = 0; i < spec.embedding_dim; ++i) jitter(i) = noise(rng);
        jitter *= 0.10 / std::sqrt(static_cast<double>(spec.embedding_dim));
        corpus.embeddings[w] = anchor + sign * 0.42 * class_axis + jitter;
        kw[static_cast<std::size_t>(cls)].push_back(w);
      }
    }
  }

  // Fillers: random directions rejection-sampled to stay clear of every other
  // embedding, so they never enter a candidate list.
  std::vector<std::vector<std::string>> fill(3);  // neg, pos, neutral pools
  auto far_from_all = [&](const Eigen::VectorXd& e) {
    for (const auto& [w, v] : corpus.embeddings)
      if (e.dot(v) / (e.norm() * v.norm()) >= 0.45) return false;
    return true;
  };
  auto add_fillers = [&](int count, const std::string& prefix, int pool) {
    for (int i = 0; i < count; ++i) {
      std::string w = prefix + std::to_string(i);
      Eigen::VectorXd e;
      do {
        e = random_unit(spec.embedding_dim, rng);
      } while (!far_from_all(e));
      corpus.embeddings[w] = e;
      fill[static_cast<std::size_t>(pool)].push_back(w);
    }
  };
  add_fillers(spec.filler_neg, "fn", 0);
  add_fillers(spec.filler_pos, "fp", 1);
  add_fillers(spec.filler_neutral, "fz", 2);

  auto pick = [&](const std::vector<std::string>& pool,
                  std::mt19937_64& r) -> const std::string& {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(r)];
  };

  // Keyword groups are drawn with 1/sqrt(g+1) weights: frequent enough that
  // recovery prefers keywords over fillers, flat enough that no single group
  // carries the class signal.
  std::vector<double> group_weight(static_cast<std::size_t>(spec.keyword_groups));
  for (int g = 0; g < spec.keyword_groups; ++g)
    group_weight[static_cast<std::size_t>(g)] = 1.0 / std::sqrt(1.0 + g);

  auto make_example = [&](std::uint64_t stream) {
    auto r = make_rng(spec.seed, stream);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::discrete_distribution<int> group(group_weight.begin(),
                                          group_weight.end());
    std::uniform_int_distribution<int> form(0, spec.forms_per_class - 1);
    int label = u(r) < 0.5 ? 0 : 1;
    std::vector<std::string> words;
    for (int i = 0; i < spec.keywords_per_sentence; ++i) {
      int cls = u(r) < spec.keyword_noise ? 1 - label : label;
      std::size_t idx = static_cast<std::size_t>(group(r)) *
                            static_cast<std::size_t>(spec.forms_per_class) +
                        static_cast<std::size_t>(form(r));
      words.push_back(kw[static_cast<std::size_t>(cls)][idx]);
    }
    for (int i = 0; i < spec.fillers_per_sentence; ++i) {
      double x = u(r);
      int pool = x < spec.filler_purity          ? label
                 : x < spec.filler_purity + spec.filler_opposite ? 1 - label
                                                  : 2;
      words.push_back(pick(fill[static_cast<std::size_t>(pool)], r));
    }
    std::shuffle(words.begin(), words.end(), r);
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    text += " .";
    return RawExample{text, label};
  };

  for (int i = 0; i < spec.train_size; ++i)
    corpus.train.push_back(make_example(0x100000ULL + static_cast<std::uint64_t>(i)));
  for (int i = 0; i < spec.test_size; ++i)
    corpus.test.push_back(make_example(0x900000ULL + static_cast<std::uint64_t>(i)));
  return corpus;
}

void write_embedding_fixture(
    const std::string& path,
    const std::map<std::string, Eigen::VectorXd>& emb) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (const auto& [w, v] : emb) {
    out << w;
    for (int i = 0; i < v.size(); ++i) out << ' ' << v(i);
    out << "\n";
  }
}

void write_synthetic_corpus(const std::string& dir,
                            const SyntheticCorpus& corpus) {
  std::filesystem::create_directories(dir);
  write_csv(dir + "/train.csv", corpus.train);
  write_csv(dir + "/test.csv", corpus.test);
  write_embedding_fixture(dir + "/embeddings.txt", corpus.embeddings);
}

}  // namespace textpure
