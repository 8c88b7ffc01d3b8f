#include "textpure/victims.hpp"

#include <algorithm>

namespace textpure {

MlmProposer make_mlm_proposer(const JointModel& model) {
  const JointModel* m = &model;
  return [m](const TokenSequence& masked, int pos, int k) {
    Mat emb = m->embed(masked);
    auto real = JointModel::real_mask(masked);
    EncodeCache cache;
    Mat xf = m->encode(emb, real, &cache);
    Eigen::RowVectorXd logits =
        xf.row(pos) * m->params().w_mlm + m->params().b_mlm.row(0);
    std::vector<std::pair<double, int>> scored;
    for (int id = Vocabulary::kNumSpecial; id < m->config().vocab_size; ++id)
      scored.emplace_back(logits(id), id);
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<int> out;
    for (int i = 0; i < k && i < static_cast<int>(scored.size()); ++i)
      out.push_back(scored[static_cast<std::size_t>(i)].second);
    return out;
  };
}

}  // namespace textpure
