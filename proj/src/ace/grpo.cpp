#include "ace/grpo.hpp"

#include <algorithm>
#include <cmath>

namespace ace {

double importance_ratio(double logp_new, double logp_old) {
  if (!std::isfinite(logp_new) || !std::isfinite(logp_old)) {
    throw UsageError("importance_ratio: log-probabilities must be finite");
  }
  return std::exp(logp_new - logp_old);
}

double clip_ratio(double ratio, double eps) {
  return std::clamp(ratio, 1.0 - eps, 1.0 + eps);
}

RatioPair make_ratio_pair(double logp_new, double logp_old, double eps) {
  double r = importance_ratio(logp_new, logp_old);
  return RatioPair{r, clip_ratio(r, eps)};
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double group_std(std::span<const double> rewards) {
  if (rewards.size() < 2) throw UsageError("group_std: need at least 2 rewards");
  double mean = mean_of(rewards);
  double ss = 0.0;
  for (double r : rewards) {
    double d = r - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(rewards.size() - 1));
}

GroupScore group_advantages(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) throw UsageError("group_advantages: need at least 2 rewards");
  GroupScore score;
  score.rewards.assign(rewards.begin(), rewards.end());
  score.mean = mean_of(rewards);
  score.std_dev = group_std(rewards);
  score.advantages.resize(rewards.size(), 0.0);
  if (score.std_dev >= std_floor) {
    for (size_t i = 0; i < rewards.size(); ++i) {
      score.advantages[i] = (rewards[i] - score.mean) / score.std_dev;
    }
  }
  return score;
}

double surrogate_term(double ratio, double clipped, double advantage) {
  return std::min(ratio * advantage, clipped * advantage);
}

bool surrogate_clipped(double ratio, double clipped, double advantage) {
  return clipped * advantage < ratio * advantage;
}

double kl_penalty(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw UsageError("kl_penalty: support size mismatch");
  if (p.empty()) throw UsageError("kl_penalty: empty distributions");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw UsageError("kl_penalty: negative probability");
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw InfiniteKlError("kl_penalty: q has zero mass where p > 0");
    }
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

}  // namespace ace
