#pragma once

#include <span>
#include <vector>

#include "ace/common.hpp"
#include "ace/core.hpp"

namespace ace {

struct RatioPair {
  double ratio = 1.0;
  double clipped = 1.0;  // clamp(ratio, 1 - eps, 1 + eps)
};

struct SurrogateStats {
  double objective_value = 0.0;
  double clip_fraction = 0.0;  // share of rollouts where min picked the clipped branch
  double kl_value = 0.0;
};

// exp(logp_new - logp_old), computed from log-probabilities so extreme
// rollouts underflow to 0 instead of overflowing. Throws UsageError on
// non-finite inputs.
double importance_ratio(double logp_new, double logp_old);

double clip_ratio(double ratio, double eps);

RatioPair make_ratio_pair(double logp_new, double logp_old, double eps);

// Group-relative advantages: (R_i - mean) / std with the sample (unbiased,
// n-1) standard deviation. Groups with std below std_floor get all-zero
// advantages; std is reported as computed either way. Throws UsageError on
// fewer than 2 rewards.
GroupScore group_advantages(std::span<const double> rewards, double std_floor);

// min(ratio * advantage, clipped * advantage)
double surrogate_term(double ratio, double clipped, double advantage);

// true when the clipped branch is the strict minimum, i.e. clipping is active
bool surrogate_clipped(double ratio, double clipped, double advantage);

// D_KL(p || q) = sum p * log(p / q) over a shared categorical support; terms
// with p = 0 contribute 0. Throws UsageError on support mismatch or negative
// entries, InfiniteKlError when q is 0 where p > 0.
double kl_penalty(std::span<const double> p, std::span<const double> q);

// Same estimator as group_advantages. Throws UsageError on fewer than 2.
double group_std(std::span<const double> rewards);

double mean_of(std::span<const double> values);

}  // namespace ace
