#pragma once

#include <span>
#include <string_view>

#include "ace/common.hpp"
#include "ace/core.hpp"

namespace ace {

struct LengthMeasurement {
  long long count = 0;
  Script rule = Script::Latin;
};

// True for code points in the CJK unified ideograph blocks plus
// Hiragana/Katakana and Hangul. Everything else (including other non-Latin
// scripts) falls back to the word-run rule.
bool is_cjk_codepoint(char32_t cp);

// Latin: maximal non-whitespace runs containing no CJK code point.
// Cjk: CJK code points only.
// Mixed: each CJK code point counts 1, remaining non-whitespace runs count 1
// each, the two rules applied disjointly. Invalid UTF-8 bytes are treated as
// ordinary non-CJK characters; the function never fails.
LengthMeasurement count_length(std::string_view text, Script script);

// Single target length for the reward band. Midpoint rounds half up.
// A resolved target of 0 is DegenerateTarget: the relative deviation would
// divide by zero.
Result<long long> resolve_target(const LengthSpec& spec, TargetPolicy policy);

// delta = |count - target| / target; 1.0 inside the band delta <= big_delta,
// exp(-alpha * (delta - big_delta)) outside. Always in (0, 1].
// Throws UsageError on target <= 0, delta < 0 or alpha < 0.
double length_reward(long long count, long long target, double big_delta, double alpha);

// FullyMet -> 1.0, PartiallyMet -> 0.5, NotMet -> 0.0. Fixed, not
// configurable, so rewards stay comparable across runs.
double verdict_score(VerdictLevel level);

ConstraintVerdict make_verdict(int index, VerdictLevel level);

// Mean of per-constraint scores. Throws UsageError on an empty list.
double constraint_reward(std::span<const ConstraintVerdict> verdicts);

// (r_l + r_c) / 2. Throws UsageError when either input is outside [0, 1].
double overall_reward(double r_l, double r_c);

}  // namespace ace
