#include "ace/rewards.hpp"

#include <cmath>

namespace ace {

namespace {

// decodes one UTF-8 code point at `i`, advancing `i`; malformed bytes decode
// as U+FFFD one byte at a time
char32_t decode_utf8(std::string_view s, size_t& i) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

bool is_space_codepoint(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x00A0:   // no-break space
    case 0x3000:   // ideographic space
    case 0x2028: case 0x2029:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;  // en quad .. hair space
  }
}

}  // namespace

bool is_cjk_codepoint(char32_t cp) {
  struct Range { char32_t lo, hi; };
  static constexpr Range ranges[] = {
      {0x1100, 0x11FF},    // Hangul Jamo
      {0x3040, 0x30FF},    // Hiragana, Katakana
      {0x3130, 0x318F},    // Hangul Compatibility Jamo
      {0x31F0, 0x31FF},    // Katakana Phonetic Extensions
      {0x3400, 0x4DBF},    // CJK Extension A
      {0x4E00, 0x9FFF},    // CJK Unified Ideographs
      {0xAC00, 0xD7A3},    // Hangul Syllables
      {0xF900, 0xFAFF},    // CJK Compatibility Ideographs
      {0x20000, 0x2FA1F},  // CJK Extensions B..F + compatibility supplement
      {0x30000, 0x323AF},  // CJK Extensions G, H
  };
  for (const auto& r : ranges) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

LengthMeasurement count_length(std::string_view text, Script script) {
  long long cjk_points = 0;
  long long clean_runs = 0;    // non-whitespace runs with no CJK inside
  long long mixed_runs = 0;    // runs split additionally at CJK boundaries
  bool in_run = false;
  bool run_has_cjk = false;
  bool in_mixed_run = false;

  size_t i = 0;
  while (i < text.size()) {
    char32_t cp = decode_utf8(text, i);
    bool space = is_space_codepoint(cp);
    bool cjk = !space && is_cjk_codepoint(cp);

    if (space) {
      if (in_run && !run_has_cjk) ++clean_runs;
      in_run = false;
      run_has_cjk = false;
      in_mixed_run = false;
      continue;
    }
    if (!in_run) {
      in_run = true;
      run_has_cjk = false;
    }
    if (cjk) {
      ++cjk_points;
      run_has_cjk = true;
      in_mixed_run = false;
    } else {
      if (!in_mixed_run) {
        ++mixed_runs;
        in_mixed_run = true;
      }
    }
  }
  if (in_run && !run_has_cjk) ++clean_runs;

  switch (script) {
    case Script::Latin: return {clean_runs, script};
    case Script::Cjk: return {cjk_points, script};
    case Script::Mixed: return {cjk_points + mixed_runs, script};
  }
  return {clean_runs, script};
}

Result<long long> resolve_target(const LengthSpec& spec, TargetPolicy policy) {
  long long target = 0;
  switch (policy) {
    case TargetPolicy::Midpoint:
      target = std::llround((static_cast<double>(spec.lower) + spec.upper) / 2.0);
      break;
    case TargetPolicy::Lower:
      target = spec.lower;
      break;
    case TargetPolicy::Upper:
      target = spec.upper;
      break;
  }
  if (target <= 0) {
    return fail<long long>(ErrorCode::DegenerateTarget,
                           "resolved target length is 0; length reward undefined");
  }
  return target;
}

double length_reward(long long count, long long target, double big_delta, double alpha) {
  if (target <= 0) throw UsageError("length_reward: target must be positive");
  if (big_delta < 0) throw UsageError("length_reward: delta must be >= 0");
  if (alpha < 0) throw UsageError("length_reward: alpha must be >= 0");
  double deviation =
      std::abs(static_cast<double>(count) - static_cast<double>(target)) / target;
  if (deviation <= big_delta) return 1.0;
  return std::exp(-alpha * (deviation - big_delta));
}

double verdict_score(VerdictLevel level) {
  switch (level) {
    case VerdictLevel::FullyMet: return 1.0;
    case VerdictLevel::PartiallyMet: return 0.5;
    case VerdictLevel::NotMet: return 0.0;
  }
  return 0.0;
}

ConstraintVerdict make_verdict(int index, VerdictLevel level) {
  return ConstraintVerdict{index, level, verdict_score(level)};
}

double constraint_reward(std::span<const ConstraintVerdict> verdicts) {
  if (verdicts.empty()) throw UsageError("constraint_reward: verdict list is empty");
  double sum = 0.0;
  for (const auto& v : verdicts) sum += v.score;
  return sum / static_cast<double>(verdicts.size());
}

double overall_reward(double r_l, double r_c) {
  if (r_l < 0.0 || r_l > 1.0) throw UsageError("overall_reward: length reward outside [0, 1]");
  if (r_c < 0.0 || r_c > 1.0) throw UsageError("overall_reward: constraint reward outside [0, 1]");
  return (r_l + r_c) / 2.0;
}

}  // namespace ace
