#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ace/common.hpp"

namespace ace {

// Counting rule applied to a response before the length reward.
enum class Script { Latin, Cjk, Mixed };

struct Instruction {
  std::string id;
  std::string text;
  Script script = Script::Latin;
};

struct ConstraintItem {
  int index = 0;  // 1-based, contiguous
  std::string question;
};

struct Checklist {
  std::vector<ConstraintItem> items;

  int size() const { return static_cast<int>(items.size()); }
};

// Acceptable word/character range for one instruction. Bounds produced by
// the preparation pipeline are multiples of 100 with a span of at most 2000.
struct LengthSpec {
  int lower = 0;
  int upper = 0;
};

struct Rollout {
  std::string text;
};

enum class VerdictLevel { FullyMet, PartiallyMet, NotMet };

struct ConstraintVerdict {
  int index = 0;
  VerdictLevel level = VerdictLevel::NotMet;
  double score = 0.0;  // always verdict_score(level); stored for serialization
};

struct RewardBreakdown {
  long long length_count = 0;
  double length_reward = 0.0;
  double constraint_reward = 0.0;
  double overall = 0.0;  // (length_reward + constraint_reward) / 2
};

struct GroupScore {
  std::vector<double> rewards;
  double mean = 0.0;
  double std_dev = 0.0;  // sample (unbiased) estimator, reported as computed
  std::vector<double> advantages;
};

enum class TargetPolicy { Midpoint, Lower, Upper };
enum class ParseFailurePolicy { Strict, ZeroOnRetryFailure };

struct RewardConfig {
  double delta = 0.2;
  double alpha = 0.5;
  TargetPolicy target_policy = TargetPolicy::Midpoint;
  ParseFailurePolicy parse_failure_policy = ParseFailurePolicy::Strict;
};

struct GrpoConfig {
  int group_size = 32;
  double clip_eps = 0.2;
  double beta = 0.0;  // KL penalty weight; 0 disables the term
  double std_floor = 1e-8;
};

struct RecordMeta {
  std::string source;
  std::string pipeline_version;
  std::string created_at;  // informational only; never part of cache keys
};

struct DatasetRecord {
  Instruction instruction;
  Checklist checklist;
  LengthSpec length_spec;
  RecordMeta meta;
};

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;

  bool ok() const { return errors.empty(); }
};

// Checks every type invariant and reports all findings, never just the
// first. Pipeline-specific invariants (checklist size 2..8, bounds that are
// multiples of 100) apply only when meta.pipeline_version is set; the
// multiples-of-100 rule is reported as a warning, not an error.
ValidationResult validate_record(const DatasetRecord& record);

// Collision-resistant digest over length-prefixed inputs; stable across runs
// and platforms. 64-char lowercase hex (SHA-256).
// Throws UsageError when parts is empty.
std::string cache_key(const std::string& template_version,
                      const std::string& model_id,
                      const std::vector<std::string>& parts);

// SHA-256 of a single string, lowercase hex. Used for content-derived ids.
std::string content_digest(const std::string& text);

const char* script_name(Script script);
Result<Script> script_from_name(const std::string& name);
const char* verdict_level_name(VerdictLevel level);
Result<VerdictLevel> verdict_level_from_name(const std::string& name);
const char* target_policy_name(TargetPolicy policy);
Result<TargetPolicy> target_policy_from_name(const std::string& name);
const char* parse_failure_policy_name(ParseFailurePolicy policy);
Result<ParseFailurePolicy> parse_failure_policy_from_name(const std::string& name);

// Canonical JSONL serialization: snake_case field names, UTF-8, no BOM.
void to_json(nlohmann::json& j, const Instruction& v);
void from_json(const nlohmann::json& j, Instruction& v);
void to_json(nlohmann::json& j, const ConstraintItem& v);
void from_json(const nlohmann::json& j, ConstraintItem& v);
void to_json(nlohmann::json& j, const Checklist& v);
void from_json(const nlohmann::json& j, Checklist& v);
void to_json(nlohmann::json& j, const LengthSpec& v);
void from_json(const nlohmann::json& j, LengthSpec& v);
void to_json(nlohmann::json& j, const ConstraintVerdict& v);
void from_json(const nlohmann::json& j, ConstraintVerdict& v);
void to_json(nlohmann::json& j, const RewardBreakdown& v);
void from_json(const nlohmann::json& j, RewardBreakdown& v);
void to_json(nlohmann::json& j, const GroupScore& v);
void from_json(const nlohmann::json& j, GroupScore& v);
void to_json(nlohmann::json& j, const RecordMeta& v);
void from_json(const nlohmann::json& j, RecordMeta& v);
void to_json(nlohmann::json& j, const DatasetRecord& v);
void from_json(const nlohmann::json& j, DatasetRecord& v);

}  // namespace ace
