#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ace/backend.hpp"
#include "ace/common.hpp"
#include "ace/core.hpp"
#include "ace/parsers.hpp"

namespace ace {

struct RawInstruction {
  std::string id;  // empty -> derived from content digest
  std::string text;
};

enum class PipelineStage { Dedup, Filter, Checklist, Length, Done };

const char* pipeline_stage_name(PipelineStage stage);

// Sidecar state for resumable runs: an append-only log of record ids with
// their disposition, plus the coarsest stage reached. Appends are
// line-granular so a killed run loses at most the record in flight.
struct PipelineCheckpoint {
  PipelineStage stage = PipelineStage::Dedup;
  std::unordered_set<std::string> processed_ids;

  static PipelineCheckpoint load(const std::filesystem::path& path);
};

struct DatasetStats {
  long long total_instructions = 0;  // records passing validate_record
  std::optional<double> avg_constraints;
  std::optional<double> avg_required_length;  // target-resolved
  long long unreadable_lines = 0;
  long long invalid_records = 0;
};

enum class FilterDecision { Keep, Drop, Maybe };

struct PipelineConfig {
  std::string model_id = "verifier";
  bool keep_maybe = false;
  bool strict = false;
  TargetPolicy target_policy = TargetPolicy::Midpoint;
  std::string pipeline_version = "ace-pipeline/1";
  std::string source = "raw";
  std::string created_at;  // informational; left empty the output is byte-stable
  double temperature = 0.0;
  int max_output = 8192;
  int max_parallel = 8;
};

// whitespace-normalized identity used by dedup: trim + collapse runs
std::string normalized_text_key(const std::string& text);

// exact-match dedup on normalized text, first occurrence wins, order kept
std::vector<RawInstruction> dedup(const std::vector<RawInstruction>& records);

// streaming form of the same rule
class Deduper {
 public:
  bool admit(const std::string& text) { return seen_.insert(normalized_text_key(text)).second; }

 private:
  std::unordered_set<std::string> seen_;
};

// Maps one raw input line to an instruction. Accepts {id?, text} objects and
// conversation dumps ({conversations|conversation: [{role|from, content|value}]},
// first user turn wins). Script is taken from a "script" field when present,
// otherwise inferred from the text.
Result<RawInstruction> extract_raw(const std::string& line);

Script detect_script(const std::string& text);

// Filter prompt -> completion -> FilterAnswer. A parse failure is re-prompted
// once past the cache; a second failure quarantines the record.
Result<FilterDecision> filter_longform(const Instruction& instruction, CachedBackend& backend,
                                       const PipelineConfig& config);

// ChecklistGen prompt; checklists outside 2..8 items count as failures and
// follow the same retry-then-quarantine path.
Result<Checklist> build_checklist(const Instruction& instruction, CachedBackend& backend,
                                  const PipelineConfig& config);

// LengthReq prompt over instruction + serialized checklist. Range-invalid
// bounds re-prompt once; bounds that are not multiples of 100 are accepted
// with a warning.
Result<LengthSpec> assign_length(const Instruction& instruction, const Checklist& checklist,
                                 CachedBackend& backend, const PipelineConfig& config);

struct RolloutScore {
  RewardBreakdown breakdown;
  std::vector<ConstraintVerdict> verdicts;
  bool verify_from_cache = false;
  bool verify_failed = false;  // verdicts zeroed under ZeroOnRetryFailure
};

struct ScoreOutcome {
  std::vector<RolloutScore> per_rollout;
  std::optional<GroupScore> group;  // present when 2+ rollouts
};

// Full reward path per rollout: length count + length reward, one Verify call
// covering the whole checklist, constraint reward, overall reward; then
// group-relative advantages across the rollouts' overall rewards.
// Verification fans out across rollouts; the backend's semaphore bounds the
// actual concurrency.
Result<ScoreOutcome> score_rollouts(const DatasetRecord& record,
                                    const std::vector<Rollout>& rollouts,
                                    CachedBackend& backend, const RewardConfig& reward_config,
                                    const GrpoConfig& grpo_config,
                                    const PipelineConfig& config);

DatasetStats dataset_stats(const std::filesystem::path& path, TargetPolicy policy);

struct PrepareSummary {
  long long lines_read = 0;
  long long unreadable = 0;
  long long duplicates = 0;
  long long skipped_checkpoint = 0;
  long long dropped_filter = 0;
  long long dropped_maybe = 0;
  long long kept_maybe = 0;
  long long quarantined_filter = 0;
  long long quarantined_checklist = 0;
  long long quarantined_length = 0;
  long long written = 0;
};

// Streaming dedup -> filter -> checklist -> length with per-record
// checkpointing. Sidecar files: <output>.ckpt (disposition log) and
// <output>.quarantine.jsonl (failure reason per line). Re-running after an
// interruption processes only unfinished records; completions already made
// are served by the cache. A backend-level failure aborts with the
// checkpoint intact.
Result<PrepareSummary> run_prepare(const std::filesystem::path& input,
                                   const std::filesystem::path& output,
                                   CachedBackend& backend, const PipelineConfig& config);

}  // namespace ace
