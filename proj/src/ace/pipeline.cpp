#include "ace/pipeline.hpp"

#include <cctype>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ace/grpo.hpp"
#include "ace/rewards.hpp"

namespace ace {

namespace {

using nlohmann::json;

CompletionRequest make_request(const PipelineConfig& config, RenderedPrompt prompt) {
  CompletionRequest request;
  request.model_id = config.model_id;
  request.prompt = std::move(prompt);
  request.temperature = config.temperature;
  request.max_output = config.max_output;
  return request;
}

std::string request_key(const CompletionRequest& request) {
  return cache_key(request.prompt.version, request.model_id, {request.prompt.text});
}

bool backend_level(ErrorCode code) {
  return code == ErrorCode::BackendUnavailable || code == ErrorCode::RequestRejected ||
         code == ErrorCode::Protocol;
}

// completion + parse with one re-prompt past the cache; parse-level failures
// after the retry land in `quarantine_reason`
template <typename T, typename ParseFn>
Result<T> complete_and_parse(CachedBackend& backend, const CompletionRequest& request,
                             ParseFn parse) {
  const std::string key = request_key(request);
  auto completion = backend.cached_complete(request, key);
  if (!completion.ok()) return Result<T>(completion.error());
  Result<T> parsed = parse(completion.value().text);
  if (parsed.ok()) return parsed;

  completion = backend.refresh(request, key);
  if (!completion.ok()) return Result<T>(completion.error());
  Result<T> retried = parse(completion.value().text);
  if (retried.ok()) return retried;
  return fail<T>(ErrorCode::Quarantined, retried.error().to_string() + " (after re-prompt)");
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << line << '\n';
}

// drops a trailing partial line left behind by a killed writer
void heal_jsonl_tail(const std::filesystem::path& path) {
  std::error_code ec;
  auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (content.empty() || content.back() == '\n') return;
  size_t last = content.find_last_of('\n');
  std::filesystem::resize_file(path, last == std::string::npos ? 0 : last + 1, ec);
  if (!ec) log_warn("dropped partial trailing line in " + path.string());
}

std::unordered_set<std::string> ids_in_output(const std::filesystem::path& path) {
  std::unordered_set<std::string> ids;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    if (j.contains("instruction") && j["instruction"].contains("id")) {
      ids.insert(j["instruction"]["id"].get<std::string>());
    }
  }
  return ids;
}

}  // namespace

const char* pipeline_stage_name(PipelineStage stage) {
  switch (stage) {
    case PipelineStage::Dedup: return "dedup";
    case PipelineStage::Filter: return "filter";
    case PipelineStage::Checklist: return "checklist";
    case PipelineStage::Length: return "length";
    case PipelineStage::Done: return "done";
  }
  return "dedup";
}

PipelineCheckpoint PipelineCheckpoint::load(const std::filesystem::path& path) {
  PipelineCheckpoint ckpt;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "#stage done") ckpt.stage = PipelineStage::Done;
      continue;
    }
    size_t tab = line.find('\t');
    ckpt.processed_ids.insert(line.substr(0, tab));
  }
  return ckpt;
}

std::string normalized_text_key(const std::string& text) {
  std::string out;
  bool in_space = true;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      in_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<RawInstruction> dedup(const std::vector<RawInstruction>& records) {
  std::vector<RawInstruction> out;
  Deduper deduper;
  for (const auto& record : records) {
    if (deduper.admit(record.text)) out.push_back(record);
  }
  return out;
}

Script detect_script(const std::string& text) {
  long long cjk = count_length(text, Script::Cjk).count;
  if (cjk == 0) return Script::Latin;
  long long words = count_length(text, Script::Latin).count;
  return cjk > words ? Script::Cjk : Script::Mixed;
}

Result<RawInstruction> extract_raw(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return fail<RawInstruction>(ErrorCode::Parse, "line is not a JSON object");
  }
  RawInstruction raw;
  if (j.contains("id") && j["id"].is_string()) raw.id = j["id"].get<std::string>();
  if (j.contains("text") && j["text"].is_string()) {
    raw.text = j["text"].get<std::string>();
    return raw;
  }
  // conversation-dump adapter: first user turn is the instruction
  const char* conv_keys[] = {"conversations", "conversation"};
  for (const char* key : conv_keys) {
    if (!j.contains(key) || !j[key].is_array()) continue;
    for (const auto& turn : j[key]) {
      if (!turn.is_object()) continue;
      std::string role = turn.value("role", turn.value("from", ""));
      if (role != "user" && role != "human") continue;
      std::string content = turn.value("content", turn.value("value", ""));
      if (content.empty()) continue;
      raw.text = content;
      return raw;
    }
    return fail<RawInstruction>(ErrorCode::Parse, "conversation has no user turn");
  }
  return fail<RawInstruction>(ErrorCode::Parse, "no 'text' or conversation field");
}

Result<FilterDecision> filter_longform(const Instruction& instruction, CachedBackend& backend,
                                       const PipelineConfig& config) {
  auto prompt = render(TemplateId::Filter, {{"QUERY", instruction.text}});
  auto answer = complete_and_parse<FilterAnswer>(
      backend, make_request(config, std::move(prompt)),
      [](const std::string& text) { return parse_filter_answer(text); });
  if (!answer.ok()) return Result<FilterDecision>(answer.error());
  switch (answer.value()) {
    case FilterAnswer::Yes: return FilterDecision::Keep;
    case FilterAnswer::No: return FilterDecision::Drop;
    case FilterAnswer::Maybe: return FilterDecision::Maybe;
  }
  return FilterDecision::Drop;
}

Result<Checklist> build_checklist(const Instruction& instruction, CachedBackend& backend,
                                  const PipelineConfig& config) {
  auto prompt = render(TemplateId::ChecklistGen, {{"INSTRUCTION", instruction.text}});
  return complete_and_parse<Checklist>(
      backend, make_request(config, std::move(prompt)), [](const std::string& text) {
        auto parsed = parse_checklist(text);
        if (!parsed.ok()) return parsed;
        int n = parsed.value().size();
        if (n < 2 || n > 8) {
          return fail<Checklist>(ErrorCode::Parse,
                                 "checklist size " + std::to_string(n) + " outside 2..8");
        }
        return parsed;
      });
}

Result<LengthSpec> assign_length(const Instruction& instruction, const Checklist& checklist,
                                 CachedBackend& backend, const PipelineConfig& config) {
  auto prompt = render(TemplateId::LengthReq, {{"INSTRUCTION", instruction.text},
                                               {"CHECKLIST", checklist_slot_text(checklist)}});
  auto spec = complete_and_parse<LengthSpec>(
      backend, make_request(config, std::move(prompt)),
      [](const std::string& text) { return parse_length_range(text); });
  if (spec.ok() && (spec.value().lower % 100 != 0 || spec.value().upper % 100 != 0)) {
    log_warn("length bounds [" + std::to_string(spec.value().lower) + ", " +
             std::to_string(spec.value().upper) + "] are not multiples of 100 (id " +
             instruction.id + ")");
  }
  return spec;
}

Result<ScoreOutcome> score_rollouts(const DatasetRecord& record,
                                    const std::vector<Rollout>& rollouts,
                                    CachedBackend& backend, const RewardConfig& reward_config,
                                    const GrpoConfig& grpo_config,
                                    const PipelineConfig& config) {
  if (rollouts.empty()) throw UsageError("score_rollouts: no rollouts");
  const int n_constraints = record.checklist.size();
  if (n_constraints < 1) throw UsageError("score_rollouts: record has an empty checklist");

  auto target = resolve_target(record.length_spec, reward_config.target_policy);
  if (!target.ok()) return Result<ScoreOutcome>(target.error());

  const std::string checklist_text = checklist_slot_text(record.checklist);

  auto score_one = [&](const Rollout& rollout) -> Result<RolloutScore> {
    RolloutScore score;
    auto measured = count_length(rollout.text, record.instruction.script);
    score.breakdown.length_count = measured.count;
    score.breakdown.length_reward = length_reward(measured.count, target.value(),
                                                  reward_config.delta, reward_config.alpha);

    auto prompt = render(TemplateId::Verify, {{"INSTRUCTION", record.instruction.text},
                                              {"RESPONSE", rollout.text},
                                              {"CHECKLIST", checklist_text}});
    auto request = make_request(config, std::move(prompt));
    const std::string key = request_key(request);

    auto completion = backend.cached_complete(request, key);
    if (!completion.ok()) return Result<RolloutScore>(completion.error());
    score.verify_from_cache = completion.value().from_cache;
    auto verdicts = parse_verdicts(completion.value().text, n_constraints);
    if (!verdicts.ok() && !backend_level(verdicts.error().code)) {
      completion = backend.refresh(request, key);
      if (!completion.ok()) return Result<RolloutScore>(completion.error());
      score.verify_from_cache = false;
      verdicts = parse_verdicts(completion.value().text, n_constraints);
    }
    if (verdicts.ok()) {
      score.verdicts = verdicts.value();
    } else if (reward_config.parse_failure_policy == ParseFailurePolicy::ZeroOnRetryFailure) {
      log_warn("verdict parse failed twice for record " + record.instruction.id +
               "; scoring constraints 0 (" + verdicts.error().to_string() + ")");
      score.verify_failed = true;
      for (int i = 1; i <= n_constraints; ++i) {
        score.verdicts.push_back(make_verdict(i, VerdictLevel::NotMet));
      }
    } else {
      return Result<RolloutScore>(verdicts.error());
    }

    score.breakdown.constraint_reward = constraint_reward(score.verdicts);
    score.breakdown.overall =
        overall_reward(score.breakdown.length_reward, score.breakdown.constraint_reward);
    return score;
  };

  // parallel fan-out; the backend semaphore bounds in-flight completions
  std::vector<std::future<Result<RolloutScore>>> futures;
  futures.reserve(rollouts.size());
  for (const auto& rollout : rollouts) {
    futures.push_back(std::async(std::launch::async, score_one, std::cref(rollout)));
  }

  ScoreOutcome outcome;
  outcome.per_rollout.reserve(rollouts.size());
  std::optional<Error> first_error;
  for (auto& future : futures) {
    auto result = future.get();
    if (!result.ok()) {
      if (!first_error) first_error = result.error();
      continue;
    }
    outcome.per_rollout.push_back(std::move(result).value());
  }
  if (first_error) return Result<ScoreOutcome>(*first_error);

  if (rollouts.size() >= 2) {
    std::vector<double> overall;
    overall.reserve(outcome.per_rollout.size());
    for (const auto& score : outcome.per_rollout) overall.push_back(score.breakdown.overall);
    outcome.group = group_advantages(overall, grpo_config.std_floor);
  }
  return outcome;
}

DatasetStats dataset_stats(const std::filesystem::path& path, TargetPolicy policy) {
  DatasetStats stats;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    stats.unreadable_lines = 0;
    return stats;
  }
  double constraint_sum = 0.0;
  double length_sum = 0.0;
  long long length_count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      ++stats.unreadable_lines;
      continue;
    }
    DatasetRecord record;
    try {
      record = j.get<DatasetRecord>();
    } catch (const json::exception&) {
      ++stats.unreadable_lines;
      continue;
    }
    if (!validate_record(record).ok()) {
      ++stats.invalid_records;
      continue;
    }
    ++stats.total_instructions;
    constraint_sum += record.checklist.size();
    auto target = resolve_target(record.length_spec, policy);
    if (target.ok()) {
      length_sum += static_cast<double>(target.value());
      ++length_count;
    }
  }
  if (stats.total_instructions > 0) {
    stats.avg_constraints = constraint_sum / static_cast<double>(stats.total_instructions);
  }
  if (length_count > 0) {
    stats.avg_required_length = length_sum / static_cast<double>(length_count);
  }
  return stats;
}

Result<PrepareSummary> run_prepare(const std::filesystem::path& input,
                                   const std::filesystem::path& output,
                                   CachedBackend& backend, const PipelineConfig& config) {
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    return fail<PrepareSummary>(ErrorCode::Io, "cannot read input " + input.string());
  }

  const auto ckpt_path = std::filesystem::path(output.string() + ".ckpt");
  const auto quarantine_path = std::filesystem::path(output.string() + ".quarantine.jsonl");

  PipelineCheckpoint ckpt;
  bool resuming = std::filesystem::exists(ckpt_path);
  if (resuming) {
    ckpt = PipelineCheckpoint::load(ckpt_path);
    if (std::filesystem::exists(output)) {
      heal_jsonl_tail(output);
      // records visible in the output count as processed even if their
      // checkpoint append was lost mid-kill
      for (auto& id : ids_in_output(output)) ckpt.processed_ids.insert(std::move(id));
    }
  } else {
    std::error_code ec;
    std::filesystem::remove(output, ec);
    std::filesystem::remove(quarantine_path, ec);
  }

  std::ofstream out(output, std::ios::app | std::ios::binary);
  if (!out) {
    return fail<PrepareSummary>(ErrorCode::Io, "cannot write output " + output.string());
  }

  PrepareSummary summary;
  Deduper deduper;

  auto quarantine = [&](const std::string& id, const char* stage, const std::string& reason) {
    json entry = {{"id", id}, {"stage", stage}, {"reason", reason}};
    append_line(quarantine_path, entry.dump());
    append_line(ckpt_path, id + "\tquarantined:" + stage);
  };

  struct WorkItem {
    Instruction instruction;
  };
  struct WorkResult {
    Instruction instruction;
    Result<DatasetRecord> record;  // error carries stage in http_status-free code
    std::string stage;             // stage that failed, when record is an error
    FilterDecision decision = FilterDecision::Keep;
    bool was_maybe = false;
  };

  auto process = [&](const Instruction& instruction) -> WorkResult {
    WorkResult result{instruction, fail<DatasetRecord>(ErrorCode::Quarantined, ""), "", {}, false};

    auto decision = filter_longform(instruction, backend, config);
    if (!decision.ok()) {
      result.record = Result<DatasetRecord>(decision.error());
      result.stage = "filter";
      return result;
    }
    result.was_maybe = decision.value() == FilterDecision::Maybe;
    result.decision = decision.value();
    bool keep = decision.value() == FilterDecision::Keep ||
                (result.was_maybe && config.keep_maybe);
    if (!keep) {
      result.stage = "filtered";
      return result;
    }

    auto checklist = build_checklist(instruction, backend, config);
    if (!checklist.ok()) {
      result.record = Result<DatasetRecord>(checklist.error());
      result.stage = "checklist";
      return result;
    }

    auto spec = assign_length(instruction, checklist.value(), backend, config);
    if (!spec.ok()) {
      result.record = Result<DatasetRecord>(spec.error());
      result.stage = "length";
      return result;
    }

    DatasetRecord record;
    record.instruction = instruction;
    record.checklist = checklist.value();
    record.length_spec = spec.value();
    record.meta = RecordMeta{config.source, config.pipeline_version, config.created_at};
    result.record = Result<DatasetRecord>(std::move(record));
    result.stage = "written";
    return result;
  };

  auto commit = [&](const WorkResult& result) -> std::optional<Error> {
    const std::string& id = result.instruction.id;
    if (result.stage == "filtered") {
      if (result.was_maybe) {
        ++summary.dropped_maybe;
        append_line(ckpt_path, id + "\tdropped:maybe");
      } else {
        ++summary.dropped_filter;
        append_line(ckpt_path, id + "\tdropped:filter");
      }
      return std::nullopt;
    }
    if (!result.record.ok()) {
      const Error& error = result.record.error();
      if (backend_level(error.code)) return error;  // abort, checkpoint intact
      if (config.strict) return error;
      if (result.stage == "filter") ++summary.quarantined_filter;
      if (result.stage == "checklist") ++summary.quarantined_checklist;
      if (result.stage == "length") ++summary.quarantined_length;
      quarantine(id, result.stage.c_str(), error.message);
      return std::nullopt;
    }
    if (result.was_maybe) ++summary.kept_maybe;
    json j = result.record.value();
    out << j.dump() << '\n';
    out.flush();
    append_line(ckpt_path, id + "\twritten");
    ++summary.written;
    return std::nullopt;
  };

  std::vector<Instruction> batch;
  std::string line;
  long long line_number = 0;
  bool eof = false;
  while (!eof) {
    batch.clear();
    while (static_cast<int>(batch.size()) < std::max(1, config.max_parallel)) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      ++line_number;
      if (line.empty()) continue;
      ++summary.lines_read;

      auto raw = extract_raw(line);
      if (!raw.ok()) {
        ++summary.unreadable;
        quarantine("line-" + std::to_string(line_number), "input", raw.error().message);
        continue;
      }
      if (!deduper.admit(raw.value().text)) {
        ++summary.duplicates;
        continue;
      }
      std::string id = raw.value().id.empty()
                           ? content_digest(normalized_text_key(raw.value().text)).substr(0, 16)
                           : raw.value().id;
      if (ckpt.processed_ids.count(id)) {
        ++summary.skipped_checkpoint;
        continue;
      }
      Instruction instruction{id, raw.value().text, detect_script(raw.value().text)};
      batch.push_back(std::move(instruction));
    }

    if (batch.empty()) continue;
    std::vector<std::future<WorkResult>> futures;
    futures.reserve(batch.size());
    for (const auto& instruction : batch) {
      futures.push_back(std::async(std::launch::async, process, std::cref(instruction)));
    }
    for (auto& future : futures) {
      WorkResult result = future.get();
      if (auto error = commit(result)) {
        return Result<PrepareSummary>(*error);
      }
    }
  }

  append_line(ckpt_path, "#stage done");
  return summary;
}

}  // namespace ace
