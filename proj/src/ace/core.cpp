#include "ace/core.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>

namespace ace {

namespace {

bool is_blank(const std::string& s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

void sha256_update_with_length(EVP_MD_CTX* ctx, const std::string& part) {
  // 8-byte big-endian length prefix removes concatenation ambiguity
  uint64_t n = part.size();
  unsigned char prefix[8];
  for (int i = 7; i >= 0; --i) {
    prefix[i] = static_cast<unsigned char>(n & 0xff);
    n >>= 8;
  }
  EVP_DigestUpdate(ctx, prefix, sizeof(prefix));
  EVP_DigestUpdate(ctx, part.data(), part.size());
}

std::string hex_digest(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  static const char* hexchars = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hexchars[digest[i] >> 4]);
    out.push_back(hexchars[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

ValidationResult validate_record(const DatasetRecord& record) {
  ValidationResult result;
  const bool pipeline_produced = !record.meta.pipeline_version.empty();

  if (record.instruction.id.empty()) {
    result.errors.push_back({"instruction.id", "id is empty"});
  }
  if (is_blank(record.instruction.text)) {
    result.errors.push_back({"instruction.text", "text empty after whitespace trim"});
  }

  const auto& items = record.checklist.items;
  if (items.empty()) {
    result.errors.push_back({"checklist.items", "checklist has no items"});
  }
  for (size_t i = 0; i < items.size(); ++i) {
    if (is_blank(items[i].question)) {
      result.errors.push_back({"checklist.items[" + std::to_string(i) + "].question",
                               "question is empty"});
    }
    if (items[i].index != static_cast<int>(i) + 1) {
      result.errors.push_back({"checklist.items[" + std::to_string(i) + "].index",
                               "index " + std::to_string(items[i].index) +
                                   " breaks contiguous 1-based numbering"});
    }
  }
  if (pipeline_produced && (items.size() < 2 || items.size() > 8)) {
    result.errors.push_back({"checklist.items",
                             "checklist size outside 2..8 (got " +
                                 std::to_string(items.size()) + ")"});
  }

  const LengthSpec& spec = record.length_spec;
  if (spec.lower < 0) {
    result.errors.push_back({"length_spec.lower", "lower < 0"});
  }
  if (spec.lower > spec.upper) {
    result.errors.push_back({"length_spec", "lower > upper"});
  }
  if (spec.upper > 10000) {
    result.errors.push_back({"length_spec.upper", "upper > 10000"});
  }
  if (spec.upper - spec.lower > 2000) {
    result.errors.push_back({"length_spec", "span " + std::to_string(spec.upper - spec.lower) +
                                                " exceeds 2000"});
  }
  if (pipeline_produced && (spec.lower % 100 != 0 || spec.upper % 100 != 0)) {
    result.warnings.push_back({"length_spec", "bounds are not multiples of 100"});
  }

  return result;
}

std::string cache_key(const std::string& template_version,
                      const std::string& model_id,
                      const std::vector<std::string>& parts) {
  if (parts.empty()) throw UsageError("cache_key: parts must be nonempty");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  sha256_update_with_length(ctx, template_version);
  sha256_update_with_length(ctx, model_id);
  for (const auto& part : parts) {
    sha256_update_with_length(ctx, part);
  }
  std::string out = hex_digest(ctx);
  EVP_MD_CTX_free(ctx);
  return out;
}

std::string content_digest(const std::string& text) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, text.data(), text.size());
  std::string out = hex_digest(ctx);
  EVP_MD_CTX_free(ctx);
  return out;
}

const char* script_name(Script script) {
  switch (script) {
    case Script::Latin: return "latin";
    case Script::Cjk: return "cjk";
    case Script::Mixed: return "mixed";
  }
  return "latin";
}

Result<Script> script_from_name(const std::string& name) {
  if (name == "latin") return Script::Latin;
  if (name == "cjk") return Script::Cjk;
  if (name == "mixed") return Script::Mixed;
  return fail<Script>(ErrorCode::Parse, "unknown script: " + name);
}

const char* verdict_level_name(VerdictLevel level) {
  switch (level) {
    case VerdictLevel::FullyMet: return "fully_met";
    case VerdictLevel::PartiallyMet: return "partially_met";
    case VerdictLevel::NotMet: return "not_met";
  }
  return "not_met";
}

Result<VerdictLevel> verdict_level_from_name(const std::string& name) {
  if (name == "fully_met") return VerdictLevel::FullyMet;
  if (name == "partially_met") return VerdictLevel::PartiallyMet;
  if (name == "not_met") return VerdictLevel::NotMet;
  return fail<VerdictLevel>(ErrorCode::Parse, "unknown verdict level: " + name);
}

const char* target_policy_name(TargetPolicy policy) {
  switch (policy) {
    case TargetPolicy::Midpoint: return "midpoint";
    case TargetPolicy::Lower: return "lower";
    case TargetPolicy::Upper: return "upper";
  }
  return "midpoint";
}

Result<TargetPolicy> target_policy_from_name(const std::string& name) {
  if (name == "midpoint") return TargetPolicy::Midpoint;
  if (name == "lower") return TargetPolicy::Lower;
  if (name == "upper") return TargetPolicy::Upper;
  return fail<TargetPolicy>(ErrorCode::Parse, "unknown target policy: " + name);
}

const char* parse_failure_policy_name(ParseFailurePolicy policy) {
  switch (policy) {
    case ParseFailurePolicy::Strict: return "strict";
    case ParseFailurePolicy::ZeroOnRetryFailure: return "zero_on_retry_failure";
  }
  return "strict";
}

Result<ParseFailurePolicy> parse_failure_policy_from_name(const std::string& name) {
  if (name == "strict") return ParseFailurePolicy::Strict;
  if (name == "zero_on_retry_failure") return ParseFailurePolicy::ZeroOnRetryFailure;
  return fail<ParseFailurePolicy>(ErrorCode::Parse, "unknown parse failure policy: " + name);
}

void to_json(nlohmann::json& j, const Instruction& v) {
  j = nlohmann::json{{"id", v.id}, {"text", v.text}, {"script", script_name(v.script)}};
}

void from_json(const nlohmann::json& j, Instruction& v) {
  j.at("id").get_to(v.id);
  j.at("text").get_to(v.text);
  std::string script = j.value("script", "latin");
  auto parsed = script_from_name(script);
  if (!parsed.ok()) throw nlohmann::json::other_error::create(501, parsed.error().message, &j);
  v.script = parsed.value();
}

void to_json(nlohmann::json& j, const ConstraintItem& v) {
  j = nlohmann::json{{"index", v.index}, {"question", v.question}};
}

void from_json(const nlohmann::json& j, ConstraintItem& v) {
  j.at("index").get_to(v.index);
  j.at("question").get_to(v.question);
}

void to_json(nlohmann::json& j, const Checklist& v) {
  j = nlohmann::json{{"items", v.items}};
}

void from_json(const nlohmann::json& j, Checklist& v) {
  j.at("items").get_to(v.items);
}

void to_json(nlohmann::json& j, const LengthSpec& v) {
  j = nlohmann::json{{"lower", v.lower}, {"upper", v.upper}};
}

void from_json(const nlohmann::json& j, LengthSpec& v) {
  j.at("lower").get_to(v.lower);
  j.at("upper").get_to(v.upper);
}

void to_json(nlohmann::json& j, const ConstraintVerdict& v) {
  j = nlohmann::json{
      {"index", v.index}, {"level", verdict_level_name(v.level)}, {"score", v.score}};
}

void from_json(const nlohmann::json& j, ConstraintVerdict& v) {
  j.at("index").get_to(v.index);
  std::string level = j.at("level").get<std::string>();
  auto parsed = verdict_level_from_name(level);
  if (!parsed.ok()) throw nlohmann::json::other_error::create(501, parsed.error().message, &j);
  v.level = parsed.value();
  j.at("score").get_to(v.score);
}

void to_json(nlohmann::json& j, const RewardBreakdown& v) {
  j = nlohmann::json{{"length_count", v.length_count},
                     {"length_reward", v.length_reward},
                     {"constraint_reward", v.constraint_reward},
                     {"overall", v.overall}};
}

void from_json(const nlohmann::json& j, RewardBreakdown& v) {
  j.at("length_count").get_to(v.length_count);
  j.at("length_reward").get_to(v.length_reward);
  j.at("constraint_reward").get_to(v.constraint_reward);
  j.at("overall").get_to(v.overall);
}

void to_json(nlohmann::json& j, const GroupScore& v) {
  j = nlohmann::json{{"rewards", v.rewards},
                     {"mean", v.mean},
                     {"std", v.std_dev},
                     {"advantages", v.advantages}};
}

void from_json(const nlohmann::json& j, GroupScore& v) {
  j.at("rewards").get_to(v.rewards);
  j.at("mean").get_to(v.mean);
  j.at("std").get_to(v.std_dev);
  j.at("advantages").get_to(v.advantages);
}

void to_json(nlohmann::json& j, const RecordMeta& v) {
  j = nlohmann::json{{"source", v.source},
                     {"pipeline_version", v.pipeline_version},
                     {"created_at", v.created_at}};
}

void from_json(const nlohmann::json& j, RecordMeta& v) {
  v.source = j.value("source", "");
  v.pipeline_version = j.value("pipeline_version", "");
  v.created_at = j.value("created_at", "");
}

void to_json(nlohmann::json& j, const DatasetRecord& v) {
  j = nlohmann::json{{"instruction", v.instruction},
                     {"checklist", v.checklist},
                     {"length_spec", v.length_spec},
                     {"meta", v.meta}};
}

void from_json(const nlohmann::json& j, DatasetRecord& v) {
  j.at("instruction").get_to(v.instruction);
  j.at("checklist").get_to(v.checklist);
  j.at("length_spec").get_to(v.length_spec);
  if (j.contains("meta")) j.at("meta").get_to(v.meta);
}

}  // namespace ace
