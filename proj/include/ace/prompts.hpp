#pragma once

#include <map>
#include <string>
#include <vector>

#include "ace/core.hpp"

namespace ace {

enum class TemplateId { Filter, ChecklistGen, LengthReq, Verify };

struct RenderedPrompt {
  TemplateId template_id = TemplateId::Filter;
  std::string version;
  std::string text;
};

// Raw template body with {NAME} slot markers, exactly as shipped.
const std::string& template_text(TemplateId id);

// Frozen version string; part of every completion cache key.
const std::string& template_version(TemplateId id);

const char* template_name(TemplateId id);
Result<TemplateId> template_from_name(const std::string& name);

// Slot names a template requires, in order of appearance.
const std::vector<std::string>& required_slots(TemplateId id);

// Replaces each {NAME} marker with its slot value byte-for-byte. Values are
// never re-scanned, so marker-looking text inside a value passes through
// literally. Missing or extra slots throw UsageError naming the slot.
RenderedPrompt render(TemplateId id, const std::map<std::string, std::string>& slots);

// Serializes checklist items one per line as "Question i: <question>" — the
// same shape the checklist generator emits, so downstream prompts see what
// the generator produced.
std::string checklist_slot_text(const Checklist& checklist);

}  // namespace ace
