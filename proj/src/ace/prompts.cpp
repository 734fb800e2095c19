#include "ace/prompts.hpp"

#include <algorithm>

namespace ace {

namespace {

const std::string kFilterTemplate = R"TMPL(# Objective
You are an AI assistant tasked with analyzing user queries to predict the length of the generated response. Your goal is to determine if a query is likely to require a long-form answer.

# Response Categories
- Yes: The response is highly likely to exceed 2000 words.
- Maybe: The response is likely to be on the borderline, or it is difficult to determine with high confidence.
- No: The response is unlikely to exceed 2000 words.

# Evaluation Criteria
Analyze the Query below based on these five factors:
1. Completeness of Instruction: Does the query provide all necessary information for a meaningful response?
Yes Example: "Write a practical report on the causes of environmental pollution."
No Example: "Read and analyze this paper." (Insufficient context provided)

2. Depth & Complexity: Does the query require in-depth explanations, nuanced analysis, or discussion of complex, multi-faceted topics?
Yes Example: "Provide a detailed analysis of the socio-economic impacts of the Industrial Revolution, including long-term consequences."
No Example: "Who was the first president of the United States?"

3. Scope & Breadth: Does the query cover a broad field, multiple distinct sub-topics, or require a comparison of various perspectives?
Yes Example: "Write a comprehensive history of ancient Greece, covering its philosophy, art, politics, and warfare."
No Example: "What are the key differences between a Roth IRA and a traditional IRA?"

4. Structural Needs: Would a comprehensive answer necessitate a formal structure with multiple distinct sections (e.g., introduction, background, analysis, conclusion, bibliography)?
Yes Example: "Draft a research paper on the efficacy of renewable energy sources in combating climate change."
No Example: "Explain how photosynthesis works in simple terms."

5. Research & Synthesis: Does the query imply the need to gather, synthesize, and cite information from multiple external sources?
Yes Example: "Compile a literature review on the current state of CRISPR-Cas9 gene-editing technology, including recent breakthroughs and ethical considerations."
No Example: "Summarize the plot of the movie 'Inception'."

# Output Requirements:
Analysis: Provide a concise, point-by-point justification for your decision by evaluating the Query against each of the four factors listed above.
Decision: Conclude with a definitive answer from the Response Categories, enclosed in <Answer> and </Answer> tags:
<Answer>Yes</Answer>
<Answer>Maybe</Answer>
<Answer>No</Answer>

Query:
{QUERY})TMPL";

const std::string kChecklistGenTemplate = R"TMPL(You are tasked with creating an evaluation checklist. This checklist will be used to assess an AI assistant's response to a specific INSTRUCTION. Your goal is to generate a series of questions that determine if the AI's response has met the criteria outlined in the INSTRUCTION, as well as general quality standards.

# Task Details
Analyze the INSTRUCTION:
Carefully review the provided INSTRUCTION that the AI assistant was meant to follow. If the INSTRUCTION is broad or lacks specific details, your analysis should identify common implicit expectations and potential areas where a high-quality response would add value beyond the literal instruction.

Develop Checklist Questions:
Based on your analysis, create a list of questions. These questions will form the evaluation checklist. The checklist should assess whether the AI's response meets criteria that are explicitly stated in the INSTRUCTION. Crucially, for broad INSTRUCTIONS, the checklist should also assess criteria that are implicitly relevant, generally sensible, or represent a valuable and comprehensive approach to the problem domain of the INSTRUCTION, even if not explicitly requested by the user. Strive for conciseness; only include questions that are clearly relevant and necessary for evaluation.

# Guidelines for Checklist Questions
Each question in your checklist must:
1. Be answerable with a three-level rating. The answer should indicate the degree to which the AI's response successfully met the specific criterion being assessed. Recommended ratings are:
- Fully Met: AI response completely and excellently satisfies the criterion.
- Partially Met: AI response partially satisfies the criterion, with noticeable strengths but also significant areas for improvement.
- Not Met: AI response completely fails to satisfy the criterion.
2. Be comprehensive yet concise. Ensure all critical aspects of the INSTRUCTION are covered, but avoid redundancy or overly granular questions. Aim for a balance that captures essential evaluation points efficiently. Typically, a checklist should contain between two and eight questions.
3. Be precise and unambiguous. Questions should use clear language. Where appropriate, directly reference or paraphrase phrasing from the INSTRUCTION to ensure clarity on what is being evaluated. For broad INSTRUCTIONS, articulate clear and valuable criteria that an excellent AI response would naturally include, even if not explicitly stated by the user. Avoid vague terms.
4. Focus on a single aspect. Each question should ideally evaluate one specific element of the response.

# Response Format
Your output must strictly follow this format:
Analysis: Provide a brief analysis of the INSTRUCTION here. This analysis should identify the key requirements and implicit expectations of the INSTRUCTION that will inform your checklist questions.
<Checklist>
Question 1: Phrased for a three-level rating.
Question 2: Phrased for a three-level rating.
And so on...
</Checklist>

INSTRUCTION:
{INSTRUCTION})TMPL";

const std::string kLengthReqTemplate = R"TMPL(You are an expert AI performance analyst. Your task is to predict the optimal and acceptable length range for an AI's response to a given user INSTRUCTION, considering the detailed requirements outlined in its corresponding EVALUATION CHECKLIST. Your prediction should guide an AI to generate a response that is comprehensive without being verbose, and concise without omitting essential details.

# Task Details
Analyze the INSTRUCTION and the EVALUATION CHECKLIST:
1. First, examine the INSTRUCTION to determine if it already contains an explicit number of length (e.g., "in 500 words,"). This is your first point of analysis.
2. Carefully review the user INSTRUCTION to grasp its core request, scope, and any initial implied complexity.
3. Thoroughly examine each question in the EVALUATION CHECKLIST. Understand that each "Fully Met" criterion in the checklist represents a specific piece of information, level of detail, or structural element that the AI's response must contain to be considered high-quality. These criteria directly influence the necessary content volume.
4. Identify the cumulative informational burden: Consider how many distinct points, examples, explanations, or structured elements the AI needs to generate to satisfy all "Fully Met" criteria across the checklist. This assessment is crucial for predicting length.

# Predict Optimal Length
1. Determine the Acceptable Length Range: This broader range defines the minimum and maximum count within which the AI's response would still be considered a high-quality, effective, and complete answer, even if not absolutely perfect. Responses outside this range are likely to be either incomplete or unnecessarily verbose. If the instruction specifies a length, your prediction should reflect that.
2. For English INSTRUCTIONS, predict length in words. For Chinese INSTRUCTIONS, predict length in characters.
3. The minimum possible word/character count is 0. The maximum possible word/character count is 10000. All predicted upper and lower bounds must be multiples of 100. The difference between the upper and lower bounds for any given range must not exceed 2000 words/characters.

# Response Format
Your output must strictly follow this format:
Analysis: Briefly explain how the complexity of the INSTRUCTION and the specific requirements outlined in the EVALUATION CHECKLIST inform your length predictions. Highlight which checklist items are the primary drivers of response length.
<LENGTH>
[length lower bound, length upper bound]
</LENGTH>

INSTRUCTION:
{INSTRUCTION}

EVALUATION CHECKLIST:
{CHECKLIST})TMPL";

const std::string kVerifyTemplate = R"TMPL(You are a meticulous AI Quality Analyst. Your role is to evaluate an AI-generated RESPONSE based on its adherence to a given INSTRUCTION. The evaluation must be performed against a CHECKLIST of criteria.

# Provided Information
INSTRUCTION: The original request given to the AI.
{INSTRUCTION}

RESPONSE: The AI's generated output that you must evaluate.
{RESPONSE}

CHECKLIST: The list of criteria the RESPONSE must satisfy.
{CHECKLIST}

# Task & Instructions
For each question in the CHECKLIST, you must perform the following steps:
1. Provide a concise analysis of how the RESPONSE performs against each question in the CHECKLIST.
2. Your analysis must justify your final verdict by referencing specific parts of the RESPONSE and the INSTRUCTION.
3. Conclude with a three-level rating based on the following scale:
- Fully Met: AI response completely and excellently satisfies the criterion.
- Partially Met: AI response partially satisfies the criterion, with noticeable strengths but also significant areas for improvement.
- Not Met: AI response completely fails to satisfy the criterion.

# Response Format
Your response must strictly adhere to the following format, without any introductory or concluding remarks.
Question 1: [Insert the first question from the CHECKLIST here]
[Your detailed analysis of the RESPONSE against the first criterion, including specific references or quotes to justify your conclusion.]
<Answer>
[Your three-level rating here (Fully Met, Partially Met, or Not Met)]
</Answer>

Question 2: [Insert the first question from the CHECKLIST here]
[Your detailed analysis of the RESPONSE against the first criterion, including specific references or quotes to justify your conclusion.]
<Answer>
[Your three-level rating here (Fully Met, Partially Met, or Not Met)]
</Answer>

...and so on for all questions in the CHECKLIST.)TMPL";

const std::vector<std::string> kFilterSlots = {"QUERY"};
const std::vector<std::string> kChecklistGenSlots = {"INSTRUCTION"};
const std::vector<std::string> kLengthReqSlots = {"INSTRUCTION", "CHECKLIST"};
const std::vector<std::string> kVerifySlots = {"INSTRUCTION", "RESPONSE", "CHECKLIST"};

}  // namespace

const std::string& template_text(TemplateId id) {
  switch (id) {
    case TemplateId::Filter: return kFilterTemplate;
    case TemplateId::ChecklistGen: return kChecklistGenTemplate;
    case TemplateId::LengthReq: return kLengthReqTemplate;
    case TemplateId::Verify: return kVerifyTemplate;
  }
  return kFilterTemplate;
}

const std::string& template_version(TemplateId id) {
  static const std::string filter = "filter/v1";
  static const std::string checklist = "checklist-gen/v1";
  static const std::string length = "length-req/v1";
  static const std::string verify = "verify/v1";
  switch (id) {
    case TemplateId::Filter: return filter;
    case TemplateId::ChecklistGen: return checklist;
    case TemplateId::LengthReq: return length;
    case TemplateId::Verify: return verify;
  }
  return filter;
}

const char* template_name(TemplateId id) {
  switch (id) {
    case TemplateId::Filter: return "filter";
    case TemplateId::ChecklistGen: return "checklist";
    case TemplateId::LengthReq: return "length";
    case TemplateId::Verify: return "verify";
  }
  return "filter";
}

Result<TemplateId> template_from_name(const std::string& name) {
  if (name == "filter") return TemplateId::Filter;
  if (name == "checklist") return TemplateId::ChecklistGen;
  if (name == "length") return TemplateId::LengthReq;
  if (name == "verify") return TemplateId::Verify;
  return fail<TemplateId>(ErrorCode::Parse, "unknown template: " + name);
}

const std::vector<std::string>& required_slots(TemplateId id) {
  switch (id) {
    case TemplateId::Filter: return kFilterSlots;
    case TemplateId::ChecklistGen: return kChecklistGenSlots;
    case TemplateId::LengthReq: return kLengthReqSlots;
    case TemplateId::Verify: return kVerifySlots;
  }
  return kFilterSlots;
}

RenderedPrompt render(TemplateId id, const std::map<std::string, std::string>& slots) {
  const auto& required = required_slots(id);
  for (const auto& name : required) {
    if (slots.find(name) == slots.end()) {
      throw UsageError(std::string("render: missing slot ") + name + " for template " +
                       template_name(id));
    }
  }
  for (const auto& [name, _] : slots) {
    if (std::find(required.begin(), required.end(), name) == required.end()) {
      throw UsageError(std::string("render: extra slot ") + name + " for template " +
                       template_name(id));
    }
  }

  // One left-to-right pass over the template; substituted values are emitted
  // verbatim and never re-scanned.
  const std::string& body = template_text(id);
  std::string out;
  out.reserve(body.size() + 256);
  size_t pos = 0;
  while (pos < body.size()) {
    size_t open = body.find('{', pos);
    if (open == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    size_t close = body.find('}', open + 1);
    if (close == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    std::string name = body.substr(open + 1, close - open - 1);
    auto it = slots.find(name);
    if (it != slots.end()) {
      out.append(body, pos, open - pos);
      out.append(it->second);
      pos = close + 1;
    } else {
      out.append(body, pos, open + 1 - pos);
      pos = open + 1;
    }
  }
  return RenderedPrompt{id, template_version(id), std::move(out)};
}

std::string checklist_slot_text(const Checklist& checklist) {
  std::string out;
  for (size_t i = 0; i < checklist.items.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += "Question " + std::to_string(i + 1) + ": " + checklist.items[i].question;
  }
  return out;
}

}  // namespace ace
