#include "ace/parsers.hpp"

#include <cctype>

#include "ace/rewards.hpp"

namespace ace {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// case-insensitive find
size_t ifind(const std::string& haystack, const std::string& needle, size_t from) {
  if (needle.empty() || haystack.size() < needle.size()) return std::string::npos;
  for (size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    size_t j = 0;
    while (j < needle.size() && lower(haystack[i + j]) == lower(needle[j])) ++j;
    if (j == needle.size()) return i;
  }
  return std::string::npos;
}

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// trim + collapse interior whitespace runs to a single space
std::string normalize_ws(const std::string& s) {
  std::string out;
  bool in_space = true;  // leading whitespace dropped
  for (char c : s) {
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

bool iequals(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

// contents of every well-formed <Answer>...</Answer> pair, in order
std::vector<std::string> answer_blocks(const std::string& text) {
  static const std::string open = "<answer>";
  static const std::string close = "</answer>";
  std::vector<std::string> blocks;
  size_t pos = 0;
  while (true) {
    size_t o = ifind(text, open, pos);
    if (o == std::string::npos) break;
    size_t c = ifind(text, close, o + open.size());
    if (c == std::string::npos) break;
    blocks.push_back(text.substr(o + open.size(), c - o - open.size()));
    pos = c + close.size();
  }
  return blocks;
}

std::string first_n(const std::string& s, size_t n) {
  return s.size() <= n ? s : s.substr(0, n);
}

}  // namespace

const char* filter_answer_name(FilterAnswer answer) {
  switch (answer) {
    case FilterAnswer::Yes: return "yes";
    case FilterAnswer::Maybe: return "maybe";
    case FilterAnswer::No: return "no";
  }
  return "no";
}

Result<FilterAnswer> parse_filter_answer(const std::string& text) {
  auto blocks = answer_blocks(text);
  if (blocks.empty()) {
    return fail<FilterAnswer>(ErrorCode::Parse, "no well-formed <Answer> block found");
  }
  std::string label = trim(blocks.back());
  if (iequals(label, "yes")) return FilterAnswer::Yes;
  if (iequals(label, "maybe")) return FilterAnswer::Maybe;
  if (iequals(label, "no")) return FilterAnswer::No;
  return fail<FilterAnswer>(ErrorCode::Parse,
                            "label '" + first_n(label, 80) + "' is not Yes/Maybe/No");
}

Result<Checklist> parse_checklist(const std::string& text) {
  static const std::string open = "<checklist>";
  static const std::string close = "</checklist>";
  size_t o = ifind(text, open, 0);
  if (o == std::string::npos) {
    return fail<Checklist>(ErrorCode::Parse, "missing <Checklist> region");
  }
  size_t c = ifind(text, close, o + open.size());
  if (c == std::string::npos) {
    return fail<Checklist>(ErrorCode::Parse, "missing </Checklist> closing tag");
  }
  std::string region = text.substr(o + open.size(), c - o - open.size());

  Checklist checklist;
  std::vector<long long> source_numbers;
  size_t start = 0;
  while (start <= region.size()) {
    size_t eol = region.find('\n', start);
    std::string line = region.substr(start, eol == std::string::npos ? std::string::npos
                                                                     : eol - start);
    start = eol == std::string::npos ? region.size() + 1 : eol + 1;

    size_t p = 0;
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    static const std::string word = "question";
    if (line.size() - p < word.size()) continue;
    bool is_question = true;
    for (size_t j = 0; j < word.size(); ++j) {
      if (lower(line[p + j]) != word[j]) {
        is_question = false;
        break;
      }
    }
    if (!is_question) continue;
    p += word.size();
    size_t digits_begin = p;
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p == digits_begin) continue;  // "Questionable..." is not a question line
    digits_begin = p;
    while (p < line.size() && std::isdigit(static_cast<unsigned char>(line[p]))) ++p;
    if (p == digits_begin) continue;
    long long number = std::stoll(line.substr(digits_begin, p - digits_begin));
    while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
    if (p >= line.size() || line[p] != ':') continue;
    std::string body = trim(line.substr(p + 1));
    if (body.empty()) continue;
    source_numbers.push_back(number);
    checklist.items.push_back(
        ConstraintItem{static_cast<int>(checklist.items.size()) + 1, body});
  }

  if (checklist.items.empty()) {
    return fail<Checklist>(ErrorCode::Parse, "no 'Question <k>: ...' lines in checklist region");
  }
  for (size_t i = 0; i < source_numbers.size(); ++i) {
    if (source_numbers[i] != static_cast<long long>(i) + 1) {
      log_warn("checklist source numbering not contiguous; items re-indexed 1.." +
               std::to_string(checklist.items.size()));
      break;
    }
  }
  return checklist;
}

Result<LengthSpec> parse_length_range(const std::string& text) {
  static const std::string open = "<length>";
  static const std::string close = "</length>";
  size_t o = ifind(text, open, 0);
  if (o == std::string::npos) {
    return fail<LengthSpec>(ErrorCode::Parse, "missing <LENGTH> region");
  }
  size_t c = ifind(text, close, o + open.size());
  if (c == std::string::npos) {
    return fail<LengthSpec>(ErrorCode::Parse, "missing </LENGTH> closing tag");
  }
  std::string region = text.substr(o + open.size(), c - o - open.size());

  size_t p = region.find('[');
  if (p == std::string::npos) {
    return fail<LengthSpec>(ErrorCode::Parse, "no '[lower, upper]' inside <LENGTH>");
  }
  ++p;
  auto read_int = [&](long long& out) -> bool {
    while (p < region.size() && std::isspace(static_cast<unsigned char>(region[p]))) ++p;
    size_t begin = p;
    while (p < region.size() && std::isdigit(static_cast<unsigned char>(region[p]))) ++p;
    if (p == begin || p - begin > 9) return false;
    out = std::stoll(region.substr(begin, p - begin));
    while (p < region.size() && std::isspace(static_cast<unsigned char>(region[p]))) ++p;
    return true;
  };
  long long lo = 0;
  long long hi = 0;
  if (!read_int(lo) || p >= region.size() || region[p] != ',') {
    return fail<LengthSpec>(ErrorCode::Parse, "malformed length range: " +
                                                  first_n(normalize_ws(region), 80));
  }
  ++p;
  if (!read_int(hi) || p >= region.size() || region[p] != ']') {
    return fail<LengthSpec>(ErrorCode::Parse, "malformed length range: " +
                                                  first_n(normalize_ws(region), 80));
  }

  if (lo > hi) {
    return fail<LengthSpec>(ErrorCode::RangeInvalid,
                            "lower " + std::to_string(lo) + " > upper " + std::to_string(hi));
  }
  if (hi > 10000) {
    return fail<LengthSpec>(ErrorCode::RangeInvalid, "upper " + std::to_string(hi) + " > 10000");
  }
  if (hi - lo > 2000) {
    return fail<LengthSpec>(ErrorCode::RangeInvalid,
                            "span " + std::to_string(hi - lo) + " exceeds 2000");
  }
  return LengthSpec{static_cast<int>(lo), static_cast<int>(hi)};
}

Result<std::vector<ConstraintVerdict>> parse_verdicts(const std::string& text, int expected_n) {
  using R = Result<std::vector<ConstraintVerdict>>;
  if (expected_n < 1) throw UsageError("parse_verdicts: expected_n must be >= 1");

  auto blocks = answer_blocks(text);
  std::vector<ConstraintVerdict> verdicts;
  verdicts.reserve(blocks.size());
  for (const auto& block : blocks) {
    std::string label = normalize_ws(block);
    VerdictLevel level;
    if (iequals(label, "fully met")) {
      level = VerdictLevel::FullyMet;
    } else if (iequals(label, "partially met")) {
      level = VerdictLevel::PartiallyMet;
    } else if (iequals(label, "not met")) {
      level = VerdictLevel::NotMet;
    } else {
      return fail<std::vector<ConstraintVerdict>>(
          ErrorCode::Parse, "rating '" + first_n(label, 80) + "' is not a three-level rating");
    }
    int index = static_cast<int>(verdicts.size()) + 1;
    verdicts.push_back(ConstraintVerdict{index, level, verdict_score(level)});
  }

  if (static_cast<int>(verdicts.size()) != expected_n) {
    return fail<std::vector<ConstraintVerdict>>(
        ErrorCode::CountMismatch, "found " + std::to_string(verdicts.size()) +
                                      " verdict blocks, expected " + std::to_string(expected_n));
  }
  return R(std::move(verdicts));
}

}  // namespace ace
