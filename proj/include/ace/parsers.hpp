#pragma once

#include <string>
#include <vector>

#include "ace/common.hpp"
#include "ace/core.hpp"

namespace ace {

enum class FilterAnswer { Yes, Maybe, No };

const char* filter_answer_name(FilterAnswer answer);

// All parsers are total over arbitrary UTF-8: they return a value or an
// Error, never abort. Tag matching is case-insensitive; labels are matched
// after trimming and collapsing interior whitespace.

// Label inside the LAST well-formed <Answer>...</Answer> pair. The filter
// template places the decision after the analysis, so earlier mentions of
// the option tags are ignored.
Result<FilterAnswer> parse_filter_answer(const std::string& text);

// Lines shaped "Question <k>: <body>" between <Checklist> and </Checklist>.
// Items are re-indexed 1..N in encounter order; gaps in the source numbering
// are tolerated but logged.
Result<Checklist> parse_checklist(const std::string& text);

// "[lo, hi]" between <LENGTH> and </LENGTH>. Bounds violating lo <= hi,
// hi <= 10000 or hi - lo <= 2000 yield ErrorCode::RangeInvalid, distinct
// from Parse so callers can re-prompt.
Result<LengthSpec> parse_length_range(const std::string& text);

// One three-level rating per <Answer>...</Answer> block, in order. Exactly
// expected_n blocks must be present (ErrorCode::CountMismatch otherwise);
// a block whose content is not exactly one rating is a Parse error.
// Throws UsageError when expected_n < 1.
Result<std::vector<ConstraintVerdict>> parse_verdicts(const std::string& text,
                                                      int expected_n);

}  // namespace ace
