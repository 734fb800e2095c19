#include "ace/common.hpp"

#include <mutex>

namespace ace {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::RangeInvalid: return "range-invalid";
    case ErrorCode::CountMismatch: return "count-mismatch";
    case ErrorCode::DegenerateTarget: return "degenerate-target";
    case ErrorCode::BackendUnavailable: return "backend-unavailable";
    case ErrorCode::RequestRejected: return "request-rejected";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::Quarantined: return "quarantined";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {
std::mutex g_log_mutex;
}

void log_warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::fprintf(stderr, "[warn] %s\n", message.c_str());
}

void log_info(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::fprintf(stderr, "[info] %s\n", message.c_str());
}

}  // namespace ace
