#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "ace/common.hpp"
#include "ace/prompts.hpp"

namespace ace {

struct CompletionRequest {
  std::string model_id;
  RenderedPrompt prompt;
  double temperature = 0.0;
  int max_output = 8192;
  std::chrono::milliseconds timeout{60000};
};

struct CompletionResult {
  std::string text;
  int attempts = 1;
  bool from_cache = false;
};

struct BackendConfig {
  std::string base_url;
  std::string api_key_env = "ACE_LLM_API_KEY";
  int max_concurrency = 8;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{250};
};

// Bounded in-flight gate. std::counting_semaphore has a compile-time bound,
// so a small mutex/cv gate keeps the limit a plain runtime value.
class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}
  void acquire();
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int count_;
};

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(Semaphore* sem) : sem_(sem) {
    if (sem_) sem_->acquire();
  }
  ~SemaphoreGuard() {
    if (sem_) sem_->release();
  }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  Semaphore* sem_;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;

  // First choice's message content from the wire response. Transient upstream
  // failures are retried with exponential backoff up to max_attempts.
  virtual Result<CompletionResult> complete(const CompletionRequest& request) = 0;
};

// OpenAI-compatible chat-completions client (POST {base_url}/chat/completions).
// 408/429/5xx and transport failures retry with nondecreasing backoff; other
// 4xx reject immediately; a body without choices[0].message.content is a
// protocol error.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(BackendConfig config);
  ~HttpBackend() override;

  Result<CompletionResult> complete(const CompletionRequest& request) override;

  const BackendConfig& config() const { return config_; }

 private:
  BackendConfig config_;
  std::string host_part_;    // scheme://host[:port]
  std::string path_prefix_;  // leading path from base_url, possibly empty
  Semaphore semaphore_;
};

// Raised by the scripted mock on an unmatched prompt or an exhausted script;
// deliberately an exception so tests fail loudly on unexpected calls.
struct MockScriptError : std::runtime_error {
  explicit MockScriptError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic scripted backend. Dispatch picks the first matcher (in
// insertion order) whose pattern occurs as a substring of the prompt text and
// returns that matcher's scripted texts in order.
class MockBackend : public LlmBackend {
 public:
  MockBackend() = default;

  void script(const std::string& matcher, std::vector<std::string> responses);

  Result<CompletionResult> complete(const CompletionRequest& request) override;

  int call_count() const { return calls_.load(); }
  int max_concurrent_observed() const { return max_concurrent_.load(); }

  // test instrumentation: hold each call open long enough to observe overlap
  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }
  void set_concurrency_limit(int limit);

 private:
  struct Entry {
    std::string matcher;
    std::deque<std::string> responses;
  };

  std::mutex mutex_;
  std::vector<Entry> entries_;
  std::atomic<int> calls_{0};
  std::atomic<int> concurrent_{0};
  std::atomic<int> max_concurrent_{0};
  std::chrono::milliseconds delay_{0};
  std::unique_ptr<Semaphore> limiter_;
};

MockBackend script_mock(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& responses);

// Content-addressed completion cache over any backend. One file per key,
// value is the raw completion text; writes go through a temp file + rename.
// Cache I/O failures degrade to uncached behavior with a logged warning.
class CachedBackend {
 public:
  CachedBackend(LlmBackend& inner, std::filesystem::path cache_dir);

  // cache hit returns the stored text without touching the network; a miss
  // delegates and stores on success only
  Result<CompletionResult> cached_complete(const CompletionRequest& request,
                                           const std::string& key);

  // bypasses the cached value (re-prompt path) but still stores on success
  Result<CompletionResult> refresh(const CompletionRequest& request, const std::string& key);

  LlmBackend& inner() { return inner_; }
  const std::filesystem::path& dir() const { return dir_; }

  long long hits() const { return hits_.load(); }
  long long misses() const { return misses_.load(); }
  long long network_calls() const { return network_calls_.load(); }
  void reset_counters();

 private:
  Result<CompletionResult> fetch_and_store(const CompletionRequest& request,
                                           const std::string& key);

  LlmBackend& inner_;
  std::filesystem::path dir_;
  bool dir_ok_ = false;
  std::atomic<long long> hits_{0};
  std::atomic<long long> misses_{0};
  std::atomic<long long> network_calls_{0};
};

}  // namespace ace
