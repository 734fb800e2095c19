#include "ace/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace ace {

void Semaphore::acquire() {
  std::unique_lock<std::mutex> lock(mutex_);
  cv_.wait(lock, [&] { return count_ > 0; });
  --count_;
}

void Semaphore::release() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    ++count_;
  }
  cv_.notify_one();
}

namespace {

bool retryable_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status < 600);
}

// choices[0].message.content, or a protocol error describing what was wrong
Result<std::string> extract_content(const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) {
    return fail<std::string>(ErrorCode::Protocol, "response body is not valid JSON");
  }
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    return fail<std::string>(ErrorCode::Protocol, "response has no choices");
  }
  const auto& message = j["choices"][0]["message"];
  if (!message.contains("content") || !message["content"].is_string()) {
    return fail<std::string>(ErrorCode::Protocol, "choices[0].message.content missing");
  }
  return message["content"].get<std::string>();
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config)
    : config_(std::move(config)), semaphore_(std::max(1, config_.max_concurrency)) {
  // split scheme://host[:port] from any path prefix
  const std::string& url = config_.base_url;
  size_t scheme = url.find("://");
  size_t path = scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
  if (path == std::string::npos) {
    host_part_ = url;
  } else {
    host_part_ = url.substr(0, path);
    path_prefix_ = url.substr(path);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

HttpBackend::~HttpBackend() = default;

Result<CompletionResult> HttpBackend::complete(const CompletionRequest& request) {
  SemaphoreGuard guard(&semaphore_);

  nlohmann::json body = {
      {"model", request.model_id},
      {"messages", nlohmann::json::array({nlohmann::json{
                       {"role", "user"}, {"content", request.prompt.text}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output},
  };
  const std::string payload = body.dump();
  const std::string path = path_prefix_ + "/chat/completions";

  const char* api_key =
      config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());

  int last_status = 0;
  std::string last_detail;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      // nondecreasing exponential backoff: base * 2^(attempt - 2)
      auto delay = config_.backoff_base * (1LL << (attempt - 2));
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(host_part_);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        request.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(request.timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(request.timeout));
    httplib::Headers headers;
    if (api_key && *api_key) {
      headers.emplace("Authorization", std::string("Bearer ") + api_key);
    }

    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_status = 0;
      last_detail = httplib::to_string(res.error());
      continue;  // transport failure, retry
    }
    last_status = res->status;
    if (res->status == 200) {
      auto content = extract_content(res->body);
      if (!content.ok()) return Result<CompletionResult>(content.error());
      return CompletionResult{content.value(), attempt, false};
    }
    if (!retryable_status(res->status)) {
      return fail<CompletionResult>(
          ErrorCode::RequestRejected,
          "backend rejected request with status " + std::to_string(res->status), res->status);
    }
    last_detail = "status " + std::to_string(res->status);
  }
  return fail<CompletionResult>(ErrorCode::BackendUnavailable,
                                "retries exhausted after " +
                                    std::to_string(config_.max_attempts) +
                                    " attempts; last: " + last_detail,
                                last_status);
}

void MockBackend::script(const std::string& matcher, std::vector<std::string> responses) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.push_back(Entry{matcher, {responses.begin(), responses.end()}});
}

void MockBackend::set_concurrency_limit(int limit) {
  limiter_ = std::make_unique<Semaphore>(std::max(1, limit));
}

Result<CompletionResult> MockBackend::complete(const CompletionRequest& request) {
  SemaphoreGuard guard(limiter_.get());
  int now = ++concurrent_;
  int seen = max_concurrent_.load();
  while (now > seen && !max_concurrent_.compare_exchange_weak(seen, now)) {
  }
  ++calls_;
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);

  std::string text;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    Entry* matched = nullptr;
    for (auto& entry : entries_) {
      if (request.prompt.text.find(entry.matcher) != std::string::npos) {
        matched = &entry;
        break;
      }
    }
    if (!matched) {
      --concurrent_;
      throw MockScriptError("mock: no matcher for prompt starting \"" +
                            request.prompt.text.substr(0, 80) + "\"");
    }
    if (matched->responses.empty()) {
      --concurrent_;
      throw MockScriptError("mock: matcher \"" + matched->matcher +
                            "\" exhausted; unexpected extra call");
    }
    text = matched->responses.front();
    matched->responses.pop_front();
  }
  --concurrent_;
  return CompletionResult{std::move(text), 1, false};
}

MockBackend script_mock(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& responses) {
  MockBackend mock;
  for (const auto& [matcher, texts] : responses) {
    mock.script(matcher, texts);
  }
  return mock;
}

CachedBackend::CachedBackend(LlmBackend& inner, std::filesystem::path cache_dir)
    : inner_(inner), dir_(std::move(cache_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  dir_ok_ = !ec && std::filesystem::is_directory(dir_);
  if (!dir_ok_) {
    log_warn("completion cache disabled: cannot create " + dir_.string());
  }
}

Result<CompletionResult> CachedBackend::cached_complete(const CompletionRequest& request,
                                                        const std::string& key) {
  if (dir_ok_) {
    std::ifstream in(dir_ / key, std::ios::binary);
    if (in) {
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      if (!in.bad()) {
        ++hits_;
        return CompletionResult{std::move(text), 1, true};
      }
      log_warn("completion cache read failed for " + key + "; fetching");
    }
  }
  ++misses_;
  return fetch_and_store(request, key);
}

Result<CompletionResult> CachedBackend::refresh(const CompletionRequest& request,
                                                const std::string& key) {
  return fetch_and_store(request, key);
}

Result<CompletionResult> CachedBackend::fetch_and_store(const CompletionRequest& request,
                                                        const std::string& key) {
  ++network_calls_;
  auto result = inner_.complete(request);
  if (!result.ok() || !dir_ok_) return result;

  // write-temp-then-rename keeps concurrent readers off partial files
  auto tmp = dir_ / (key + ".tmp." +
                     std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  out.write(result.value().text.data(),
            static_cast<std::streamsize>(result.value().text.size()));
  out.close();
  if (!out) {
    log_warn("completion cache write failed for " + key);
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    return result;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, dir_ / key, ec);
  if (ec) {
    log_warn("completion cache rename failed for " + key + ": " + ec.message());
    std::filesystem::remove(tmp, ec);
  }
  return result;
}

void CachedBackend::reset_counters() {
  hits_ = 0;
  misses_ = 0;
  network_calls_ = 0;
}

}  // namespace ace
