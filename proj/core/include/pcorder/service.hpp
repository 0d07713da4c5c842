#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "pcorder/analysis.hpp"
#include "pcorder/data.hpp"
#include "pcorder/error.hpp"
#include "pcorder/session.hpp"

namespace pcorder::service {

struct ServiceConfig {
  int port = 8790;
  /// Uncached requests whose estimated detector invocations exceed this run
  /// as background jobs.
  std::size_t max_sync_work = 50000;
  std::size_t cache_bytes = std::size_t{256} << 20;
  std::string cors_origin = "*";
  /// Detector worker threads per analysis; 0 = hardware concurrency.
  unsigned analysis_threads = 0;

  /// Defaults overridden by PORT, MAX_SYNC_WORK, CACHE_BYTES, CORS_ORIGIN.
  static ServiceConfig from_env();
};

/// Transport-neutral request. `query` merges URL parameters; `upload` holds
/// the first multipart file, if any.
struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string content_type;
  std::optional<std::string> upload;
  bool force_sync = false;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// HTTP status for an engine error code.
int http_status(ErrorCode code);
nlohmann::json api_error_json(const Error& e);

/// Weight-independent analyses keyed by dataset and window settings, with
/// LRU eviction by approximate size. Lookups take a shared lock.
class AnalysisCache {
 public:
  using Key = std::tuple<std::string, double, double, std::uint64_t, int, int>;

  explicit AnalysisCache(std::size_t max_bytes) : max_bytes_(max_bytes) {}

  std::shared_ptr<const Analysis> find(const Key& key) const;
  void insert(const Key& key, std::shared_ptr<const Analysis> analysis);
  std::size_t bytes() const;
  std::size_t size() const;

 private:
  struct Entry {
    std::shared_ptr<const Analysis> analysis;
    std::size_t bytes = 0;
    mutable std::atomic<std::uint64_t> last_used{0};
  };

  std::size_t max_bytes_;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::unique_ptr<Entry>> entries_;
  std::size_t total_bytes_ = 0;
  mutable std::atomic<std::uint64_t> clock_{0};
};

class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ApiResponse handle(const ApiRequest& request);

  const ServiceConfig& config() const noexcept { return config_; }
  const AnalysisCache& cache() const noexcept { return cache_; }

 private:
  struct DatasetEntry {
    std::string id;
    Dataset dataset;
    std::size_t dropped_rows = 0;
  };
  struct SessionEntry {
    std::mutex mutex;
    Session session;
  };
  struct Job {
    std::mutex mutex;
    bool done = false;
    ApiResponse response;
  };
  struct AnalysisRequest;

  ApiResponse route(const ApiRequest& request);

  ApiResponse post_dataset(const ApiRequest& request);
  ApiResponse get_dataset(const std::string& id);
  ApiResponse get_matrix(const std::string& id, const ApiRequest& request);
  ApiResponse get_profile(const std::string& id, const ApiRequest& request);
  ApiResponse post_order(const std::string& id, const ApiRequest& request);
  ApiResponse get_rows(const std::string& id, const ApiRequest& request);
  ApiResponse post_session(const ApiRequest& request);
  ApiResponse session_action(const std::string& id, const std::string& action, const ApiRequest& request);
  ApiResponse get_job(const std::string& id);

  std::shared_ptr<const DatasetEntry> dataset(const std::string& id) const;
  std::shared_ptr<SessionEntry> session(const std::string& id) const;

  /// Cached analysis, or nullptr after scheduling a background job (the
  /// caller then returns `deferred`).
  std::shared_ptr<const Analysis> analysis_for(const DatasetEntry& ds, const AnalysisRequest& ar,
                                               const ApiRequest& request, ApiResponse& deferred);

  ServiceConfig config_;
  AnalysisCache cache_;

  mutable std::shared_mutex datasets_mutex_;
  std::map<std::string, std::shared_ptr<const DatasetEntry>> datasets_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::mutex jobs_mutex_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::vector<std::thread> job_threads_;

  std::atomic<std::uint64_t> next_dataset_{1};
  std::atomic<std::uint64_t> next_session_{1};
  std::atomic<std::uint64_t> next_job_{1};
};

/// Blocking HTTP/1.1 front end. `static_dir`, when nonempty, is served at /ui.
class HttpServer {
 public:
  explicit HttpServer(Service& service, std::string static_dir = {});
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks the calling thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pcorder::service
