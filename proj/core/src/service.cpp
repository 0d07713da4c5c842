#include "pcorder/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pcorder/document.hpp"
#include "pcorder/ordering.hpp"

namespace pcorder::service {

using nlohmann::json;

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> path_segments(std::string_view path) {
  std::vector<std::string> segs;
  for (auto& s : split(path, '/')) {
    if (!s.empty()) segs.push_back(std::move(s));
  }
  return segs;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  const auto n = parse_number<std::size_t>(v);
  return n ? *n : fallback;
}

// Request parameters: URL query merged with top-level fields of a JSON body
// (the body wins).
class Params {
 public:
  explicit Params(const ApiRequest& r) : query_(r.query) {
    const bool looks_json = r.content_type.find("json") != std::string::npos ||
                            (!r.body.empty() && r.body.find_first_not_of(" \t\r\n") != std::string::npos &&
                             r.body[r.body.find_first_not_of(" \t\r\n")] == '{');
    if (looks_json && !r.body.empty()) {
      body_ = json::parse(r.body, nullptr, false);
      if (body_.is_discarded() || !body_.is_object()) {
        throw Error(ErrorCode::BadRequest, "request body is not a JSON object");
      }
    }
  }

  const json* field(const std::string& name) const {
    if (body_.is_object()) {
      auto it = body_.find(name);
      if (it != body_.end() && !it->is_null()) return &*it;
    }
    return nullptr;
  }

  std::optional<std::string> str(const std::string& name) const {
    if (const json* f = field(name)) return f->is_string() ? f->get<std::string>() : f->dump();
    auto it = query_.find(name);
    if (it != query_.end()) return it->second;
    return std::nullopt;
  }

 private:
  std::map<std::string, std::string> query_;
  json body_;
};

std::size_t require_index(const Params& p, const std::string& name) {
  const auto s = p.str(name);
  if (!s) throw Error(ErrorCode::BadRequest, "missing parameter '" + name + "'", {{"parameter", name}});
  const auto v = parse_number<std::size_t>(*s);
  if (!v) throw Error(ErrorCode::BadRequest, "parameter '" + name + "' must be a nonnegative integer", {{"parameter", name}});
  return *v;
}

Weights weights_param(const Params& p) {
  if (const json* f = p.field("weights")) return doc::weights_from_json(*f);
  const auto s = p.str("weights");
  if (!s) throw Error(ErrorCode::InvalidWeights, "missing 'weights' parameter");
  return Weights::parse(*s);
}

json session_json(const Session& s) {
  json log = json::array();
  for (const StepRecord& step : s.step_log) {
    log.push_back({{"pair", {step.pair.primary, step.pair.secondary}}, {"weights", doc::weights_json(step.weights)}});
  }
  json prefix_names = json::array();
  for (std::size_t a : s.prefix) prefix_names.push_back(s.analysis->names()[a]);
  return {{"session_id", s.id},
          {"dataset_id", s.dataset_ref},
          {"prefix", s.prefix},
          {"prefix_names", std::move(prefix_names)},
          {"weights", doc::weights_json(s.current_weights)},
          {"window_spec", doc::window_spec_json(s.spec)},
          {"seed", s.seed},
          {"step_log", std::move(log)}};
}

json matrix_envelope(const Analysis& a, const Weights& w, const ScoreMatrix& m) {
  return {{"dims", m.dims},
          {"window_spec", doc::window_spec_json(a.spec())},
          {"weights", doc::weights_json(w)},
          {"seed", a.options().seed},
          {"options", {{"permutations", a.options().permutations}, {"fan_bins", a.options().fan_bins}}},
          {"matrix", doc::matrix_json(m)}};
}

}  // namespace

struct Service::AnalysisRequest {
  WindowSpec spec;
  AnalysisOptions options;

  static AnalysisRequest from(const Params& p, unsigned threads) {
    AnalysisRequest ar;
    double window = 0.2;
    if (const auto s = p.str("window")) {
      const auto v = parse_number<double>(*s);
      if (!v) throw Error(ErrorCode::InvalidWindowSpec, "window must be a number", {{"window", *s}});
      window = *v;
    }
    ar.spec = WindowSpec::with_default_stride(window);
    if (const auto s = p.str("stride")) {
      const auto v = parse_number<double>(*s);
      if (!v) throw Error(ErrorCode::InvalidWindowSpec, "stride must be a number", {{"stride", *s}});
      ar.spec.stride_fraction = *v;
    }
    ar.spec.validate();

    const auto seed = p.str("seed");
    if (!seed) throw Error(ErrorCode::MissingSeed, "a 'seed' parameter is required for reproducible scoring");
    const auto sv = parse_number<std::uint64_t>(*seed);
    if (!sv) throw Error(ErrorCode::MissingSeed, "seed must be a nonnegative integer", {{"seed", *seed}});
    ar.options.seed = *sv;

    if (const auto s = p.str("permutations")) {
      const auto v = parse_number<int>(*s);
      if (!v || *v < 1) throw Error(ErrorCode::BadRequest, "permutations must be a positive integer");
      ar.options.permutations = *v;
    }
    if (const auto s = p.str("bins")) {
      const auto v = parse_number<int>(*s);
      if (!v || *v < 2) throw Error(ErrorCode::BadRequest, "bins must be an integer >= 2");
      ar.options.fan_bins = *v;
    }
    ar.options.threads = threads;
    return ar;
  }
};

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.port = static_cast<int>(env_size("PORT", static_cast<std::size_t>(c.port)));
  c.max_sync_work = env_size("MAX_SYNC_WORK", c.max_sync_work);
  c.cache_bytes = env_size("CACHE_BYTES", c.cache_bytes);
  if (const char* origin = std::getenv("CORS_ORIGIN"); origin && *origin) c.cors_origin = origin;
  return c;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDataset:
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownJob:
    case ErrorCode::NotFound:
    case ErrorCode::FileNotFound: return 404;
    case ErrorCode::InvalidWeights:
    case ErrorCode::InvalidWindowSpec:
    case ErrorCode::NoActiveProperties:
    case ErrorCode::MissingSeed: return 422;
    case ErrorCode::Internal: return 500;
    default: return 400;
  }
}

json api_error_json(const Error& e) {
  json out = {{"code", std::string(e.code_name())}, {"message", e.what()}};
  if (!e.detail().is_null()) out["detail"] = e.detail();
  return out;
}

// ---------------------------------------------------------------- cache

std::shared_ptr<const Analysis> AnalysisCache::find(const Key& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second->last_used = ++clock_;
  return it->second->analysis;
}

void AnalysisCache::insert(const Key& key, std::shared_ptr<const Analysis> analysis) {
  std::unique_lock lock(mutex_);
  if (entries_.count(key)) return;
  auto entry = std::make_unique<Entry>();
  entry->bytes = analysis->approx_bytes();
  entry->analysis = std::move(analysis);
  entry->last_used = ++clock_;
  total_bytes_ += entry->bytes;
  entries_.emplace(key, std::move(entry));
  // Evict least recently used entries, but always keep the newest one.
  while (total_bytes_ > max_bytes_ && entries_.size() > 1) {
    auto victim = std::min_element(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return a.second->last_used < b.second->last_used;
    });
    total_bytes_ -= victim->second->bytes;
    entries_.erase(victim);
  }
}

std::size_t AnalysisCache::bytes() const {
  std::shared_lock lock(mutex_);
  return total_bytes_;
}

std::size_t AnalysisCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------- service

Service::Service(ServiceConfig config) : config_(std::move(config)), cache_(config_.cache_bytes) {}

Service::~Service() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(jobs_mutex_);
    threads.swap(job_threads_);
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
}

ApiResponse Service::handle(const ApiRequest& request) {
  try {
    ApiResponse r = route(request);
    if (const auto bad = doc::find_non_finite(r.body)) {
      throw Error(ErrorCode::Internal, "response holds a non-finite number", {{"pointer", *bad}});
    }
    return r;
  } catch (const Error& e) {
    return {http_status(e.code()), api_error_json(e)};
  } catch (const json::exception& e) {
    return {400, api_error_json(Error(ErrorCode::BadRequest, e.what()))};
  } catch (const std::exception& e) {
    return {500, api_error_json(Error(ErrorCode::Internal, e.what()))};
  }
}

ApiResponse Service::route(const ApiRequest& request) {
  const auto segs = path_segments(request.path);
  const std::string& m = request.method;
  const std::size_t n = segs.size();

  if (n == 1 && segs[0] == "health" && m == "GET") return {200, {{"status", "ok"}}};
  if (n >= 1 && segs[0] == "datasets") {
    if (n == 1 && m == "POST") return post_dataset(request);
    if (n == 2 && m == "GET") return get_dataset(segs[1]);
    if (n == 3) {
      const std::string& what = segs[2];
      if (what == "matrix" && m == "GET") return get_matrix(segs[1], request);
      if (what == "profile" && m == "GET") return get_profile(segs[1], request);
      if (what == "order" && m == "POST") return post_order(segs[1], request);
      if (what == "rows" && m == "GET") return get_rows(segs[1], request);
    }
  }
  if (n >= 1 && segs[0] == "sessions") {
    if (n == 1 && m == "POST") return post_session(request);
    if (n == 2 && m == "GET") return session_action(segs[1], "", request);
    if (n == 3 && m == "POST") return session_action(segs[1], segs[2], request);
  }
  if (n == 2 && segs[0] == "jobs" && m == "GET") return get_job(segs[1]);
  throw Error(ErrorCode::NotFound, "no route for " + m + " " + request.path);
}

std::shared_ptr<const Service::DatasetEntry> Service::dataset(const std::string& id) const {
  std::shared_lock lock(datasets_mutex_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) throw Error(ErrorCode::UnknownDataset, "unknown dataset '" + id + "'", {{"dataset_id", id}});
  return it->second;
}

std::shared_ptr<Service::SessionEntry> Service::session(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'", {{"session_id", id}});
  return it->second;
}

std::shared_ptr<const Analysis> Service::analysis_for(const DatasetEntry& ds, const AnalysisRequest& ar,
                                                      const ApiRequest& request, ApiResponse& deferred) {
  const AnalysisCache::Key key{ds.id, ar.spec.window_fraction, ar.spec.stride_fraction, ar.options.seed,
                               ar.options.permutations, ar.options.fan_bins};
  if (auto hit = cache_.find(key)) return hit;

  const std::size_t dims = ds.dataset.dims();
  const std::size_t work = ar.spec.window_count() * dims * (dims > 0 ? dims - 1 : 0) * kPropertyCount;
  if (!request.force_sync && work > config_.max_sync_work) {
    const std::string job_id = "job-" + std::to_string(next_job_++);
    auto job = std::make_shared<Job>();
    ApiRequest replay = request;
    replay.force_sync = true;
    std::lock_guard lock(jobs_mutex_);
    jobs_[job_id] = job;
    job_threads_.emplace_back([this, job, replay] {
      ApiResponse r = handle(replay);
      std::lock_guard jl(job->mutex);
      job->response = std::move(r);
      job->done = true;
    });
    deferred = {202, {{"job_id", job_id}, {"status", "running"}, {"poll", "/jobs/" + job_id}, {"estimated_work", work}}};
    return nullptr;
  }
  auto computed = std::make_shared<const Analysis>(Analysis::compute(ds.dataset, ar.spec, ar.options));
  cache_.insert(key, computed);
  return computed;
}

ApiResponse Service::post_dataset(const ApiRequest& request) {
  const std::string& text = request.upload ? *request.upload : request.body;
  auto qname = request.query.find("name");
  std::string name = qname != request.query.end() ? qname->second : "dataset";
  std::optional<std::vector<std::string>> columns;
  if (auto it = request.query.find("columns"); it != request.query.end() && !it->second.empty()) {
    columns = split(it->second, ',');
  }
  LoadResult loaded = parse_csv(text, name, columns);
  auto entry = std::make_shared<DatasetEntry>(
      DatasetEntry{"ds-" + std::to_string(next_dataset_++), std::move(loaded.dataset), loaded.dropped_rows});
  json body = {{"dataset_id", entry->id},
               {"dims", entry->dataset.column_names()},
               {"row_count", entry->dataset.row_count()},
               {"dropped_rows", entry->dropped_rows}};
  std::unique_lock lock(datasets_mutex_);
  datasets_[entry->id] = std::move(entry);
  return {200, std::move(body)};
}

ApiResponse Service::get_dataset(const std::string& id) {
  auto ds = dataset(id);
  json ranges = json::array();
  for (const Column& c : ds->dataset.columns()) ranges.push_back({{"name", c.name}, {"min", c.raw_min}, {"max", c.raw_max}});
  return {200,
          {{"dataset_id", ds->id},
           {"name", ds->dataset.name()},
           {"dims", ds->dataset.column_names()},
           {"row_count", ds->dataset.row_count()},
           {"dropped_rows", ds->dropped_rows},
           {"columns", std::move(ranges)}}};
}

ApiResponse Service::get_matrix(const std::string& id, const ApiRequest& request) {
  auto ds = dataset(id);
  const Params p(request);
  const Weights w = weights_param(p);
  w.require_active();
  const auto ar = AnalysisRequest::from(p, config_.analysis_threads);
  ApiResponse deferred;
  auto a = analysis_for(*ds, ar, request, deferred);
  if (!a) return deferred;
  return {200, matrix_envelope(*a, w, build_matrix(*a, w))};
}

ApiResponse Service::get_profile(const std::string& id, const ApiRequest& request) {
  auto ds = dataset(id);
  const Params p(request);
  const AxisPair pair{require_index(p, "i"), require_index(p, "j")};
  ds->dataset.column(pair.primary);
  ds->dataset.column(pair.secondary);
  if (pair.primary == pair.secondary) {
    throw Error(ErrorCode::InvalidPair, "axis pair must join two distinct axes", {{"i", pair.primary}});
  }
  const auto ar = AnalysisRequest::from(p, config_.analysis_threads);
  ApiResponse deferred;
  auto a = analysis_for(*ds, ar, request, deferred);
  if (!a) return deferred;
  json body = doc::profile_with_members_json(a->profile(pair), *a);
  body["dims"] = a->names();
  body["window_spec"] = doc::window_spec_json(a->spec());
  body["seed"] = a->options().seed;
  return {200, std::move(body)};
}

ApiResponse Service::post_order(const std::string& id, const ApiRequest& request) {
  auto ds = dataset(id);
  const Params p(request);
  const std::string mode = p.str("mode").value_or("tsp");
  if (mode != "tsp" && mode != "greedy") {
    throw Error(ErrorCode::BadRequest, "mode must be 'tsp' or 'greedy'", {{"mode", mode}});
  }
  const Weights w = weights_param(p);
  w.require_active();
  const auto ar = AnalysisRequest::from(p, config_.analysis_threads);
  ApiResponse deferred;
  auto a = analysis_for(*ds, ar, request, deferred);
  if (!a) return deferred;
  const ScoreMatrix m = build_matrix(*a, w);
  const OrderingResult r = mode == "tsp" ? order_tsp(m) : order_greedy(m);
  return {200, doc::order_document(*a, w, ds->dropped_rows, r)};
}

ApiResponse Service::get_rows(const std::string& id, const ApiRequest& request) {
  auto ds = dataset(id);
  const Params p(request);
  std::vector<std::size_t> indices;
  const auto spec = p.str("indices");
  if (spec && !spec->empty()) {
    for (const auto& tok : split(*spec, ',')) {
      const auto v = parse_number<std::size_t>(tok);
      if (!v || *v >= ds->dataset.row_count()) {
        throw Error(ErrorCode::BadRequest, "row index '" + tok + "' out of range", {{"index", tok}});
      }
      indices.push_back(*v);
    }
  } else {
    indices.resize(ds->dataset.row_count());
    for (std::size_t r = 0; r < indices.size(); ++r) indices[r] = r;
  }
  json rows = json::array();
  for (std::size_t r : indices) {
    json values = json::array();
    for (const Column& c : ds->dataset.columns()) values.push_back(c.normalized[r]);
    rows.push_back({{"index", r}, {"values", std::move(values)}});
  }
  return {200, {{"dims", ds->dataset.column_names()}, {"rows", std::move(rows)}}};
}

ApiResponse Service::post_session(const ApiRequest& request) {
  const Params p(request);
  const auto ds_id = p.str("dataset_id");
  if (!ds_id) throw Error(ErrorCode::BadRequest, "missing 'dataset_id'");
  auto ds = dataset(*ds_id);
  const Weights w = weights_param(p);
  w.require_active();
  const auto ar = AnalysisRequest::from(p, config_.analysis_threads);
  ApiResponse deferred;
  auto a = analysis_for(*ds, ar, request, deferred);
  if (!a) return deferred;

  const std::string sid = "s-" + std::to_string(next_session_++);
  SessionUpdate up = start_session(a, sid, ds->id, w, ar.options.seed);
  auto entry = std::make_shared<SessionEntry>();
  entry->session = std::move(up.session);
  json body = {{"session", session_json(entry->session)}, {"matrix", matrix_envelope(*a, w, up.matrix)}};
  std::lock_guard lock(sessions_mutex_);
  sessions_[sid] = std::move(entry);
  return {200, std::move(body)};
}

ApiResponse Service::session_action(const std::string& id, const std::string& action, const ApiRequest& request) {
  auto entry = session(id);
  const Params p(request);
  std::lock_guard lock(entry->mutex);
  Session& s = entry->session;
  const Analysis& a = *s.analysis;

  if (action.empty()) {
    return {200, {{"session", session_json(s)}, {"matrix", matrix_envelope(a, s.current_weights, candidate_matrix(s))}}};
  }
  if (action == "finalize") {
    const FinalizedOrdering fin = finalize(s);
    json profiles = json::array();
    for (const auto& prof : fin.profiles) profiles.push_back(doc::profile_json(prof));
    return {200,
            {{"session", session_json(s)},
             {"dims", a.names()},
             {"ordering", doc::ordering_json(fin.ordering)},
             {"profiles", std::move(profiles)},
             {"donut", doc::donut_json(fin.ordering, s.current_weights)}}};
  }

  Session next = s;
  ScoreMatrix m;
  if (action == "choose") {
    m = choose_pair(next, require_index(p, "i"), require_index(p, "j"));
  } else if (action == "weights") {
    m = set_weights(next, weights_param(p));
  } else if (action == "undo") {
    m = undo(next);
  } else {
    throw Error(ErrorCode::NotFound, "unknown session action '" + action + "'");
  }
  s = std::move(next);
  return {200, {{"session", session_json(s)}, {"matrix", matrix_envelope(a, s.current_weights, m)}}};
}

ApiResponse Service::get_job(const std::string& id) {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::UnknownJob, "unknown job '" + id + "'", {{"job_id", id}});
    job = it->second;
  }
  std::lock_guard lock(job->mutex);
  if (!job->done) return {200, {{"job_id", id}, {"status", "running"}}};
  return {200, {{"job_id", id}, {"status", "done"}, {"http_status", job->response.status}, {"result", job->response.body}}};
}

}  // namespace pcorder::service
