#include <httplib.h>

#include "pcorder/service.hpp"

namespace pcorder::service {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {}

  void dispatch(const httplib::Request& req, httplib::Response& res) {
    ApiRequest ar;
    ar.method = req.method;
    ar.path = req.path;
    for (const auto& [k, v] : req.params) ar.query.emplace(k, v);
    ar.body = req.body;
    ar.content_type = req.get_header_value("Content-Type");
    if (!req.files.empty()) {
      auto it = req.files.find("file");
      ar.upload = (it != req.files.end() ? it : req.files.begin())->second.content;
    }
    const ApiResponse out = service.handle(ar);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  }
};

HttpServer::HttpServer(Service& service, std::string static_dir) : impl_(std::make_unique<Impl>(service)) {
  auto& svr = impl_->server;
  svr.set_default_headers({{"Access-Control-Allow-Origin", service.config().cors_origin}});
  if (!static_dir.empty()) svr.set_mount_point("/ui", static_dir);

  auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->dispatch(req, res); };
  svr.Get(R"(.*)", handler);
  svr.Post(R"(.*)", handler);
  svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& svr = impl_->server;
  if (port == 0) return svr.bind_to_any_port(host);
  return svr.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace pcorder::service
