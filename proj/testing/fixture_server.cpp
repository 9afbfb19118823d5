#include "fixture_server.hpp"

#include <httplib.h>

#include <stdexcept>

namespace soundkit::testing {

struct FixtureServer::Route {
  std::string bytes;
  std::string redirect;
  int drops = 0;
  std::function<void()> mid_hook;
};

FixtureServer::FixtureServer(int port) : server_(std::make_unique<httplib::Server>()) {
  server_->Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Route> r;
    bool drop = false;
    {
      std::lock_guard lock(mu_);
      ++requests_[req.path];
      auto it = routes_.find(req.path);
      if (it != routes_.end()) {
        r = it->second;
        if (r->drops > 0) {
          --r->drops;
          drop = true;
        }
      }
    }
    if (!r) {
      res.status = 404;
      res.set_content("not found", "text/plain");
      return;
    }
    if (!r->redirect.empty()) {
      res.set_redirect(r->redirect);
      return;
    }
    auto body = std::make_shared<std::string>(r->bytes);
    auto hook = r->mid_hook;
    res.set_content_provider(
        body->size(), "application/octet-stream",
        [this, body, hook, drop](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
          const std::size_t half = body->size() / 2;
          std::size_t n = std::min<std::size_t>(length, 16 * 1024);
          if (offset < half) n = std::min(n, half - offset);
          if (n > 0 && !sink.write(body->data() + offset, n)) return false;
          {
            std::lock_guard lock(mu_);
            bytes_served_ += n;
          }
          if (offset + n == half) {
            if (hook) hook();
            if (drop) return false;
          }
          return true;
        });
  });
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else if (server_->bind_to_port("127.0.0.1", port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw std::runtime_error("fixture server: cannot bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

FixtureServer::~FixtureServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string FixtureServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void FixtureServer::put(const std::string& path, std::string bytes) {
  auto r = std::make_shared<Route>();
  r->bytes = std::move(bytes);
  std::lock_guard lock(mu_);
  if (auto it = routes_.find(path); it != routes_.end()) {
    r->drops = it->second->drops;
    r->mid_hook = it->second->mid_hook;
  }
  routes_[path] = std::move(r);
}

void FixtureServer::remove(const std::string& path) {
  std::lock_guard lock(mu_);
  routes_.erase(path);
}

void FixtureServer::redirect(const std::string& path, const std::string& target) {
  auto r = std::make_shared<Route>();
  r->redirect = target.rfind("http", 0) == 0 ? target : base_url() + target;
  std::lock_guard lock(mu_);
  routes_[path] = std::move(r);
}

void FixtureServer::drop_next(const std::string& path, int times) {
  std::lock_guard lock(mu_);
  auto& r = routes_.at(path);
  r->drops = times;
}

void FixtureServer::on_mid_transfer(const std::string& path, std::function<void()> hook) {
  std::lock_guard lock(mu_);
  routes_.at(path)->mid_hook = std::move(hook);
}

std::uint64_t FixtureServer::bytes_served() const {
  std::lock_guard lock(mu_);
  return bytes_served_;
}

int FixtureServer::requests(const std::string& path) const {
  std::lock_guard lock(mu_);
  auto it = requests_.find(path);
  return it == requests_.end() ? 0 : it->second;
}

int FixtureServer::total_requests() const {
  std::lock_guard lock(mu_);
  int n = 0;
  for (const auto& [_, c] : requests_) n += c;
  return n;
}

void FixtureServer::reset_counters() {
  std::lock_guard lock(mu_);
  requests_.clear();
  bytes_served_ = 0;
}

}  // namespace soundkit::testing
