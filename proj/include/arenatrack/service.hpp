#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "arenatrack/pipeline.hpp"
#include "arenatrack/project.hpp"

namespace arenatrack {

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";  // loopback unless opened explicitly
  int port = 8765;
  std::string out_root;            // default: the project directory
};

// Local HTTP facade over the engine. Requests are routed through handle(),
// which the HTTP layer and tests share.
class Service {
 public:
  Service(Project project, ServiceOptions options);
  ~Service();

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  // Blocks until stop_listening() is called.
  bool listen();
  void stop_listening();
  // Waits for the active run, if any.
  void wait_for_run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arenatrack
