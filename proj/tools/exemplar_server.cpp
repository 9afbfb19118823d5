// Serves the exemplar datasets over HTTP so `soundkit download` can be tried
// against the shipped manifests, or rewrites those manifests and indexes.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include "exemplar.hpp"
#include "fixture_server.hpp"

namespace {
volatile std::sig_atomic_t stop = 0;
}

int main(int argc, char** argv) {
  using namespace soundkit::testing;
  CLI::App app{"Serve or regenerate the exemplar datasets"};
  int port = 8765;
  std::string registry_dir;
  std::string base_url = kExemplarBaseUrl;
  app.add_option("--port", port, "port on 127.0.0.1");
  app.add_option("--write-registry", registry_dir, "write manifests and indexes here and exit");
  app.add_option("--base-url", base_url, "URL prefix recorded in written manifests");
  CLI11_PARSE(app, argc, argv);

  const Exemplar exemplars[] = {exemplar_mini(), exemplar_birds()};

  if (!registry_dir.empty()) {
    for (const auto& e : exemplars) e.write_registry_entry(registry_dir, base_url);
    return 0;
  }

  FixtureServer server(port);
  for (const auto& e : exemplars) {
    for (const auto& r : e.remotes) server.put("/" + e.id + "/" + r.file_name, r.bytes);
  }
  std::signal(SIGINT, [](int) { stop = 1; });
  std::signal(SIGTERM, [](int) { stop = 1; });
  std::cout << "serving exemplar datasets at " << server.base_url() << std::endl;
  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  return 0;
}
