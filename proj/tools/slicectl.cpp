#include "icnslice/api/server.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <csignal>
#include <fstream>
#include <iostream>

using namespace icnslice;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void
onSignal(int)
{
  g_interrupted = 1;
}

int
runScenario(const std::string& topoPath, const std::string& scenarioPath, std::uint64_t seed,
            const std::string& outPath, bool cache)
{
  api::EngineOptions opts;
  opts.seed = seed;
  opts.cache_enabled = cache;
  api::Engine engine(substrate::Topology::loadFile(topoPath), opts);
  auto metrics = engine.runScript(api::ScenarioScript::loadFile(scenarioPath));

  if (outPath.empty()) {
    for (const auto& line : engine.log().lines()) {
      std::cout << line << '\n';
    }
    std::cerr << metrics.dump(2) << '\n';
    return 0;
  }
  std::ofstream out(outPath, std::ios::binary);
  if (!out) {
    std::cerr << "slicectl: cannot write " << outPath << '\n';
    return 1;
  }
  for (const auto& line : engine.log().lines()) {
    out << line << '\n';
  }
  std::cout << metrics.dump(2) << '\n';
  return 0;
}

int
serve(const std::string& topoPath, const std::string& host, int port, double scale,
      std::uint64_t seed, bool cache)
{
  api::EngineOptions engine;
  engine.seed = seed;
  engine.cache_enabled = cache;
  api::ServerOptions options;
  options.host = host;
  options.port = port;
  options.time_scale = scale;
  api::Server server(substrate::Topology::loadFile(topoPath), engine, options);
  int bound = server.start();
  std::cerr << "slicectl: serving on http://" << host << ":" << bound << " (time scale " << scale
            << ")\n";
  std::signal(SIGINT, onSignal);
  std::signal(SIGTERM, onSignal);
  while (!g_interrupted) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  return 0;
}

int
views(const std::string& url, const std::string& path)
{
  httplib::Client client(url);
  client.set_read_timeout(30, 0);
  auto res = client.Get(path);
  if (!res) {
    std::cerr << "slicectl: " << url << ": " << httplib::to_string(res.error()) << '\n';
    return 1;
  }
  try {
    std::cout << nlohmann::json::parse(res->body).dump(2) << '\n';
  }
  catch (const nlohmann::json::parse_error&) {
    std::cout << res->body << '\n';
  }
  return res->status < 400 ? 0 : 1;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"ICN slicing emulator"};
  app.require_subcommand(1);

  std::string topology;
  std::string scenario;
  std::string out;
  std::uint64_t seed = 42;
  bool noCache = false;
  auto* run = app.add_subcommand("run", "run a scenario script and emit its event log");
  run->add_option("--topology", topology, "topology JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--scenario", scenario, "NDJSON scenario")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--out", out, "write the event log here; metrics then go to stdout");
  run->add_flag("--no-cache", noCache, "disable in-network caching");

  std::string host = "127.0.0.1";
  int port = 8080;
  double scale = 1.0;
  auto* srv = app.add_subcommand("serve", "run the emulator live behind the HTTP API");
  srv->add_option("--topology", topology, "topology JSON")->required()->check(CLI::ExistingFile);
  srv->add_option("--port", port, "TCP port, 0 for any")->check(CLI::Range(0, 65535));
  srv->add_option("--host", host, "bind address");
  srv->add_option("--time-scale", scale, "simulated ms per wall ms")
    ->check(CLI::PositiveNumber);
  srv->add_option("--seed", seed, "RNG seed");
  srv->add_flag("--no-cache", noCache, "disable in-network caching");

  std::string url = "http://127.0.0.1:8080";
  std::string path = "/views";
  auto* vw = app.add_subcommand("views", "print the views of a running server");
  vw->add_option("--url", url, "server base URL");
  vw->add_option("--path", path, "resource to fetch, e.g. /metrics");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return runScenario(topology, scenario, seed, out, !noCache);
    }
    if (*srv) {
      return serve(topology, host, port, scale, seed, !noCache);
    }
    return views(url, path);
  }
  catch (const std::exception& e) {
    std::cerr << "slicectl: " << e.what() << '\n';
    return 1;
  }
}
