#ifndef ICNSLICE_API_SERVER_HPP
#define ICNSLICE_API_SERVER_HPP

#include "icnslice/api/engine.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace httplib {
class Server;
} // namespace httplib

namespace icnslice::api {

struct ServerOptions
{
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  /// Simulated milliseconds per wall-clock millisecond.
  double time_scale = 1.0;
  /// Longest time GET /events holds a request open.
  int max_poll_ms = 25000;
};

/** \brief HTTP front end driving an Engine in scaled real time.
 *
 *  A background thread advances the clock; every request takes the engine
 *  lock, so views and commands always fall between events.
 */
class Server
{
public:
  Server(substrate::Topology topo, EngineOptions engine, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving in the background. Returns the bound port.
  int
  start();

  /// Blocks until stop() is called from another thread or a signal handler.
  void
  wait();

  void
  stop();

  int
  port() const
  {
    return m_port;
  }

  /// Runs \p fn with the engine locked.
  template<typename Fn>
  auto
  withEngine(Fn&& fn)
  {
    std::lock_guard lock(m_mutex);
    return fn(*m_engine);
  }

private:
  void
  routes();

  void
  tick();

  CommandResult
  command(const std::string& name, const nlohmann::json& args);

private:
  substrate::Topology m_topo;
  EngineOptions m_engineOptions;
  ServerOptions m_options;
  std::unique_ptr<Engine> m_engine;
  std::unique_ptr<httplib::Server> m_http;
  std::mutex m_mutex;
  std::condition_variable m_eventsCv;
  std::thread m_clockThread;
  std::thread m_httpThread;
  std::atomic<bool> m_running{false};
  int m_port = 0;
};

} // namespace icnslice::api

#endif // ICNSLICE_API_SERVER_HPP
