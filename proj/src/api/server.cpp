#include "icnslice/api/server.hpp"

#include "httplib.h"

#include <chrono>

namespace icnslice::api {

using nlohmann::json;

namespace {

void
reply(httplib::Response& res, int status, const json& body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

json
parseBody(const httplib::Request& req)
{
  if (req.body.empty()) {
    return json::object();
  }
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) {
      throw ApiError(400, "BadRequest", "request body must be a JSON object");
    }
    return j;
  }
  catch (const json::parse_error& e) {
    throw ApiError(400, "BadRequest", std::string("malformed JSON: ") + e.what());
  }
}

template<typename Fn>
httplib::Server::Handler
guarded(Fn fn)
{
  return [fn] (const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    }
    catch (...) {
      ApiError e = classify(std::current_exception());
      reply(res, e.status(), e.toJson());
    }
  };
}

} // namespace

Server::Server(substrate::Topology topo, EngineOptions engine, ServerOptions options)
  : m_topo(std::move(topo))
  , m_engineOptions(engine)
  , m_options(options)
  , m_http(std::make_unique<httplib::Server>())
{
  if (!(m_options.time_scale > 0)) {
    throw std::invalid_argument("time scale must be positive");
  }
  // a live server runs indefinitely; keep memory bounded
  m_engineOptions.retain_log = false;
  m_engine = std::make_unique<Engine>(m_topo, m_engineOptions);
  routes();
}

Server::~Server()
{
  stop();
}

CommandResult
Server::command(const std::string& name, const json& args)
{
  CommandResult result;
  {
    std::lock_guard lock(m_mutex);
    result = m_engine->submit(name, args);
  }
  m_eventsCv.notify_all();
  return result;
}

void
Server::routes()
{
  auto& http = *m_http;

  http.Post("/slices", guarded([this] (const auto& req, auto& res) {
    auto r = command("create_slice", parseBody(req));
    reply(res, r.status, r.body);
  }));

  http.Delete(R"(/slices/([^/]+))", guarded([this] (const auto& req, auto& res) {
    auto r = command("delete_slice", {{"slice", req.matches[1].str()}});
    reply(res, r.status, r.body);
  }));

  http.Post(R"(/slices/([^/]+)/mobility)", guarded([this] (const auto& req, auto& res) {
    auto args = parseBody(req);
    args["slice"] = req.matches[1].str();
    auto r = command("set_mobility", args);
    reply(res, r.status, r.body);
  }));

  http.Post(R"(/slices/([^/]+)/participants)", guarded([this] (const auto& req, auto& res) {
    auto args = parseBody(req);
    args["slice"] = req.matches[1].str();
    if (!args.contains("participant") && args.contains("participant_id")) {
      args["participant"] = args["participant_id"];
    }
    auto r = command("join", args);
    reply(res, r.status, r.body);
  }));

  http.Delete(R"(/slices/([^/]+)/participants/([^/]+))",
              guarded([this] (const auto& req, auto& res) {
    auto r = command("leave", {{"slice", req.matches[1].str()},
                               {"participant", req.matches[2].str()}});
    reply(res, r.status, r.body);
  }));

  http.Post(R"(/slices/([^/]+)/adapt)", guarded([this] (const auto& req, auto& res) {
    auto args = parseBody(req);
    args["slice"] = req.matches[1].str();
    auto r = command("adapt", args);
    reply(res, r.status, r.body);
  }));

  for (const char* action : {"handoff", "move", "publish"}) {
    http.Post(std::string(R"(/participants/([^/]+)/)") + action,
              guarded([this, action] (const auto& req, auto& res) {
      auto args = parseBody(req);
      args["participant"] = req.matches[1].str();
      auto r = command(action, args);
      reply(res, r.status, r.body);
    }));
  }

  http.Get("/views", guarded([this] (const auto&, auto& res) {
    reply(res, 200, withEngine([] (Engine& e) { return e.views(); }));
  }));

  http.Get("/metrics", guarded([this] (const auto&, auto& res) {
    reply(res, 200, withEngine([] (Engine& e) { return e.metrics(); }));
  }));

  http.Get("/events", guarded([this] (const auto& req, auto& res) {
    std::uint64_t since = 0;
    int waitMs = m_options.max_poll_ms;
    std::size_t limit = 500;
    try {
      if (req.has_param("since")) {
        since = std::stoull(req.get_param_value("since"));
      }
      if (req.has_param("timeout_ms")) {
        waitMs = std::clamp(std::stoi(req.get_param_value("timeout_ms")), 0, m_options.max_poll_ms);
      }
      if (req.has_param("limit")) {
        limit = std::max<std::size_t>(1, std::stoul(req.get_param_value("limit")));
      }
    }
    catch (const std::logic_error&) {
      throw ApiError(400, "BadRequest", "since, timeout_ms and limit must be integers");
    }
    std::unique_lock lock(m_mutex);
    m_eventsCv.wait_for(lock, std::chrono::milliseconds(waitMs), [&] {
      return !m_running || m_engine->lastEventSeq() > since;
    });
    auto body = m_engine->eventsSince(since, limit);
    body["t_ms"] = m_engine->clock().now().ms();
    lock.unlock();
    reply(res, 200, body);
  }));

  http.Post("/scenario", guarded([this] (const auto& req, auto& res) {
    std::string text = req.body;
    EngineOptions opts = m_engineOptions;
    opts.retain_log = true;
    if (req.has_param("seed")) {
      try {
        opts.seed = std::stoull(req.get_param_value("seed"));
      }
      catch (const std::logic_error&) {
        throw ApiError(400, "BadRequest", "seed must be an unsigned integer");
      }
    }
    auto script = ScenarioScript::parse(text);
    Engine engine(m_topo, opts);
    auto metrics = engine.runScript(script);
    json log = json::array();
    for (const auto& line : engine.log().lines()) {
      log.push_back(json::parse(line));
    }
    reply(res, 200, {{"schema_version", SCHEMA_VERSION},
                     {"seed", opts.seed},
                     {"log", log},
                     {"metrics", metrics}});
  }));
}

void
Server::tick()
{
  using Clock = std::chrono::steady_clock;
  auto wallStart = Clock::now();
  SimTime simStart;
  {
    std::lock_guard lock(m_mutex);
    simStart = m_engine->clock().now();
  }
  while (m_running) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    auto elapsed = std::chrono::duration<double, std::milli>(Clock::now() - wallStart).count();
    SimTime target = simStart + SimTime::fromMs(elapsed * m_options.time_scale);
    std::uint64_t before = 0;
    std::uint64_t after = 0;
    {
      std::lock_guard lock(m_mutex);
      before = m_engine->lastEventSeq();
      if (target > m_engine->clock().now()) {
        m_engine->runUntil(target);
      }
      after = m_engine->lastEventSeq();
    }
    if (after != before) {
      m_eventsCv.notify_all();
    }
  }
}

int
Server::start()
{
  if (m_running.exchange(true)) {
    return m_port;
  }
  if (m_options.port == 0) {
    m_port = m_http->bind_to_any_port(m_options.host);
  }
  else {
    m_port = m_http->bind_to_port(m_options.host, m_options.port) ? m_options.port : -1;
  }
  if (m_port < 0) {
    m_running = false;
    throw std::runtime_error("cannot bind " + m_options.host + ":" +
                             std::to_string(m_options.port));
  }
  m_clockThread = std::thread([this] { tick(); });
  m_httpThread = std::thread([this] { m_http->listen_after_bind(); });
  m_http->wait_until_ready();
  return m_port;
}

void
Server::wait()
{
  if (m_httpThread.joinable()) {
    m_httpThread.join();
  }
}

void
Server::stop()
{
  if (!m_running.exchange(false)) {
    return;
  }
  m_eventsCv.notify_all();
  m_http->stop();
  if (m_httpThread.joinable()) {
    m_httpThread.join();
  }
  if (m_clockThread.joinable()) {
    m_clockThread.join();
  }
}

} // namespace icnslice::api
