#include "icnslice/api/errors.hpp"
#include "icnslice/api/scenario.hpp"
#include "icnslice/api/server.hpp"
#include "rig.hpp"

#include "doctest.h"
#include "httplib.h"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

using namespace icnslice;
using namespace icnslice::testing;
using nlohmann::json;

namespace {

std::string
readFixture(const std::string& file)
{
  std::ifstream in(std::string(ICNSLICE_FIXTURES) + "/" + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json
body(const httplib::Result& r)
{
  REQUIRE(r);
  return json::parse(r->body);
}

} // namespace

TEST_SUITE("api")
{
  TEST_CASE("every failure maps to one status and code")
  {
    Rig rig;
    auto s = rig.create(conferenceTemplate("x", "poa1", "poa2"));
    rig.join(s, "p", "poa1", {"producer", "consumer"});

    struct Case
    {
      std::string cmd;
      json args;
      int status;
      std::string code;
    };
    std::vector<Case> cases{
      {"create_slice", conferenceTemplate("x", "poa1", "poa2"), 409, "DuplicateSlice"},
      {"create_slice", {{"slice_name", "y"}}, 400, "TemplateError"},
      {"create_slice", conferenceTemplate("z", "poa1", "poa2", false, 0.5), 409, "EmbeddingError"},
      {"create_slice", conferenceTemplate("w", "poa1", "poa2", false, 60, 900000000), 409,
       "EmbeddingError"},
      {"delete_slice", {{"slice", 77}}, 404, "UnknownSlice"},
      {"delete_slice", {{"slice", "nope"}}, 404, "UnknownSlice"},
      {"join", {{"slice", s.value}, {"participant", "p"}, {"poa", "poa1"}, {"roles", {"consumer"}}},
       409, "DuplicateParticipant"},
      {"join", {{"slice", s.value}, {"participant", "q"}, {"poa", "poa1"}, {"roles", {"consumer"}},
                {"iface", "satellite"}}, 400, "BadRequest"},
      {"join", {{"slice", s.value}, {"participant", "q"}}, 400, "BadRequest"},
      {"leave", {{"slice", s.value}, {"participant", "ghost"}}, 404, "UnknownParticipant"},
      {"handoff", {{"slice", s.value}, {"participant", "p"}, {"to_poa", "poa2"}}, 409,
       "MobilityDisabled"},
      {"frobnicate", json::object(), 400, "UnknownCommand"},
    };
    for (const auto& c : cases) {
      CAPTURE(c.cmd);
      CAPTURE(c.code);
      auto r = rig.attempt(c.cmd, c.args);
      CHECK(r.status == c.status);
      CHECK(r.body["error"] == c.code);
      CHECK(r.body["status"] == c.status);
      CHECK(r.body["message"].is_string());
    }
    // the embedding failure names its constraint
    auto lat = rig.attempt("create_slice", conferenceTemplate("z", "poa1", "poa2", false, 0.5));
    CHECK(lat.body["detail"]["reason"] == "latency");
  }

  TEST_CASE("a participant name shared by two slices needs a slice")
  {
    Rig rig;
    auto a = rig.create(conferenceTemplate("a", "poa1", "poa2"));
    auto b = rig.create(conferenceTemplate("b", "poa1", "poa2"));
    rig.join(a, "alice", "poa1", {"producer"});
    rig.join(b, "alice", "poa2", {"producer"});
    auto r = rig.attempt("publish", {{"participant", "alice"}});
    CHECK(r.status == 400);
    CHECK(r.body["error"] == "AmbiguousParticipant");
    CHECK(rig.attempt("publish", {{"participant", "alice"}, {"slice", "b"}}).status == 200);
  }

  TEST_CASE("commands leave a record in the log")
  {
    Rig rig;
    rig.create(conferenceTemplate("x", "poa1", "poa2"));
    rig.attempt("delete_slice", {{"slice", 9}});
    std::vector<json> commands;
    for (const auto& line : rig.engine.log().lines()) {
      auto rec = json::parse(line);
      if (rec["kind"] == "command") {
        commands.push_back(rec);
      }
    }
    REQUIRE(commands.size() == 2);
    CHECK(commands[0]["command"] == "create_slice");
    CHECK(commands[0]["status"] == 201);
    CHECK(commands[1]["status"] == 404);
    CHECK(commands[1]["error"] == "UnknownSlice");
  }

  TEST_CASE("views and metrics carry a schema version")
  {
    Rig rig;
    auto s = rig.create(conferenceTemplate("x", "poa1", "poa2"));
    rig.join(s, "p", "poa1", {"producer", "consumer"});
    rig.join(s, "c", "poa2", {"consumer"});
    rig.advance(100);
    auto v = rig.engine.views();
    CHECK(v["schema_version"] == api::SCHEMA_VERSION);
    CHECK(v["slices"].size() == 1);
    CHECK(v["slices"][0]["participants"].size() == 2);
    CHECK(v["forwarders"].size() == rig.engine.topology().nodes().size());
    CHECK(v["poas"].size() == 2);
    CHECK(v["metrics"]["schema_version"] == api::SCHEMA_VERSION);
    auto m = rig.engine.metrics();
    for (const char* key : {"delivered_segments", "published_segments", "producer_serves",
                            "cache_hit_ratio", "pit_entries", "cs_bytes", "counters", "conserved",
                            "handoffs", "stretch"}) {
      CAPTURE(key);
      CHECK(m["slices"][0].contains(key));
    }
    CHECK(m["ledger"].size() > 0);
    CHECK(rig.engine.eventsSince(0)["schema_version"] == api::SCHEMA_VERSION);
  }

  TEST_CASE("events are paged by sequence number")
  {
    Rig rig;
    rig.create(conferenceTemplate("x", "poa1", "poa2"));
    rig.create(conferenceTemplate("y", "poa1", "poa2"));
    auto all = rig.engine.eventsSince(0);
    auto n = all["events"].size();
    REQUIRE(n >= 2);
    auto first = rig.engine.eventsSince(0, 1);
    CHECK(first["events"].size() == 1);
    auto rest = rig.engine.eventsSince(first["next"].get<std::uint64_t>());
    CHECK(rest["events"].size() == n - 1);
    CHECK(rig.engine.eventsSince(all["next"].get<std::uint64_t>())["events"].empty());
    for (const auto& e : all["events"]) {
      CHECK(e["kind"] != "tx");
      CHECK(e["kind"] != "deliver");
    }
  }

  TEST_CASE("scenario scripts")
  {
    SUBCASE("parse errors name the line")
    {
      auto bad = [] (const std::string& text, std::size_t line) {
        try {
          api::ScenarioScript::parse(text);
          FAIL("parsed: " << text);
        }
        catch (const api::ScriptError& e) {
          CHECK(e.line() == line);
        }
      };
      bad("{\"at_ms\": 5, \"command\": \"stop\"}\n{\"at_ms\": 1, \"command\": \"stop\"}\n", 2);
      bad("# c\n\n{\"at_ms\": 0, \"command\": \"dance\"}\n", 3);
      bad("{\"at_ms\": -1, \"command\": \"stop\"}\n", 1);
      bad("[1]\n", 1);
      bad("{oops\n", 1);
      bad("{\"at_ms\": 0, \"command\": \"stop\", \"args\": 3}\n", 1);
      CHECK(api::classify(std::make_exception_ptr(api::ScriptError(4, "x"))).status() == 400);
    }

    SUBCASE("an empty script produces an empty log")
    {
      Rig rig;
      auto m = rig.engine.runScript(api::ScenarioScript::parse("# nothing\n\n"));
      CHECK(rig.engine.log().lines().empty());
      CHECK(rig.engine.clock().now() == SimTime{});
      CHECK(m["slices"].empty());
    }

    SUBCASE("stop ends the run")
    {
      Rig rig;
      auto script = api::ScenarioScript::parse(
        "{\"at_ms\": 0, \"command\": \"create_slice\", \"args\": " +
        conferenceTemplate("x", "poa1", "poa2").dump() + "}\n"
        "{\"at_ms\": 300, \"command\": \"stop\"}\n"
        "{\"at_ms\": 400, \"command\": \"delete_slice\", \"args\": {\"slice\": \"x\"}}\n");
      rig.engine.runScript(script);
      CHECK(rig.engine.clock().now().ms() == doctest::Approx(300));
      CHECK(rig.engine.orchestrator().sliceIds().size() == 1);
    }

    SUBCASE("the demo scenario runs clean")
    {
      Rig rig("demo-topology.json", api::EngineOptions{});
      auto m = rig.engine.runScript(api::ScenarioScript::loadFile(
        std::string(ICNSLICE_FIXTURES) + "/demo-scenario.ndjson"));
      REQUIRE(m["slices"].size() == 2);
      for (const auto& s : m["slices"]) {
        CHECK(s["delivered_segments"].get<int>() > 0);
        CHECK(s["conserved"] == true);
      }
      for (const auto& line : rig.engine.log().lines()) {
        auto rec = json::parse(line);
        if (rec["kind"] == "command") {
          CHECK_MESSAGE(rec["status"].get<int>() < 300, line);
        }
      }
    }
  }
}

TEST_SUITE("http")
{
  TEST_CASE("management endpoints")
  {
    api::ServerOptions so;
    so.port = 0;
    so.time_scale = 5;
    so.max_poll_ms = 2000;
    api::EngineOptions eo;
    eo.monitor_period_ms = 0;
    api::Server server(fixtureTopology("demo-topology.json"), eo, so);
    int port = server.start();
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(10, 0);

    auto created = cli.Post("/slices", conferenceTemplate("live", "poa1", "poa2", true).dump(),
                            "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    auto id = std::to_string(body(created)["slice_id"].get<int>());

    auto dup = cli.Post("/slices", conferenceTemplate("live", "poa1", "poa2").dump(),
                        "application/json");
    CHECK(dup->status == 409);
    CHECK(body(dup)["error"] == "DuplicateSlice");
    CHECK(cli.Post("/slices", "{not json", "application/json")->status == 400);
    CHECK(cli.Delete("/slices/404")->status == 404);

    json join{{"participant_id", "pro"}, {"poa", "poa1"}, {"roles", {"producer"}}};
    CHECK(cli.Post("/slices/" + id + "/participants", join.dump(), "application/json")->status == 200);
    join = {{"participant", "con"}, {"poa", "poa2"}, {"roles", {"consumer"}}};
    CHECK(cli.Post("/slices/live/participants", join.dump(), "application/json")->status == 200);

    // a long poll from the current cursor wakes up on the next command
    auto cursor = body(cli.Get("/events?since=0&timeout_ms=0"))["next"].get<std::uint64_t>();
    std::thread publisher([&] {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      httplib::Client c2("127.0.0.1", port);
      c2.Post("/participants/pro/publish", json{{"count", 3}, {"interval_ms", 10}}.dump(),
              "application/json");
    });
    auto t0 = std::chrono::steady_clock::now();
    auto polled = body(cli.Get("/events?since=" + std::to_string(cursor) + "&timeout_ms=2000"));
    auto waited = std::chrono::steady_clock::now() - t0;
    publisher.join();
    CHECK(polled["schema_version"] == api::SCHEMA_VERSION);
    CHECK(!polled["events"].empty());
    CHECK(polled["next"].get<std::uint64_t>() > cursor);
    CHECK(waited < std::chrono::milliseconds(1900));

    // an idle poll times out empty
    auto idleFrom = body(cli.Get("/events?since=0&timeout_ms=0"))["next"].get<std::uint64_t>();
    auto idle = body(cli.Get("/events?since=" + std::to_string(idleFrom + 1000) + "&timeout_ms=50"));
    CHECK(idle["events"].empty());
    CHECK(cli.Get("/events?since=abc")->status == 400);

    auto handoff = cli.Post("/participants/pro/handoff", json{{"to_poa", "poa2"}}.dump(),
                            "application/json");
    CHECK(handoff->status == 200);
    CHECK(cli.Post("/slices/live/mobility", json{{"enabled", false}}.dump(),
                   "application/json")->status == 200);
    auto refused = cli.Post("/participants/pro/handoff", json{{"to_poa", "poa1"}}.dump(),
                            "application/json");
    CHECK(refused->status == 409);

    auto views = body(cli.Get("/views"));
    CHECK(views["schema_version"] == api::SCHEMA_VERSION);
    CHECK(views["slices"][0]["mobility_enabled"] == false);
    CHECK(body(cli.Get("/metrics"))["schema_version"] == api::SCHEMA_VERSION);

    CHECK(cli.Delete("/slices/live/participants/con")->status == 200);
    CHECK(cli.Delete("/slices/" + id)->status == 200);
    CHECK(body(cli.Get("/views"))["slices"].empty());
    server.stop();
  }

  TEST_CASE("scenario endpoint is deterministic per seed")
  {
    api::ServerOptions so;
    so.port = 0;
    api::Server server(fixtureTopology("demo-topology.json"), api::EngineOptions{}, so);
    int port = server.start();
    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(60, 0);
    auto text = readFixture("demo-scenario.ndjson");
    auto a = cli.Post("/scenario?seed=42", text, "application/x-ndjson");
    auto b = cli.Post("/scenario?seed=42", text, "application/x-ndjson");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->status == 200);
    CHECK(a->body == b->body);
    auto j = json::parse(a->body);
    CHECK(j["schema_version"] == api::SCHEMA_VERSION);
    CHECK(j["seed"] == 42);
    CHECK(!j["log"].empty());

    auto bad = cli.Post("/scenario", "{\"at_ms\": 0, \"command\": \"dance\"}\n", "application/x-ndjson");
    CHECK(bad->status == 400);
    CHECK(body(bad)["error"] == "ScriptError");
    CHECK(body(bad)["detail"]["line"] == 1);
    server.stop();
  }
}
