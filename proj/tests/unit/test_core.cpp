#include "icnslice/core/forwarder.hpp"

#include "doctest.h"

#include <list>
#include <random>

using namespace icnslice;
using namespace icnslice::core;

namespace {

Name
n(std::string_view uri)
{
  return Name::parse(uri);
}

Interest
interest(SliceId slice, std::string_view name, std::uint64_t nonce, std::uint32_t lifetime = 4000)
{
  Interest i;
  i.slice = slice;
  i.name = n(name);
  i.nonce = nonce;
  i.lifetime_ms = lifetime;
  return i;
}

Data
data(SliceId slice, std::string_view name, std::uint32_t bytes = 100)
{
  Data d;
  d.slice = slice;
  d.name = n(name);
  d.payload_len_bytes = bytes;
  return d;
}

const SliceId S1{1};
const SliceId S2{2};

} // namespace

TEST_SUITE("name")
{
  TEST_CASE("parse and render round trip")
  {
    CHECK(n("/conf/a/media/3").toUri() == "/conf/a/media/3");
    CHECK(n("/conf/a/").toUri() == "/conf/a");
    CHECK(n("/conf/a").size() == 2);
    CHECK_THROWS_AS(n(""), ParseError);
    CHECK_THROWS_AS(n("conf"), ParseError);
    CHECK_THROWS_AS(n("/a//b"), ParseError);
    CHECK_THROWS_AS(n("/"), ParseError);
  }

  TEST_CASE("random names round trip")
  {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
      std::vector<std::string> parts;
      int len = std::uniform_int_distribution<int>(1, 6)(rng);
      for (int k = 0; k < len; ++k) {
        std::string c;
        int clen = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int j = 0; j < clen; ++j) {
          c.push_back(static_cast<char>('a' + std::uniform_int_distribution<int>(0, 25)(rng)));
        }
        parts.push_back(c);
      }
      Name name(parts);
      CHECK(Name::parse(name.toUri()) == name);
    }
  }

  TEST_CASE("prefix relation")
  {
    CHECK(n("/a").isPrefixOf(n("/a/b")));
    CHECK(n("/a/b").isPrefixOf(n("/a/b")));
    CHECK_FALSE(n("/a/b").isPrefixOf(n("/a")));
    CHECK_FALSE(n("/a/b").isPrefixOf(n("/a/bc")));
    CHECK(n("/a/b/c").prefix(2) == n("/a/b"));
    CHECK(n("/a").append("b") == n("/a/b"));
  }
}

TEST_SUITE("fib")
{
  TEST_CASE("longest prefix wins")
  {
    Fib fib;
    fib.insert(n("/conf"), {FaceId{1}});
    fib.insert(n("/conf/a"), {FaceId{2}});
    REQUIRE(fib.findLongestPrefixMatch(n("/conf/a/media/1")) != nullptr);
    CHECK(fib.findLongestPrefixMatch(n("/conf/a/media/1"))->nexthops.front() == FaceId{2});
    CHECK(fib.findLongestPrefixMatch(n("/conf/b"))->nexthops.front() == FaceId{1});
    CHECK(fib.findLongestPrefixMatch(n("/other")) == nullptr);
    CHECK(fib.erase(n("/conf/a")));
    CHECK(fib.findLongestPrefixMatch(n("/conf/a/media/1"))->prefix == n("/conf"));
    CHECK(fib.size() == 1);
  }

  TEST_CASE("removing a face drops empty entries")
  {
    Fib fib;
    fib.insert(n("/x"), {FaceId{3}});
    fib.addNextHop(n("/y"), FaceId{3});
    fib.addNextHop(n("/y"), FaceId{4});
    fib.removeFace(FaceId{3});
    CHECK(fib.findExactMatch(n("/x")) == nullptr);
    REQUIRE(fib.findExactMatch(n("/y")) != nullptr);
    CHECK(fib.findExactMatch(n("/y"))->nexthops == std::vector<FaceId>{FaceId{4}});
  }

  TEST_CASE("lpm agrees with a linear scan")
  {
    std::mt19937_64 rng(11);
    auto comp = [&] { return std::string(1, static_cast<char>('a' + rng() % 3)); };
    auto randomName = [&] (int maxLen) {
      std::vector<std::string> parts;
      int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(maxLen));
      for (int i = 0; i < len; ++i) {
        parts.push_back(comp());
      }
      return Name(parts);
    };
    for (int round = 0; round < 50; ++round) {
      Fib fib;
      std::map<Name, FaceId> reference;
      for (int i = 0; i < 30; ++i) {
        Name p = randomName(4);
        FaceId f{static_cast<std::uint32_t>(i + 1)};
        fib.insert(p, {f});
        reference[p] = f;
      }
      for (int i = 0; i < 10; ++i) {
        Name p = randomName(4);
        fib.erase(p);
        reference.erase(p);
      }
      CHECK(fib.size() == reference.size());
      for (int q = 0; q < 100; ++q) {
        Name name = randomName(6);
        const Name* best = nullptr;
        for (const auto& [p, _] : reference) {
          if (p.isPrefixOf(name) && (best == nullptr || p.size() > best->size())) {
            best = &p;
          }
        }
        const FibEntry* got = fib.findLongestPrefixMatch(name);
        if (best == nullptr) {
          CHECK(got == nullptr);
        }
        else {
          REQUIRE(got != nullptr);
          CHECK(got->prefix == *best);
          CHECK(got->nexthops.front() == reference.at(*best));
        }
      }
    }
  }
}

TEST_SUITE("content store")
{
  TEST_CASE("third insert under a two-entry budget evicts the least recently hit")
  {
    auto a = data(S1, "/a", 100);
    std::uint64_t entry = wireSize(a);
    ContentStore cs(2 * entry);
    cs.insert(a, SimTime{0});
    cs.insert(data(S1, "/b", 100), SimTime{1});
    CHECK(cs.find(n("/a"), SimTime{2}) != nullptr);
    cs.insert(data(S1, "/c", 100), SimTime{3});
    CHECK(cs.size() == 2);
    CHECK(cs.find(n("/b"), SimTime{4}) == nullptr);
    CHECK(cs.usedBytes() <= cs.budget());
  }

  TEST_CASE("freshness expiry and zero freshness")
  {
    ContentStore cs(10000);
    auto d = data(S1, "/f");
    d.freshness_ms = 10;
    cs.insert(d, SimTime::fromMs(0));
    CHECK(cs.find(n("/f"), SimTime::fromMs(9)) != nullptr);
    CHECK(cs.find(n("/f"), SimTime::fromMs(10)) == nullptr);
    auto z = data(S1, "/z");
    z.freshness_ms = 0;
    CHECK_FALSE(cs.insert(z, SimTime{0}));
    CHECK(cs.size() == 0);
  }

  TEST_CASE("matches a reference LRU list under random traffic")
  {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
      std::uint64_t budget = 400 + rng() % 1200;
      ContentStore cs(budget);
      std::list<std::pair<std::string, std::uint64_t>> ref;  // front = most recent
      std::uint64_t used = 0;
      for (int step = 0; step < 300; ++step) {
        std::string name = "/k/" + std::to_string(rng() % 12);
        SimTime now{step};
        if (rng() % 2 == 0) {
          auto d = data(S1, name, static_cast<std::uint32_t>(rng() % 300));
          std::uint64_t size = wireSize(d);
          bool stored = cs.insert(d, now);
          if (size > budget) {
            CHECK_FALSE(stored);
            continue;
          }
          for (auto it = ref.begin(); it != ref.end(); ++it) {
            if (it->first == name) {
              used -= it->second;
              ref.erase(it);
              break;
            }
          }
          while (used + size > budget) {
            used -= ref.back().second;
            ref.pop_back();
          }
          ref.emplace_front(name, size);
          used += size;
        }
        else {
          bool hit = cs.find(n(name), now) != nullptr;
          auto it = std::find_if(ref.begin(), ref.end(), [&] (auto& e) { return e.first == name; });
          CHECK(hit == (it != ref.end()));
          if (it != ref.end()) {
            ref.splice(ref.begin(), ref, it);
          }
        }
        CHECK(cs.usedBytes() == used);
        CHECK(cs.usedBytes() <= budget);
        std::vector<Name> expected;
        for (auto it = ref.rbegin(); it != ref.rend(); ++it) {
          expected.push_back(n(it->first));
        }
        CHECK(cs.lruOrder() == expected);
      }
    }
  }
}

TEST_SUITE("forwarder")
{
  TEST_CASE("forward, aggregate, satisfy, then serve from cache")
  {
    Forwarder f("r");
    f.provisionSlice(S1, 100000);
    f.fib(S1).insert(n("/conf/a"), {FaceId{9}});

    auto first = f.onInterest(FaceId{1}, interest(S1, "/conf/a/p/media/0", 1), SimTime{0});
    CHECK(first.outcome == InterestOutcome::Forwarded);
    REQUIRE(first.out.size() == 1);
    CHECK(first.out[0].face == FaceId{9});

    auto second = f.onInterest(FaceId{2}, interest(S1, "/conf/a/p/media/0", 2), SimTime{5});
    CHECK(second.outcome == InterestOutcome::Aggregated);
    CHECK(second.out.empty());

    auto loop = f.onInterest(FaceId{3}, interest(S1, "/conf/a/p/media/0", 2), SimTime{6});
    CHECK(loop.outcome == InterestOutcome::LoopDropped);

    auto back = f.onData(FaceId{9}, data(S1, "/conf/a/p/media/0"), SimTime{10});
    CHECK(back.out.size() == 2);
    CHECK(f.tables(S1).pit.size() == 0);

    auto hit = f.onInterest(FaceId{4}, interest(S1, "/conf/a/p/media/0", 3), SimTime{20});
    CHECK(hit.outcome == InterestOutcome::CsHit);
    REQUIRE(hit.out.size() == 1);
    CHECK(std::holds_alternative<Data>(hit.out[0].packet));

    const auto& c = f.counters(S1);
    CHECK(c.interests_in == 4);
    CHECK(c.interests_out == 1);
    CHECK(c.pit_aggregations == 1);
    CHECK(c.drops == 1);
    CHECK(c.cs_hits == 1);
    CHECK(c.conserved());
  }

  TEST_CASE("a matching Interest goes upstream again once the forwarded one lapsed")
  {
    Forwarder f("r");
    f.provisionSlice(S1, 0);
    f.fib(S1).insert(n("/conf/a"), {FaceId{9}});
    auto a = interest(S1, "/conf/a/sync/state/3", 1);
    const SimTime lifetime = SimTime::fromMs(a.lifetime_ms);

    CHECK(f.onInterest(FaceId{1}, a, SimTime{}).outcome == InterestOutcome::Forwarded);
    // inside the lifetime: wait on the pending one
    auto b = f.onInterest(FaceId{2}, interest(S1, "/conf/a/sync/state/3", 2), lifetime - SimTime::fromMs(1));
    CHECK(b.outcome == InterestOutcome::Aggregated);
    // upstream has given up, yet the entry lives on for face 2
    auto c = f.onInterest(FaceId{1}, interest(S1, "/conf/a/sync/state/3", 3), lifetime + SimTime::fromMs(1));
    CHECK(c.outcome == InterestOutcome::Forwarded);
    REQUIRE(c.out.size() == 1);
    CHECK(c.out[0].face == FaceId{9});
    CHECK(f.tables(S1).pit.size() == 1);

    auto back = f.onData(FaceId{9}, data(S1, "/conf/a/sync/state/3"), lifetime + SimTime::fromMs(2));
    CHECK(back.out.size() == 2);
    CHECK(f.counters(S1).interests_out == 2);
    CHECK(f.counters(S1).conserved());
  }

  TEST_CASE("no route and no slice")
  {
    Forwarder f("r");
    f.provisionSlice(S1, 0);
    auto noRoute = f.onInterest(FaceId{1}, interest(S1, "/x", 1), SimTime{0});
    REQUIRE(noRoute.out.size() == 1);
    CHECK((std::get<Nack>(noRoute.out[0].packet).reason == NackReason::NoRoute));
    CHECK(f.counters(S1).nacks == 1);

    auto noSlice = f.onInterest(FaceId{1}, interest(S2, "/x", 1), SimTime{0});
    REQUIRE(noSlice.out.size() == 1);
    CHECK((std::get<Nack>(noSlice.out[0].packet).reason == NackReason::NoSlice));
    CHECK(f.noSliceNacks() == 1);
  }

  TEST_CASE("unsolicited data is dropped and not cached")
  {
    Forwarder f("r");
    f.provisionSlice(S1, 100000);
    auto out = f.onData(FaceId{1}, data(S1, "/u"), SimTime{0});
    CHECK(out.out.empty());
    CHECK(f.counters(S1).unsolicited == 1);
    CHECK(f.tables(S1).cs.size() == 0);
  }

  TEST_CASE("sweep times out expired entries only")
  {
    Forwarder f("r");
    f.provisionSlice(S1, 0);
    f.fib(S1).insert(n("/p"), {FaceId{9}});
    f.onInterest(FaceId{1}, interest(S1, "/p/1", 1, 100), SimTime::fromMs(0));
    f.onInterest(FaceId{2}, interest(S1, "/p/2", 2, 300), SimTime::fromMs(0));
    auto early = f.pitSweep(SimTime::fromMs(99));
    CHECK(early.expired == 0);
    auto swept = f.pitSweep(SimTime::fromMs(100));
    CHECK(swept.expired == 1);
    REQUIRE(swept.actions.out.size() == 1);
    CHECK(swept.actions.out[0].face == FaceId{1});
    CHECK((std::get<Nack>(swept.actions.out[0].packet).reason == NackReason::Timeout));
    CHECK(f.tables(S1).pit.size() == 1);
    CHECK(f.counters(S1).timeouts == 1);
  }

  TEST_CASE("slices keep separate tables")
  {
    Forwarder f("r");
    f.provisionSlice(S1, 100000);
    f.provisionSlice(S2, 100000);
    f.fib(S1).insert(n("/conf/x"), {FaceId{9}});
    f.fib(S2).insert(n("/conf/x"), {FaceId{9}});
    f.onInterest(FaceId{1}, interest(S1, "/conf/x/p/media/0", 1), SimTime{0});
    f.onData(FaceId{9}, data(S1, "/conf/x/p/media/0"), SimTime{1});
    auto other = f.onInterest(FaceId{1}, interest(S2, "/conf/x/p/media/0", 2), SimTime{2});
    CHECK(other.outcome == InterestOutcome::Forwarded);
    CHECK(f.counters(S2).cs_hits == 0);
    CHECK(f.tables(S2).cs.size() == 0);
  }

  TEST_CASE("random traffic preserves conservation and the cache budget")
  {
    std::mt19937_64 rng(99);
    Forwarder f("r");
    f.provisionSlice(S1, 2000);
    f.provisionSlice(S2, 700);
    for (auto s : {S1, S2}) {
      f.fib(s).insert(n("/a"), {FaceId{8}});
      f.fib(s).insert(n("/b"), {FaceId{9}});
    }
    for (int step = 0; step < 3000; ++step) {
      SimTime now = SimTime::fromMs(step);
      SliceId s = rng() % 2 ? S1 : S2;
      std::string name = std::string(rng() % 3 == 0 ? "/c/" : (rng() % 2 ? "/a/" : "/b/")) +
                         std::to_string(rng() % 20);
      switch (rng() % 4) {
        case 0:
        case 1:
          f.onInterest(FaceId{static_cast<std::uint32_t>(1 + rng() % 4)},
                       interest(s, name, rng() % 50, 50), now);
          break;
        case 2:
          f.onData(FaceId{8}, data(s, name, static_cast<std::uint32_t>(rng() % 200)), now);
          break;
        default:
          f.pitSweep(now);
      }
      for (auto id : {S1, S2}) {
        CHECK(f.counters(id).conserved());
        CHECK(f.tables(id).cs.usedBytes() <= f.tables(id).cs.budget());
      }
    }
  }

  TEST_CASE("re-expression keeps downstream state and moves the upstream")
  {
    Forwarder f("old");
    f.provisionSlice(S1, 0);
    f.fib(S1).insert(n("/conf/a/p"), {FaceId{5}});
    f.fib(S1).insert(n("/poa/new"), {FaceId{7}});
    f.onInterest(FaceId{1}, interest(S1, "/conf/a/p/media/4", 1), SimTime::fromMs(0));
    f.onInterest(FaceId{2}, interest(S1, "/conf/a/p/media/4", 2), SimTime::fromMs(1));

    std::uint64_t next = 100;
    auto acts = f.reexpressPending(S1, n("/conf/a/p"), n("/poa/new"), [&] { return next++; },
                                   SimTime::fromMs(2));
    REQUIRE(acts.out.size() == 1);
    CHECK(acts.out[0].face == FaceId{7});
    const auto& sent = std::get<Interest>(acts.out[0].packet);
    CHECK(sent.forwarding_hint == n("/poa/new"));
    CHECK(sent.nonce == 100);

    auto back = f.onData(FaceId{7}, data(S1, "/conf/a/p/media/4"), SimTime::fromMs(20));
    CHECK(back.out.size() == 2);
    CHECK(f.counters(S1).reexpressions == 1);
  }

  TEST_CASE("hold extends pending entries")
  {
    Forwarder f("old");
    f.provisionSlice(S1, 0);
    f.fib(S1).insert(n("/conf/a/p"), {FaceId{5}});
    f.onInterest(FaceId{1}, interest(S1, "/conf/a/p/media/0", 1, 100), SimTime::fromMs(0));
    auto until = f.holdPending(S1, n("/conf/a/p"), SimTime::fromMs(500));
    REQUIRE(until);
    CHECK(*until == SimTime::fromMs(500));
    CHECK(f.pitSweep(SimTime::fromMs(499)).expired == 0);
    CHECK(f.pitSweep(SimTime::fromMs(500)).expired == 1);
  }
}
