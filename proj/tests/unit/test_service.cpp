// Entropy backend: the pure request handler, JSON shapes, bounds, failure
// mapping, and the real HTTP server on an ephemeral port.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qeaas/service/service.hpp"

#include "test_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>
#include <set>
#include <thread>

using namespace qeaas;
using namespace qeaas::service;
using nlohmann::json;
using qeaas::test::TempDir;

namespace {

json parse_body(const HttpResponse& r) {
  CHECK(r.content_type == "application/json");
  return json::parse(r.body);
}

}  // namespace

TEST_CASE("handler accepts exactly GET /random_number/{1..256}") {
  pool::DeterministicTestSource source(99);

  SUBCASE("success shape") {
    HttpResponse r = handle_http("GET", "/random_number/16", source, ServiceMode::Test);
    CHECK(r.status == 200);
    json body = parse_body(r);
    CHECK(body["num_bytes"] == 16);
    CHECK(body["source"] == "test");
    std::string hexed = body["random_bytes"];
    CHECK(hexed.size() == 32);
    // The payload is the source's next 16 stream bytes.
    pool::DeterministicTestSource twin(99);
    CHECK(hex_decode(hexed) == twin.read(16));
  }

  SUBCASE("bounds") {
    CHECK(handle_http("GET", "/random_number/1", source, ServiceMode::Test).status == 200);
    CHECK(handle_http("GET", "/random_number/256", source, ServiceMode::Test).status == 200);
    std::string hexed =
        parse_body(handle_http("GET", "/random_number/256", source, ServiceMode::Test))
            ["random_bytes"];
    CHECK(hexed.size() == 512);
  }

  SUBCASE("rejections") {
    auto status = [&](const std::string& method, const std::string& path) {
      HttpResponse r = handle_http(method, path, source, ServiceMode::Test);
      if (r.status != 200) CHECK(parse_body(r).contains("error"));
      return r.status;
    };
    CHECK(status("POST", "/random_number/16") == 405);
    CHECK(status("PUT", "/random_number/16") == 405);
    CHECK(status("GET", "/") == 404);
    CHECK(status("GET", "/entropy/16") == 404);
    CHECK(status("GET", "/random_number") == 400);  // missing count
    CHECK(status("GET", "/random_number/") == 400);
    CHECK(status("GET", "/random_number/0") == 400);
    CHECK(status("GET", "/random_number/257") == 400);
    CHECK(status("GET", "/random_number/999999") == 400);
    CHECK(status("GET", "/random_number/abc") == 400);
    CHECK(status("GET", "/random_number/1x") == 400);
    CHECK(status("GET", "/random_number/-5") == 400);
    CHECK(status("GET", "/random_number/5/") == 400);
    CHECK(status("GET", "/random_number/ 5") == 400);
    // Leading zeros are still a decimal integer in range.
    CHECK(status("GET", "/random_number/016") == 200);
  }

  SUBCASE("source failure maps to 500") {
    source.set_failing(true);
    HttpResponse r = handle_http("GET", "/random_number/8", source, ServiceMode::Test);
    CHECK(r.status == 500);
    CHECK(parse_body(r).contains("error"));
    source.set_failing(false);
    CHECK(handle_http("GET", "/random_number/8", source, ServiceMode::Test).status == 200);
  }
}

TEST_CASE("mode names round trip") {
  for (ServiceMode m : {ServiceMode::Direct, ServiceMode::Mixed, ServiceMode::Test}) {
    auto back = mode_from_string(to_string(m));
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
  CHECK(!mode_from_string("qrng").has_value());
  CHECK(!mode_from_string("").has_value());
  CHECK(!mode_from_string("TEST").has_value());
}

TEST_CASE("test mode is deterministic per seed") {
  ServiceConfig config;
  config.mode = ServiceMode::Test;
  config.seed = 7;
  config.port = 0;
  EntropyService a(config);
  EntropyService b(config);
  for (int i = 0; i < 5; i++) {
    HttpResponse ra = a.handle("GET", "/random_number/32");
    HttpResponse rb = b.handle("GET", "/random_number/32");
    REQUIRE(ra.status == 200);
    CHECK(ra.body == rb.body);
  }
  ServiceConfig other = config;
  other.seed = 8;
  EntropyService c(other);
  CHECK(a.handle("GET", "/random_number/32").body != c.handle("GET", "/random_number/32").body);
}

TEST_CASE("direct mode streams the recorded file and fails when exhausted") {
  TempDir tmp;
  qeaas::test::TestRng rng(0xd1);
  Bytes recorded = rng.bytes(64);
  std::string path = tmp.file("qrng.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(recorded.data()),
              static_cast<std::streamsize>(recorded.size()));
  }

  ServiceConfig config;
  config.mode = ServiceMode::Direct;
  config.stream_file = path;
  config.port = 0;
  EntropyService svc(config);

  HttpResponse first = svc.handle("GET", "/random_number/32");
  REQUIRE(first.status == 200);
  json body = parse_body(first);
  CHECK(body["source"] == "direct");
  CHECK(hex_decode(body["random_bytes"].get<std::string>()) ==
        Bytes(recorded.begin(), recorded.begin() + 32));

  CHECK(svc.handle("GET", "/random_number/32").status == 200);  // bytes 32..63
  CHECK(svc.handle("GET", "/random_number/1").status == 500);   // exhausted

  CHECK_THROWS_AS(
      [] {
        ServiceConfig missing;
        missing.mode = ServiceMode::Direct;
        missing.stream_file = "/nonexistent/qrng.bin";
        EntropyService bad(missing);
      }(),
      pool::SourceError);
}

TEST_CASE("mixed mode serves fresh OS randomness") {
  ServiceConfig config;
  config.mode = ServiceMode::Mixed;
  config.port = 0;
  EntropyService svc(config);
  HttpResponse a = svc.handle("GET", "/random_number/16");
  HttpResponse b = svc.handle("GET", "/random_number/16");
  REQUIRE(a.status == 200);
  REQUIRE(b.status == 200);
  CHECK(parse_body(a)["source"] == "mixed");
  CHECK(a.body != b.body);
}

TEST_CASE("HTTP server end to end") {
  ServiceConfig config;
  config.mode = ServiceMode::Test;
  config.seed = 7;
  config.port = 0;  // ephemeral
  config.bind_addr = "127.0.0.1";
  EntropyService svc(config);
  svc.start();
  REQUIRE(svc.port() != 0);

  httplib::Client http("127.0.0.1", svc.port());
  http.set_read_timeout(5, 0);

  SUBCASE("success over the wire matches the seeded stream") {
    auto res = http.Get("/random_number/16");
    REQUIRE(res);
    CHECK(res->status == 200);
    json body = json::parse(res->body);
    pool::DeterministicTestSource twin(7);
    CHECK(hex_decode(body["random_bytes"].get<std::string>()) == twin.read(16));
    CHECK(body["num_bytes"] == 16);
    CHECK(body["source"] == "test");
  }

  SUBCASE("error statuses over the wire") {
    auto bad = http.Get("/random_number/257");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    auto missing = http.Get("/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto posted = http.Post("/random_number/16", "", "text/plain");
    REQUIRE(posted);
    CHECK(posted->status == 405);
  }

  SUBCASE("concurrent requests never duplicate stream bytes") {
    std::mutex m;
    std::set<std::string> seen;
    std::atomic<int> failures{0};
    auto worker = [&] {
      httplib::Client c("127.0.0.1", svc.port());
      c.set_read_timeout(5, 0);
      for (int i = 0; i < 25; i++) {
        auto res = c.Get("/random_number/8");
        if (!res || res->status != 200) {
          ++failures;
          continue;
        }
        std::string hexed = json::parse(res->body)["random_bytes"];
        std::lock_guard lk(m);
        seen.insert(hexed);
      }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; i++) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    CHECK(failures.load() == 0);
    CHECK(seen.size() == 100);  // sequential slices of one stream: all distinct
  }

  SUBCASE("binding a busy port fails loudly") {
    ServiceConfig clash = config;
    clash.port = svc.port();
    EntropyService second(clash);
    CHECK_THROWS_AS(second.start(), std::runtime_error);
  }

  svc.stop();
}
