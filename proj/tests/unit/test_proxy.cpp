// CoAP→HTTP proxy: URL parsing, the pure request-mapping core, the internal
// HTTP client against a real backend, and the full UDP data path over both
// the plain and the secure listener.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qeaas/proxy/proxy.hpp"
#include "qeaas/service/service.hpp"

#include "test_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace qeaas;
using namespace qeaas::proxy;
using nlohmann::json;
using qeaas::test::fast_config;

namespace {

coap::Message proxy_get(const std::string& uri, coap::MsgType type = coap::MsgType::Confirmable) {
  coap::Message req;
  req.type = type;
  req.code = coap::Code::Get;
  req.message_id = 0x1234;
  req.token = to_bytes("tk");
  req.add_option(coap::kOptionProxyUri, to_bytes(uri));
  return req;
}

struct CountingFetcher {
  explicit CountingFetcher(BackendResult r) : result(std::move(r)) {}
  BackendResult result;
  int calls = 0;
  std::string last_uri;
  Fetcher fn() {
    return [this](const std::string& uri) {
      calls++;
      last_uri = uri;
      return result;
    };
  }
};

}  // namespace

TEST_CASE("parse_http_url") {
  auto p = parse_http_url("http://127.0.0.1:6065/random_number/16");
  REQUIRE(p.has_value());
  CHECK(p->host == "127.0.0.1");
  CHECK(p->port == 6065);
  CHECK(p->path == "/random_number/16");

  p = parse_http_url("http://backend/x");
  REQUIRE(p.has_value());
  CHECK(p->port == 80);  // default

  p = parse_http_url("http://backend");
  REQUIRE(p.has_value());
  CHECK(p->path == "/");  // empty path normalized

  CHECK(!parse_http_url("https://backend/x").has_value());
  CHECK(!parse_http_url("coap://backend/x").has_value());
  CHECK(!parse_http_url("backend/x").has_value());
  CHECK(!parse_http_url("http://").has_value());
  CHECK(!parse_http_url("http:///x").has_value());
  CHECK(!parse_http_url("http://host:/x").has_value());
  CHECK(!parse_http_url("http://host:0/x").has_value());
  CHECK(!parse_http_url("http://host:65536/x").has_value());
  CHECK(!parse_http_url("http://host:12ab/x").has_value());
  CHECK(!parse_http_url("http://:8080/x").has_value());
}

TEST_CASE("handle_coap maps backend outcomes onto CoAP codes") {
  const std::string uri = "http://127.0.0.1:6065/random_number/8";

  SUBCASE("2xx becomes a piggybacked 2.05 with JSON content format") {
    CountingFetcher backend{{BackendResult::Kind::Http, 200, "{\"n\":8}"}};
    coap::Message req = proxy_get(uri);
    coap::Message resp = handle_coap(req, backend.fn(), "", 777);
    CHECK(backend.calls == 1);
    CHECK(backend.last_uri == uri);
    CHECK(resp.type == coap::MsgType::Ack);
    CHECK(resp.message_id == req.message_id);  // piggybacked, not 777
    CHECK(resp.token == req.token);
    CHECK(resp.code == coap::Code::Content);
    auto cf = resp.find_option(coap::kOptionContentFormat);
    REQUIRE(cf.has_value());
    CHECK(*cf == Bytes{coap::kContentFormatJson});
    CHECK(resp.payload == to_bytes("{\"n\":8}"));
  }

  SUBCASE("non-confirmable requests get NON responses with a fresh MID") {
    CountingFetcher backend{{BackendResult::Kind::Http, 200, "x"}};
    coap::Message resp =
        handle_coap(proxy_get(uri, coap::MsgType::NonConfirmable), backend.fn(), "", 777);
    CHECK(resp.type == coap::MsgType::NonConfirmable);
    CHECK(resp.message_id == 777);
    CHECK(resp.token == to_bytes("tk"));
  }

  SUBCASE("status mapping") {
    auto code_for = [&](BackendResult r) {
      CountingFetcher backend{std::move(r)};
      return handle_coap(proxy_get(uri), backend.fn(), "", 1).code;
    };
    CHECK(code_for({BackendResult::Kind::Http, 204, ""}) == coap::Code::Content);
    CHECK(code_for({BackendResult::Kind::Http, 400, ""}) == coap::Code::BadRequest);
    CHECK(code_for({BackendResult::Kind::Http, 404, ""}) == coap::Code::BadRequest);
    CHECK(code_for({BackendResult::Kind::Http, 500, ""}) == coap::Code::BadGateway);
    CHECK(code_for({BackendResult::Kind::Http, 503, ""}) == coap::Code::BadGateway);
    CHECK(code_for({BackendResult::Kind::Http, 302, ""}) == coap::Code::BadGateway);
    CHECK(code_for({BackendResult::Kind::Timeout, 0, ""}) == coap::Code::GatewayTimeout);
    CHECK(code_for({BackendResult::Kind::Unreachable, 0, ""}) == coap::Code::GatewayTimeout);
    CHECK(code_for({BackendResult::Kind::Protocol, 0, ""}) == coap::Code::BadGateway);
  }

  SUBCASE("requests rejected before touching the backend") {
    CountingFetcher backend{{BackendResult::Kind::Http, 200, "x"}};
    Fetcher fetch = backend.fn();

    coap::Message post = proxy_get(uri);
    post.code = static_cast<coap::Code>(0x02);  // 0.02 POST
    CHECK(handle_coap(post, fetch, "", 1).code == coap::Code::MethodNotAllowed);

    coap::Message no_uri = proxy_get(uri);
    no_uri.options.clear();
    CHECK(handle_coap(no_uri, fetch, "", 1).code == coap::Code::BadRequest);

    coap::Message empty_uri = proxy_get("");
    CHECK(handle_coap(empty_uri, fetch, "", 1).code == coap::Code::BadRequest);

    coap::Message https = proxy_get("https://127.0.0.1/x");
    CHECK(handle_coap(https, fetch, "", 1).code == coap::Code::BadRequest);

    coap::Message oversize = proxy_get("http://h/" + std::string(coap::kMaxProxyUriBytes, 'a'));
    CHECK(handle_coap(oversize, fetch, "", 1).code == coap::Code::BadRequest);

    CHECK(backend.calls == 0);
  }

  SUBCASE("allow prefix") {
    CountingFetcher backend{{BackendResult::Kind::Http, 200, "x"}};
    Fetcher fetch = backend.fn();
    const std::string prefix = "http://127.0.0.1:6065/";
    CHECK(handle_coap(proxy_get("http://10.0.0.1:80/secret"), fetch, prefix, 1).code ==
          coap::Code::BadRequest);
    CHECK(backend.calls == 0);
    CHECK(handle_coap(proxy_get(uri), fetch, prefix, 1).code == coap::Code::Content);
    CHECK(backend.calls == 1);
  }
}

TEST_CASE("internal HTTP client against a live backend") {
  httplib::Server backend;
  backend.Get("/ok", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"fine\":true}", "application/json");
  });
  backend.Get("/missing", [](const httplib::Request&, httplib::Response& res) {
    res.status = 404;
    res.set_content("gone", "text/plain");
  });
  backend.Get("/boom", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  backend.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1000));
    res.set_content("late", "text/plain");
  });
  backend.Get("/chunked", [](const httplib::Request&, httplib::Response& res) {
    res.set_chunked_content_provider(
        "text/plain", [](size_t, httplib::DataSink& sink) {
          sink.write("part", 4);
          sink.done();
          return true;
        });
  });
  int port = backend.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { backend.listen_after_bind(); });
  backend.wait_until_ready();
  auto base = "http://127.0.0.1:" + std::to_string(port);

  Fetcher fetch = make_http_fetcher(2000);

  BackendResult ok = fetch(base + "/ok");
  CHECK(ok.kind == BackendResult::Kind::Http);
  CHECK(ok.status == 200);
  CHECK(ok.body == "{\"fine\":true}");

  BackendResult missing = fetch(base + "/missing");
  CHECK(missing.kind == BackendResult::Kind::Http);
  CHECK(missing.status == 404);

  BackendResult boom = fetch(base + "/boom");
  CHECK(boom.kind == BackendResult::Kind::Http);
  CHECK(boom.status == 503);

  CHECK(fetch(base + "/chunked").kind == BackendResult::Kind::Protocol);
  CHECK(fetch("not a url").kind == BackendResult::Kind::Protocol);

  Fetcher impatient = make_http_fetcher(200);
  CHECK(impatient(base + "/slow").kind == BackendResult::Kind::Timeout);

  backend.stop();
  server_thread.join();

  // Listener gone: connection refused.
  CHECK(fetch(base + "/ok").kind == BackendResult::Kind::Unreachable);
}

TEST_CASE("proxy rejects equal plain and secure ports") {
  ProxyConfig config;
  config.coap_port = 5683;
  config.coaps_port = 5683;
  CHECK_THROWS_AS(Proxy{config}, std::invalid_argument);
}

TEST_CASE("full UDP data path") {
  // Backend: deterministic entropy service on an ephemeral port.
  service::ServiceConfig svc_config;
  svc_config.mode = service::ServiceMode::Test;
  svc_config.seed = 9;
  svc_config.port = 0;
  svc_config.bind_addr = "127.0.0.1";
  service::EntropyService svc(svc_config);
  svc.start();
  const std::string base = "http://127.0.0.1:" + std::to_string(svc.port());

  pqch::TestPki pki = pqch::make_test_pki(pqch::SigAlg::ECDSA_P256);
  ProxyConfig config;
  config.coap_port = 0;
  config.coaps_port = 0;
  config.bind_addr = "127.0.0.1";
  config.backend_timeout_ms = 2000;
  config.handshake = fast_config(pqch::KexAlg::P256, pqch::SigAlg::ECDSA_P256);
  config.key_store = pki.store;
  config.backend_allow_prefix = base;
  config.worker_threads = 2;
  Proxy proxy(config);
  proxy.start();
  REQUIRE(proxy.coap_port() != 0);
  REQUIRE(proxy.coaps_port() != 0);
  const std::string proxy_addr = "127.0.0.1:" + std::to_string(proxy.coap_port());

  pqch::UdpSocket client(0, "127.0.0.1");
  auto rpc = [&](const coap::Message& req) -> std::optional<coap::Message> {
    client.send_to(proxy_addr, coap::encode(req));
    for (int i = 0; i < 100; i++) {
      auto got = client.recv_from(50);
      if (got) return coap::decode(got->second);
    }
    return std::nullopt;
  };

  SUBCASE("confirmable GET over plain CoAP") {
    coap::Message req = proxy_get(base + "/random_number/16");
    auto resp = rpc(req);
    REQUIRE(resp.has_value());
    CHECK(resp->type == coap::MsgType::Ack);
    CHECK(resp->message_id == req.message_id);
    CHECK(resp->token == req.token);
    CHECK(resp->code == coap::Code::Content);
    json body = json::parse(to_string(resp->payload));
    CHECK(body["num_bytes"] == 16);
    // First backend read: the seeded stream's first 16 bytes.
    pool::DeterministicTestSource twin(9);
    CHECK(hex_decode(body["random_bytes"].get<std::string>()) == twin.read(16));
    CHECK(coap::match_response(req, *resp));
  }

  SUBCASE("non-confirmable GET gets a NON response") {
    coap::Message req = proxy_get(base + "/random_number/4", coap::MsgType::NonConfirmable);
    auto resp = rpc(req);
    REQUIRE(resp.has_value());
    CHECK(resp->type == coap::MsgType::NonConfirmable);
    CHECK(resp->token == req.token);
    CHECK(resp->code == coap::Code::Content);
    CHECK(coap::match_response(req, *resp));
  }

  SUBCASE("backend 400 surfaces as 4.00") {
    auto resp = rpc(proxy_get(base + "/random_number/0"));
    REQUIRE(resp.has_value());
    CHECK(resp->code == coap::Code::BadRequest);
  }

  SUBCASE("allowlist blocks foreign backends") {
    auto resp = rpc(proxy_get("http://127.0.0.1:1/pwn"));
    REQUIRE(resp.has_value());
    CHECK(resp->code == coap::Code::BadRequest);
  }

  SUBCASE("POST is refused") {
    coap::Message req = proxy_get(base + "/random_number/4");
    req.code = static_cast<coap::Code>(0x02);  // 0.02 POST
    auto resp = rpc(req);
    REQUIRE(resp.has_value());
    CHECK(resp->code == coap::Code::MethodNotAllowed);
  }

  SUBCASE("CoAP ping and noise") {
    // Empty CON → RST echoing the MID.
    coap::Message ping;
    ping.type = coap::MsgType::Confirmable;
    ping.code = coap::Code::Empty;
    ping.message_id = 0xbeef;
    auto rst = rpc(ping);
    REQUIRE(rst.has_value());
    CHECK(rst->type == coap::MsgType::Reset);
    CHECK(rst->message_id == 0xbeef);
    CHECK(rst->code == coap::Code::Empty);

    // Stray ACK and undecodable garbage: silence.
    coap::Message stray;
    stray.type = coap::MsgType::Ack;
    stray.message_id = 1;
    client.send_to(proxy_addr, coap::encode(stray));
    client.send_to(proxy_addr, to_bytes("\xff garbage"));
    CHECK(!client.recv_from(200).has_value());
  }

  SUBCASE("secure listener serves the same mapping") {
    pqch::UdpClientTransport transport("127.0.0.1", proxy.coaps_port());
    pqch::ClientChannel channel(transport, config.handshake);
    coap::Message req = proxy_get(base + "/random_number/8");
    channel.connect_with_first_request(coap::encode(req));
    auto wire = channel.recv_app(3000);
    REQUIRE(wire.has_value());
    coap::Message resp = coap::decode(*wire);
    CHECK(resp.code == coap::Code::Content);
    CHECK(resp.token == req.token);
    CHECK(resp.message_id == req.message_id);
    json body = json::parse(to_string(resp.payload));
    CHECK(body["num_bytes"] == 8);
    CHECK(body["random_bytes"].get<std::string>().size() == 16);
    channel.close();
  }

  SUBCASE("backend down maps to 5.04") {
    svc.stop();
    auto resp = rpc(proxy_get(base + "/random_number/16"));
    REQUIRE(resp.has_value());
    CHECK(resp->code == coap::Code::GatewayTimeout);
  }

  CHECK(proxy.requests_served() >= 1);
  proxy.stop();
  svc.stop();
}
