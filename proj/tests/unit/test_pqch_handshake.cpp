// Handshake state machines end to end over the in-memory transport: the full
// algorithm matrix, flight structure, statelessness, loss recovery,
// tampering, algorithm mismatch, and the UDP driver.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qeaas/pqch/channel.hpp"

#include "test_util.hpp"

#include <atomic>
#include <thread>

using namespace qeaas;
using namespace qeaas::pqch;
using qeaas::test::fast_config;
using qeaas::test::MemoryServerRig;
using qeaas::test::TestRng;

namespace {

using Kind = ChannelError::Kind;

template <typename F>
Kind error_kind(F&& f) {
  try {
    f();
  } catch (const ChannelError& e) {
    return e.kind;
  }
  FAIL("expected a ChannelError");
  return Kind::Config;
}

// Send hook flipping one byte inside the body of the first fragment of the
// given handshake message; all other traffic passes through untouched.
MemoryEndpoint::Hook tamper_message(MsgType target, size_t byte_index) {
  return [target, byte_index](Bytes& dgram) {
    std::vector<Record> records;
    try {
      records = split_datagram(dgram);
    } catch (const WireError&) {
      return true;
    }
    bool changed = false;
    Bytes rebuilt;
    for (const Record& r : records) {
      Bytes body = r.body;
      if (!changed && r.type == RecordType::Handshake) {
        try {
          Fragment f = decode_fragment(r.body);
          if (f.msg_type == target && !f.bytes.empty()) {
            f.bytes[byte_index % f.bytes.size()] ^= 0x01;
            body = encode_fragment(f);
            changed = true;
          }
        } catch (const WireError&) {
        }
      }
      Bytes rec = encode_record(r.type, r.epoch, r.seq, body);
      rebuilt.insert(rebuilt.end(), rec.begin(), rec.end());
    }
    if (changed) dgram = rebuilt;
    return true;
  };
}

Bytes single_message_datagram(MsgType type, const Bytes& body, size_t mtu = 1400) {
  uint64_t seq = 0;
  DatagramPacker packer(mtu);
  for (const Bytes& rec : fragment_message({type, body}, mtu, seq)) packer.add_record(rec);
  auto dgrams = packer.take();
  REQUIRE(dgrams.size() == 1);
  return dgrams.front();
}

}  // namespace

TEST_CASE("full handshake matrix: every kex x sig x verify combination") {
  for (SigAlg sig : {SigAlg::MLDSA44, SigAlg::ECDSA_P256}) {
    TestPki pki = make_test_pki(sig);
    for (KexAlg kex : {KexAlg::MLKEM512, KexAlg::X25519, KexAlg::P256}) {
      for (VerifyMode verify : {VerifyMode::NoVerify, VerifyMode::FullChain}) {
        INFO(to_string(kex), "+", to_string(sig), "+", to_string(verify));
        HandshakeConfig config = fast_config(kex, sig, verify);
        MemoryServerRig rig(config, pki.store);
        std::optional<Certificate> anchor;
        if (verify == VerifyMode::FullChain) anchor = pki.trust_anchor;

        ClientChannel client(rig.client_transport(), config, anchor);
        CHECK(!client.established());
        client.connect();
        CHECK(client.established());
        // Exactly three client flights: ClientHello1, ClientHello2, Finished.
        CHECK(client.handshake_datagrams_sent() == 3);
        CHECK(client.session().peer_identity == "qeaas-proxy");
        CHECK(client.session().transcript_hash.size() == 32);

        client.send_app(to_bytes("hello"));
        auto echoed = client.recv_app(2000);
        REQUIRE(echoed.has_value());
        CHECK(*echoed == to_bytes("hello"));
        client.close();
        rig.stop();
      }
    }
  }
}

TEST_CASE("first request rides the third flight") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::P256, SigAlg::ECDSA_P256);
  MemoryServerRig rig(config, pki.store);

  std::atomic<int> client_datagrams{0};
  std::atomic<bool> coalesced{false};
  rig.client_transport().set_send_hook([&](Bytes& dgram) {
    int n = ++client_datagrams;
    if (n == 3) {
      bool has_handshake = false, has_app = false;
      for (const Record& r : split_datagram(dgram)) {
        has_handshake |= r.type == RecordType::Handshake;
        has_app |= r.type == RecordType::AppData;
      }
      coalesced = has_handshake && has_app;
    }
    return true;
  });

  ClientChannel client(rig.client_transport(), config);
  client.connect_with_first_request(to_bytes("GET entropy"));
  CHECK(client.handshake_datagrams_sent() == 3);
  CHECK(client_datagrams.load() == 3);
  CHECK(coalesced.load());

  // The echo of the coalesced request arrives without a separate send.
  auto rsp = client.recv_app(2000);
  REQUIRE(rsp.has_value());
  CHECK(*rsp == to_bytes("GET entropy"));
  client.close();
  rig.stop();
}

TEST_CASE("force_hrr disabled: two client flights, no cookie round trip") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::X25519, SigAlg::ECDSA_P256);
  config.force_hrr = false;
  MemoryServerRig rig(config, pki.store);

  ClientChannel client(rig.client_transport(), config);
  client.connect();
  CHECK(client.established());
  CHECK(client.handshake_datagrams_sent() == 2);

  client.send_app(to_bytes("direct"));
  auto rsp = client.recv_app(2000);
  REQUIRE(rsp.has_value());
  CHECK(*rsp == to_bytes("direct"));
  client.close();
  rig.stop();
}

TEST_CASE("handshake completes across a small MTU (multi-record server flight)") {
  TestPki pki = make_test_pki(SigAlg::MLDSA44);
  HandshakeConfig config = fast_config(KexAlg::X25519, SigAlg::MLDSA44);
  config.mtu_bytes = 600;  // the ML-DSA chain and signature must fragment
  MemoryServerRig rig(config, pki.store);

  // Count server datagrams to confirm the flight actually fragmented.
  std::atomic<int> server_datagrams{0};
  rig.server_endpoint().set_send_hook([&](Bytes&) {
    ++server_datagrams;
    return true;
  });

  ClientChannel client(rig.client_transport(), config);
  client.connect();
  CHECK(client.established());
  CHECK(client.handshake_datagrams_sent() == 3);  // client messages still fit
  CHECK(server_datagrams.load() > 4);  // HRR + a many-datagram flight

  TestRng rng(0x477);
  Bytes big = rng.bytes(4096);
  client.send_app(big);
  auto rsp = client.recv_app(2000);
  REQUIRE(rsp.has_value());
  CHECK(*rsp == big);
  client.close();
  rig.stop();
}

TEST_CASE("an MTU too small for the key share fails fast instead of timing out") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::MLKEM512, SigAlg::ECDSA_P256);
  config.mtu_bytes = 600;  // an 800-byte ML-KEM share cannot fit one record
  MemoryServerRig rig(config, pki.store);
  ClientChannel client(rig.client_transport(), config);
  CHECK(error_kind([&] { client.connect(); }) == Kind::Config);
  rig.stop();
}

TEST_CASE("server keeps no state for ClientHello1 and resends its flight on duplicate ClientHello2") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::P256, SigAlg::ECDSA_P256);
  ServerChannel server(config, pki.store);
  const std::string peer = "198.51.100.7:40001";
  const uint64_t now = 1'000'000;
  TestRng rng(0x5e4e);

  HelloBody hello;
  hello.random = rng.bytes(32);
  hello.kex = config.kex;
  hello.sig = config.sig;
  hello.verify_mode = config.verify_mode;
  Bytes ch1_body = encode_hello(hello);

  auto hrr = server.on_datagram(peer, single_message_datagram(MsgType::ClientHello1, ch1_body), now);
  REQUIRE(hrr.size() == 1);
  CHECK(server.session_count() == 0);  // stateless until the cookie returns

  Fragment hrr_frag = decode_fragment(split_datagram(hrr[0].datagram)[0].body);
  REQUIRE(hrr_frag.msg_type == MsgType::HelloRetry);
  Bytes cookie = decode_hrr_body(hrr_frag.bytes);
  CHECK(cookie.size() == kCookieBytes);

  ClientKex kex(config.kex);
  hello.cookie = cookie;
  hello.kex_share = kex.share();
  Bytes ch2_dgram = single_message_datagram(MsgType::ClientHello2, encode_hello(hello));

  auto flight = server.on_datagram(peer, ch2_dgram, now + 50);
  REQUIRE(!flight.empty());
  CHECK(server.session_count() == 1);

  // Byte-identical resend: no re-encapsulation, no new session.
  auto again = server.on_datagram(peer, ch2_dgram, now + 100);
  REQUIRE(again.size() == flight.size());
  for (size_t i = 0; i < flight.size(); i++) CHECK(again[i].datagram == flight[i].datagram);
  CHECK(server.session_count() == 1);

  // The same ClientHello2 from a different address fails cookie verification
  // (the MAC binds the peer) and is answered with a fresh HelloRetry.
  auto other = server.on_datagram("203.0.113.9:555", ch2_dgram, now + 150);
  REQUIRE(other.size() == 1);
  Fragment other_frag = decode_fragment(split_datagram(other[0].datagram)[0].body);
  CHECK(other_frag.msg_type == MsgType::HelloRetry);
  CHECK(server.session_count() == 1);
}

TEST_CASE("a HelloRetry after ClientHello2 is a fatal cookie rejection") {
  auto [client_end, server_end] = make_memory_pair();
  MemoryEndpoint* srv = server_end.get();

  // Fake server: answers ClientHello1 with a well-formed HelloRetry, then
  // answers ClientHello2 with another HelloRetry instead of its flight.
  std::thread fake([srv] {
    Bytes secret(32, 0x42);
    auto answer_with_hrr = [&](const Bytes& dgram) {
      auto records = split_datagram(dgram);
      Fragment f = decode_fragment(records[0].body);
      Bytes hash = message_hash(MsgType::ClientHello1, f.bytes);
      if (f.msg_type == MsgType::ClientHello2) hash = message_hash(MsgType::ClientHello2, f.bytes);
      Bytes cookie = mint_cookie(secret, "fake", hash, 1000);
      uint64_t seq = 0;
      DatagramPacker packer(1400);
      for (const Bytes& rec :
           fragment_message({MsgType::HelloRetry, encode_hrr_body(cookie)}, 1400, seq))
        packer.add_record(rec);
      for (const Bytes& d : packer.take()) srv->send(d);
    };
    for (int i = 0; i < 2; i++) {
      auto dgram = srv->recv(3000);
      if (!dgram) return;
      answer_with_hrr(*dgram);
    }
  });

  ClientChannel client(*client_end, fast_config());
  CHECK(error_kind([&] { client.connect(); }) == Kind::CookieRejected);
  CHECK(!client.established());
  fake.join();
}

TEST_CASE("tampered HelloRetry cookie is rejected") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::P256, SigAlg::ECDSA_P256);

  // Cookie layout inside the HelloRetry datagram: record header (11) +
  // fragment header (10) + cookie_len (2) + ts(8) ‖ ch1_hash(32) ‖ mac(32).
  auto flip_hrr_byte = [](size_t offset) {
    return [offset](Bytes& dgram) {
      if (dgram.size() > kRecordHeaderBytes && dgram[0] == 0x01 &&
          dgram[kRecordHeaderBytes] == static_cast<uint8_t>(MsgType::HelloRetry))
        dgram[offset] ^= 0x01;
      return true;
    };
  };

  SUBCASE("modified ch1_hash: the cookie no longer binds our ClientHello") {
    MemoryServerRig rig(config, pki.store);
    rig.server_endpoint().set_send_hook(flip_hrr_byte(11 + 10 + 2 + 8));
    ClientChannel client(rig.client_transport(), config);
    CHECK(error_kind([&] { client.connect(); }) == Kind::CookieRejected);
    rig.stop();
  }

  SUBCASE("modified MAC: the server refuses the echoed cookie") {
    MemoryServerRig rig(config, pki.store);
    rig.server_endpoint().set_send_hook(flip_hrr_byte(11 + 10 + 2 + 8 + 32 + 5));
    ClientChannel client(rig.client_transport(), config);
    // The client cannot tell the cookie was altered (it is opaque server
    // state), but the server answers the second hello with a fresh
    // HelloRetry, which the client must treat as fatal.
    CHECK(error_kind([&] { client.connect(); }) == Kind::CookieRejected);
    rig.stop();
  }
}

TEST_CASE("loss recovery") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::P256, SigAlg::ECDSA_P256);

  SUBCASE("lost ClientHello2 is retransmitted by the client") {
    MemoryServerRig rig(config, pki.store);
    std::atomic<bool> dropped{false};
    rig.client_transport().set_send_hook([&](Bytes& dgram) {
      if (!dropped && dgram[0] == 0x01 &&
          dgram[kRecordHeaderBytes] == static_cast<uint8_t>(MsgType::ClientHello2)) {
        dropped = true;
        return false;
      }
      return true;
    });
    ClientChannel client(rig.client_transport(), config);
    client.connect();
    CHECK(client.established());
    CHECK(dropped.load());
    CHECK(client.handshake_datagrams_sent() == 4);  // one extra ClientHello2
    client.close();
    rig.stop();
  }

  SUBCASE("lost server flight triggers a duplicate ClientHello2, answered from stored state") {
    MemoryServerRig rig(config, pki.store);
    std::atomic<int> server_hello_seen{0};
    rig.server_endpoint().set_send_hook([&](Bytes& dgram) {
      if (dgram[0] == 0x01 &&
          dgram[kRecordHeaderBytes] == static_cast<uint8_t>(MsgType::ServerHello))
        if (++server_hello_seen == 1) return false;  // drop the first copy
      return true;
    });
    ClientChannel client(rig.client_transport(), config);
    client.connect();
    CHECK(client.established());
    CHECK(server_hello_seen.load() >= 2);
    client.send_app(to_bytes("after loss"));
    auto rsp = client.recv_app(2000);
    REQUIRE(rsp.has_value());
    CHECK(*rsp == to_bytes("after loss"));
    client.close();
    rig.stop();
  }

  SUBCASE("lost client Finished is re-sent when the server retransmits") {
    MemoryServerRig rig(config, pki.store);
    std::atomic<bool> dropped{false};
    rig.client_transport().set_send_hook([&](Bytes& dgram) {
      if (!dropped && dgram[0] == 0x01 &&
          dgram[kRecordHeaderBytes] == static_cast<uint8_t>(MsgType::FinishedClient)) {
        dropped = true;
        return false;
      }
      return true;
    });
    ClientChannel client(rig.client_transport(), config);
    client.connect();  // completes from the client's view; the server still waits
    CHECK(dropped.load());
    // recv_app observes the server's flight retransmission and answers with
    // the stored final flight, which establishes the server side.
    client.recv_app(400);
    CHECK(rig.established());
    client.send_app(to_bytes("recovered"));
    auto rsp = client.recv_app(2000);
    REQUIRE(rsp.has_value());
    CHECK(*rsp == to_bytes("recovered"));
    client.close();
    rig.stop();
  }

  SUBCASE("black hole times out after max_retransmits") {
    MemoryServerRig rig(config, pki.store);
    rig.client_transport().set_send_hook([](Bytes&) { return false; });
    ClientChannel client(rig.client_transport(), config);
    CHECK(error_kind([&] { client.connect(); }) == Kind::Timeout);
    CHECK(!client.established());
    rig.stop();
  }
}

TEST_CASE("tampered server flight aborts the handshake") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);

  struct Case {
    MsgType target;
    size_t byte_index;
    std::vector<Kind> accepted;
  };
  // clang-format off
  std::vector<Case> cases = {
      // Key-exchange payload: the transcript signature no longer verifies
      // (CertVerify covers the hello), or the point/ct is structurally
      // invalid (kex failure), or keys diverge (bad Finished).
      {MsgType::ServerHello,    40, {Kind::BadSignature, Kind::KexFailure, Kind::BadFinishedMac}},
      // Certificate bytes: transcript signature breaks, or the TLV no longer
      // parses.
      {MsgType::Certificate,    30, {Kind::BadSignature, Kind::Decode}},
      // CertVerify signature bytes: checked even in no-verify mode.
      {MsgType::CertVerify,      8, {Kind::BadSignature}},
      {MsgType::FinishedServer,  3, {Kind::BadFinishedMac}},
  };
  // clang-format on

  for (KexAlg kex : {KexAlg::MLKEM512, KexAlg::X25519, KexAlg::P256}) {
    for (const Case& c : cases) {
      INFO(to_string(kex), " tampering msg type ", static_cast<int>(c.target));
      HandshakeConfig config = fast_config(kex, SigAlg::ECDSA_P256);
      MemoryServerRig rig(config, pki.store);
      rig.server_endpoint().set_send_hook(tamper_message(c.target, c.byte_index));
      ClientChannel client(rig.client_transport(), config);
      Kind kind = error_kind([&] { client.connect(); });
      CHECK(std::find(c.accepted.begin(), c.accepted.end(), kind) != c.accepted.end());
      CHECK(!client.established());
      rig.stop();
    }
  }
}

TEST_CASE("tampered ClientHello2 never yields a session") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  for (KexAlg kex : {KexAlg::MLKEM512, KexAlg::X25519, KexAlg::P256}) {
    INFO(to_string(kex));
    HandshakeConfig config = fast_config(kex, SigAlg::ECDSA_P256);
    MemoryServerRig rig(config, pki.store);
    // Flip a byte inside the key share (random(32) + ids(3) + cookie_len(2) +
    // cookie(72) + share_len(2) puts the share at offset 111 of the body).
    rig.client_transport().set_send_hook(tamper_message(MsgType::ClientHello2, 120));
    ClientChannel client(rig.client_transport(), config);
    CHECK_THROWS_AS(client.connect(), ChannelError);
    CHECK(!client.established());
    CHECK(!rig.established());
    rig.stop();
  }
}

TEST_CASE("algorithm mismatch is refused with an alert") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig server_config = fast_config(KexAlg::MLKEM512, SigAlg::ECDSA_P256);

  SUBCASE("key-exchange mismatch") {
    MemoryServerRig rig(server_config, pki.store);
    ClientChannel client(rig.client_transport(), fast_config(KexAlg::X25519, SigAlg::ECDSA_P256));
    CHECK(error_kind([&] { client.connect(); }) == Kind::AlertReceived);
    rig.stop();
  }
  SUBCASE("verify-mode mismatch") {
    MemoryServerRig rig(server_config, pki.store);
    HandshakeConfig client_config =
        fast_config(KexAlg::MLKEM512, SigAlg::ECDSA_P256, VerifyMode::FullChain);
    ClientChannel client(rig.client_transport(), client_config, pki.trust_anchor);
    CHECK(error_kind([&] { client.connect(); }) == Kind::AlertReceived);
    rig.stop();
  }
}

TEST_CASE("full-chain verification rejects an unknown issuer that no-verify accepts") {
  TestPki pki = make_test_pki(SigAlg::MLDSA44);
  Identity rogue_ca = make_ca(SigAlg::MLDSA44, "rogue-root");

  SUBCASE("wrong trust anchor fails closed") {
    HandshakeConfig config = fast_config(KexAlg::MLKEM512, SigAlg::MLDSA44, VerifyMode::FullChain);
    MemoryServerRig rig(config, pki.store);
    ClientChannel client(rig.client_transport(), config, rogue_ca.cert);
    CHECK(error_kind([&] { client.connect(); }) == Kind::BadCertificate);
    CHECK(!client.established());
    rig.stop();
  }
  SUBCASE("no-verify accepts the same chain (transcript signature still checked)") {
    HandshakeConfig config = fast_config(KexAlg::MLKEM512, SigAlg::MLDSA44, VerifyMode::NoVerify);
    MemoryServerRig rig(config, pki.store);
    ClientChannel client(rig.client_transport(), config);
    client.connect();
    CHECK(client.established());
    client.close();
    rig.stop();
  }
}

TEST_CASE("replayed and garbage application records are dropped silently") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::P256, SigAlg::ECDSA_P256);
  MemoryServerRig rig(config, pki.store);

  std::mutex cap_m;
  Bytes captured;
  rig.server_endpoint().set_send_hook([&](Bytes& dgram) {
    if (!dgram.empty() && dgram[0] == static_cast<uint8_t>(RecordType::AppData)) {
      std::lock_guard lk(cap_m);
      if (captured.empty()) captured = dgram;
    }
    return true;
  });

  ClientChannel client(rig.client_transport(), config);
  client.connect();
  client.send_app(to_bytes("ping"));
  auto first = client.recv_app(2000);
  REQUIRE(first.has_value());
  CHECK(*first == to_bytes("ping"));

  // Garbage framing and a replay of the already-consumed response: both are
  // dropped without surfacing to the application or killing the channel.
  {
    Bytes replay;
    {
      std::lock_guard lk(cap_m);
      replay = captured;
    }
    REQUIRE(!replay.empty());
    rig.client_transport().inject(to_bytes("not a record"));
    rig.client_transport().inject(replay);
  }
  CHECK(!client.recv_app(150).has_value());

  client.send_app(to_bytes("still alive"));
  auto second = client.recv_app(2000);
  REQUIRE(second.has_value());
  CHECK(*second == to_bytes("still alive"));
  client.close();
  rig.stop();
}

TEST_CASE("close() tears down both ends and permits a reconnect") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  HandshakeConfig config = fast_config(KexAlg::P256, SigAlg::ECDSA_P256);
  MemoryServerRig rig(config, pki.store);

  ClientChannel client(rig.client_transport(), config);
  client.connect();
  client.send_app(to_bytes("x"));
  REQUIRE(client.recv_app(2000).has_value());
  CHECK(rig.session_count() == 1);

  client.close();
  CHECK(!client.established());
  CHECK(error_kind([&] { client.send_app(to_bytes("y")); }) == Kind::NotEstablished);
  CHECK(error_kind([&] { (void)client.session(); }) == Kind::NotEstablished);

  // The close_notify erases the server session.
  for (int i = 0; i < 100 && rig.session_count() != 0; i++)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  CHECK(rig.session_count() == 0);

  // The same channel object can run a fresh handshake.
  client.connect();
  CHECK(client.established());
  client.send_app(to_bytes("again"));
  auto rsp = client.recv_app(2000);
  REQUIRE(rsp.has_value());
  CHECK(*rsp == to_bytes("again"));
  client.close();
  rig.stop();
}

TEST_CASE("configuration errors") {
  TestPki pki = make_test_pki(SigAlg::ECDSA_P256);
  auto [client_end, server_end] = make_memory_pair();

  // Full-chain without a trust anchor.
  HandshakeConfig fc = fast_config(KexAlg::P256, SigAlg::ECDSA_P256, VerifyMode::FullChain);
  CHECK(error_kind([&] { ClientChannel c(*client_end, fc); }) == Kind::Config);

  // MTU below the floor.
  HandshakeConfig tiny = fast_config();
  tiny.mtu_bytes = 128;
  CHECK_THROWS_AS(ClientChannel(*client_end, tiny), std::invalid_argument);

  // Key store algorithm must match the configured signature algorithm.
  CHECK(error_kind([&] {
          ServerChannel s(fast_config(KexAlg::P256, SigAlg::MLDSA44), pki.store);
        }) == Kind::Config);

  // Short cookie secret.
  KeyStore weak = pki.store;
  weak.cookie_secret = Bytes(8, 0x01);
  CHECK(error_kind([&] {
          ServerChannel s(fast_config(KexAlg::P256, SigAlg::ECDSA_P256), weak);
        }) == Kind::Config);
}

TEST_CASE("UDP driver serves real sockets") {
  TestPki pki = make_test_pki(SigAlg::MLDSA44);
  HandshakeConfig config = fast_config(KexAlg::MLKEM512, SigAlg::MLDSA44, VerifyMode::FullChain);
  UdpServerDriver driver(0, config, pki.store, "127.0.0.1");
  REQUIRE(driver.port() != 0);

  std::mutex peer_m;
  std::string seen_peer;
  driver.set_handler([&driver, &peer_m, &seen_peer](const std::string& peer, Bytes plaintext) {
    {
      std::lock_guard lk(peer_m);
      seen_peer = peer;
    }
    for (auto& b : plaintext) b = static_cast<uint8_t>(std::toupper(b));
    driver.send_app(peer, plaintext);
  });

  UdpClientTransport transport("127.0.0.1", driver.port());
  ClientChannel client(transport, config, pki.trust_anchor);
  client.connect_with_first_request(to_bytes("shout"));
  auto rsp = client.recv_app(3000);
  REQUIRE(rsp.has_value());
  CHECK(*rsp == to_bytes("SHOUT"));

  // Server-initiated push over the established session.
  {
    std::lock_guard lk(peer_m);
    REQUIRE(!seen_peer.empty());
  }
  std::string peer;
  {
    std::lock_guard lk(peer_m);
    peer = seen_peer;
  }
  driver.send_app(peer, to_bytes("push"));
  auto pushed = client.recv_app(3000);
  REQUIRE(pushed.has_value());
  CHECK(*pushed == to_bytes("push"));

  client.close();
  driver.stop();
}
