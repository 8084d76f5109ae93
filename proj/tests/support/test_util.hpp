#pragma once
// Shared helpers for the unit and acceptance suites: frozen-vector loading,
// deterministic randomness, scratch directories, and an in-memory
// client/server channel rig with fault-injection hooks.

#include "qeaas/bytes.hpp"
#include "qeaas/pqch/channel.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

namespace qeaas::test {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  nlohmann::json doc;
  f >> doc;
  return doc;
}

inline nlohmann::json load_vector(const std::string& name) {
  return load_json_file(std::string(QEAAS_VECTOR_DIR) + "/" + name);
}

inline std::string data_file(const std::string& name) {
  return std::string(QEAAS_DATA_DIR) + "/" + name;
}

inline Bytes H(const std::string& hex) { return hex_decode(hex); }

// Deterministic byte generator for property tests.
class TestRng {
 public:
  explicit TestRng(uint64_t seed) : gen_(seed) {}
  uint64_t u64() { return gen_(); }
  uint32_t below(uint32_t n) { return static_cast<uint32_t>(gen_() % n); }
  bool coin() { return (gen_() & 1) != 0; }
  Bytes bytes(size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<uint8_t>(gen_());
    return out;
  }

 private:
  std::mt19937_64 gen_;
};

// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("qeaas-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Runs a ServerChannel against the server side of an in-memory transport
// pair on a pump thread; the client side is handed to a ClientChannel.
// Application data is answered through `app_handler` (echo by default).
class MemoryServerRig {
 public:
  using AppHandler = std::function<Bytes(const Bytes&)>;

  MemoryServerRig(pqch::HandshakeConfig config, pqch::KeyStore store)
      : channel_(config, std::move(store)) {
    auto [client, server] = pqch::make_memory_pair();
    client_side_ = std::move(client);
    server_side_ = std::move(server);
    thread_ = std::thread([this] { pump(); });
  }
  ~MemoryServerRig() { stop(); }
  MemoryServerRig(const MemoryServerRig&) = delete;
  MemoryServerRig& operator=(const MemoryServerRig&) = delete;

  pqch::MemoryEndpoint& client_transport() { return *client_side_; }
  pqch::MemoryEndpoint& server_endpoint() { return *server_side_; }

  void set_app_handler(AppHandler h) {
    std::lock_guard<std::mutex> lk(m_);
    app_handler_ = std::move(h);
  }
  size_t session_count() {
    std::lock_guard<std::mutex> lk(m_);
    return channel_.session_count();
  }
  bool established() {
    std::lock_guard<std::mutex> lk(m_);
    return channel_.has_established(kPeer);
  }
  void send_app(ByteView plaintext) {
    std::lock_guard<std::mutex> lk(m_);
    server_side_->send(channel_.seal_app(kPeer, plaintext).datagram);
  }

  void stop() {
    if (stopped_.exchange(true)) return;
    if (thread_.joinable()) thread_.join();
  }

  static constexpr const char* kPeer = "mem-client";

 private:
  void pump() {
    while (!stopped_) {
      auto dgram = server_side_->recv(5);
      uint64_t now = pqch::steady_now_ms();
      std::vector<pqch::ServerChannel::Outbound> outs;
      std::vector<Bytes> replies;
      {
        std::lock_guard<std::mutex> lk(m_);
        if (dgram) outs = channel_.on_datagram(kPeer, *dgram, now);
        auto ticked = channel_.on_tick(now);
        outs.insert(outs.end(), ticked.begin(), ticked.end());
        for (auto& in : channel_.take_app_data()) {
          Bytes rsp = app_handler_ ? app_handler_(in.plaintext) : in.plaintext;
          replies.push_back(channel_.seal_app(in.peer, rsp).datagram);
        }
      }
      for (auto& o : outs) server_side_->send(o.datagram);
      for (auto& r : replies) server_side_->send(r);
    }
  }

  pqch::ServerChannel channel_;
  std::unique_ptr<pqch::MemoryEndpoint> client_side_;
  std::unique_ptr<pqch::MemoryEndpoint> server_side_;
  std::mutex m_;
  AppHandler app_handler_;
  std::atomic<bool> stopped_{false};
  std::thread thread_;
};

inline pqch::HandshakeConfig fast_config(pqch::KexAlg kex = pqch::KexAlg::MLKEM512,
                                         pqch::SigAlg sig = pqch::SigAlg::MLDSA44,
                                         pqch::VerifyMode verify = pqch::VerifyMode::NoVerify) {
  pqch::HandshakeConfig c;
  c.kex = kex;
  c.sig = sig;
  c.verify_mode = verify;
  c.retransmit_timeout_ms = 80;
  c.max_retransmits = 3;
  return c;
}

}  // namespace qeaas::test
