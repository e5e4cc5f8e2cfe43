// Copyright 2026 The vmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "vmsim/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <future>
#include <mutex>
#include <spdlog/spdlog.h>
#include <stdexcept>
#include <thread>

namespace vmsim {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

Endpoint ParseEndpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw std::invalid_argument("bind address must look like host:port, got \"" +
                                std::string(text) + "\"");
  }
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  const std::string_view port = text.substr(colon + 1);
  unsigned value = 0;
  const auto res = std::from_chars(port.data(), port.data() + port.size(), value);
  if (res.ec != std::errc() || res.ptr != port.data() + port.size() || value > 65535) {
    throw std::invalid_argument("invalid port \"" + std::string(port) + "\"");
  }
  e.port = static_cast<unsigned short>(value);
  return e;
}

// --- server ---------------------------------------------------------------

class SessionServer::Impl {
 public:
  class Connection;

  Impl(SessionHandler& handler, const Endpoint& endpoint, ServerOptions options)
      : handler_(handler), options_(options), acceptor_(ioc_), flush_timer_(ioc_) {
    boost::system::error_code ec;
    const auto address = net::ip::make_address(endpoint.host, ec);
    if (ec) throw std::runtime_error("cannot parse bind host " + endpoint.host + ": " + ec.message());
    const tcp::endpoint ep(address, endpoint.port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
      throw std::runtime_error("cannot bind " + endpoint.host + ":" +
                               std::to_string(endpoint.port) + ": " + ec.message());
    }
  }

  ~Impl() { Stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void Start() {
    if (thread_.joinable()) return;
    DoAccept();
    ScheduleFlush();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  void Stop() {
    if (!thread_.joinable()) return;
    std::promise<void> closed;
    net::post(ioc_, [this, &closed] {
      boost::system::error_code ignored;
      acceptor_.close(ignored);
      flush_timer_.cancel();
      active_.reset();
      closed.set_value();
    });
    closed.get_future().wait_for(std::chrono::seconds(1));
    ioc_.stop();
    thread_.join();
  }

  SessionHandler& handler() { return handler_; }
  const ServerOptions& options() const { return options_; }
  void Release(const Connection* c);

 private:
  void DoAccept();
  void ScheduleFlush();

  SessionHandler& handler_;
  ServerOptions options_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  net::steady_timer flush_timer_;
  std::thread thread_;
  std::shared_ptr<Connection> active_;
};

class SessionServer::Impl::Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Impl& server) : ws_(std::move(socket)), server_(server) {}

  // An operator connection opens the session; any other is turned away
  // with a busy error.
  void Run(bool operator_slot) {
    operator_ = operator_slot;
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->OnAccept(ec); });
  }

  void Enqueue(std::vector<OutFrame> frames) {
    if (closed_) return;
    for (auto& f : frames) {
      queue_.push_back(EncodeMessage(Message{f.kind, ++seq_, f.ack, std::move(f.payload)}));
    }
    // The front frame may be in flight; drop from just behind it.
    const std::size_t keep_front = writing_ ? 1 : 0;
    while (queue_.size() > server_.options().write_queue_limit + keep_front) {
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(keep_front));
    }
    DoWrite();
  }

  bool opened() const { return opened_; }

 private:
  void OnAccept(beast::error_code ec) {
    if (ec) {
      Closed();
      return;
    }
    if (!operator_) {
      Enqueue({OutFrame{MessageKind::kError,
                        ErrorPayload(ProtocolError("busy", "another operator is connected"),
                                     std::nullopt),
                        std::nullopt}});
      close_after_write_ = true;
      return;
    }
    spdlog::info("operator connected");
    opened_ = true;
    server_.handler().OnOpen();
    DoRead();
  }

  void DoRead() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->OnRead(ec);
    });
  }

  void OnRead(beast::error_code ec) {
    if (ec) {
      Closed();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    Enqueue(server_.handler().OnText(text));
    DoRead();
  }

  void DoWrite() {
    if (writing_ || closed_) return;
    if (queue_.empty()) {
      if (close_after_write_) {
        ws_.async_close(websocket::close_code::try_again_later,
                        [self = shared_from_this()](beast::error_code) { self->Closed(); });
      }
      return;
    }
    writing_ = true;
    ws_.async_write(net::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->OnWrite(ec);
                    });
  }

  void OnWrite(beast::error_code ec) {
    writing_ = false;
    queue_.pop_front();
    if (ec) {
      Closed();
      return;
    }
    DoWrite();
  }

  void Closed() {
    if (closed_) return;
    closed_ = true;
    if (opened_) {
      spdlog::info("operator disconnected");
      server_.handler().OnClose();
    }
    if (operator_) server_.Release(this);
  }

  websocket::stream<tcp::socket> ws_;
  Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::uint64_t seq_ = 0;
  bool operator_ = false;
  bool opened_ = false;
  bool writing_ = false;
  bool closed_ = false;
  bool close_after_write_ = false;
};

void SessionServer::Impl::Release(const Connection* c) {
  if (active_.get() == c) active_.reset();
}

void SessionServer::Impl::DoAccept() {
  acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto c = std::make_shared<Connection>(std::move(socket), *this);
    const bool operator_slot = active_ == nullptr;
    if (operator_slot) active_ = c;
    c->Run(operator_slot);
    DoAccept();
  });
}

void SessionServer::Impl::ScheduleFlush() {
  flush_timer_.expires_after(options_.flush_period);
  flush_timer_.async_wait([this](beast::error_code ec) {
    if (ec) return;
    std::vector<OutFrame> frames = handler_.Drain();
    if (active_ && active_->opened()) active_->Enqueue(std::move(frames));
    ScheduleFlush();
  });
}

SessionServer::SessionServer(SessionHandler& handler, const Endpoint& endpoint,
                             ServerOptions options)
    : impl_(std::make_unique<Impl>(handler, endpoint, options)) {}

SessionServer::~SessionServer() = default;

unsigned short SessionServer::port() const { return impl_->port(); }
void SessionServer::Start() { impl_->Start(); }
void SessionServer::Stop() { impl_->Stop(); }

// --- client ---------------------------------------------------------------

class SessionClient::Impl {
 public:
  Impl(const std::string& host, unsigned short port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    const auto results = resolver.resolve(host, std::to_string(port));
    net::connect(ws_.next_layer(), results);
    ws_.handshake(host, "/");
    ws_.text(true);
    DoRead();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  ~Impl() { Close(); }

  void Send(const std::string& text) {
    std::promise<beast::error_code> done;
    net::post(ioc_, [&] {
      ws_.async_write(net::buffer(text),
                      [&](beast::error_code ec, std::size_t) { done.set_value(ec); });
    });
    const beast::error_code ec = done.get_future().get();
    if (ec) throw std::runtime_error("send failed: " + ec.message());
  }

  std::string Receive(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || closed_; });
    if (inbox_.empty()) return {};
    std::string out = std::move(inbox_.front());
    inbox_.pop_front();
    return out;
  }

  void Close() {
    if (!thread_.joinable()) return;
    std::promise<void> done;
    net::post(ioc_, [&] {
      ws_.async_close(websocket::close_code::normal,
                      [&](beast::error_code) { done.set_value(); });
    });
    done.get_future().wait_for(std::chrono::seconds(1));
    ioc_.stop();
    thread_.join();
  }

 private:
  void DoRead() {
    ws_.async_read(buffer_, [this](beast::error_code ec, std::size_t) {
      std::lock_guard lock(mutex_);
      if (ec) {
        closed_ = true;
        cv_.notify_all();
        return;
      }
      inbox_.push_back(beast::buffers_to_string(buffer_.data()));
      buffer_.consume(buffer_.size());
      cv_.notify_all();
      DoRead();
    });
  }

  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::thread thread_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
  bool closed_ = false;
};

SessionClient::SessionClient(const std::string& host, unsigned short port)
    : impl_(std::make_unique<Impl>(host, port)) {}

SessionClient::~SessionClient() = default;

void SessionClient::SendText(const std::string& text) { impl_->Send(text); }

std::uint64_t SessionClient::Send(MessageKind kind, const nlohmann::json& payload) {
  const std::uint64_t seq = next_seq_++;
  impl_->Send(EncodeMessage(Message{kind, seq, std::nullopt, payload}));
  return seq;
}

std::string SessionClient::Receive(std::chrono::milliseconds timeout) {
  return impl_->Receive(timeout);
}

void SessionClient::Close() { impl_->Close(); }

}  // namespace vmsim
