#include "wsn/events.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "wsn/error.hpp"

namespace wsn::dash {

void Subscription::validate() const {
  if (listener_id.empty()) {
    throw ValidationError("subscription: listener_id must not be empty");
  }
  if (host.empty() || port <= 0 || port > 65535) {
    throw ValidationError("subscription: bad endpoint " + host + ":" +
                          std::to_string(port));
  }
  if (topics.empty()) {
    throw ValidationError("subscription: topics must not be empty");
  }
  for (const auto& t : topics) {
    if (!kKnownTopics.contains(t)) {
      throw ValidationError("subscription: unknown topic '" + t + "'");
    }
  }
}

std::string encode_frame(const std::string& body) {
  const std::uint32_t len = static_cast<std::uint32_t>(body.size());
  std::string frame;
  frame.reserve(body.size() + 4);
  frame.push_back(static_cast<char>((len >> 24) & 0xff));
  frame.push_back(static_cast<char>((len >> 16) & 0xff));
  frame.push_back(static_cast<char>((len >> 8) & 0xff));
  frame.push_back(static_cast<char>(len & 0xff));
  frame += body;
  return frame;
}

namespace {

int connect_tcp(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  if (getaddrinfo(host.c_str(), service.c_str(), &hints, &result) != 0) {
    return -1;
  }
  int fd = -1;
  for (addrinfo* rp = result; rp != nullptr; rp = rp->ai_next) {
    fd = socket(rp->ai_family, rp->ai_socktype, rp->ai_protocol);
    if (fd < 0) continue;
    if (connect(fd, rp->ai_addr, rp->ai_addrlen) == 0) break;
    close(fd);
    fd = -1;
  }
  freeaddrinfo(result);
  if (fd >= 0) {
    timeval tv{2, 0};
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
  }
  return fd;
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n =
        send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

bool recv_exact(int fd, char* buf, std::size_t len,
                const std::atomic<bool>& stopping) {
  std::size_t got = 0;
  while (got < len) {
    if (stopping.load()) return false;
    const ssize_t n = recv(fd, buf + got, len - got, 0);
    if (n == 0) return false;
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      return false;
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

EventBus::EventBus(std::size_t queue_capacity)
    : queue_capacity_(queue_capacity) {}

EventBus::~EventBus() { stop(); }

std::string EventBus::register_listener(const Subscription& sub) {
  sub.validate();
  const int fd = connect_tcp(sub.host, sub.port);
  if (fd < 0) {
    throw TransportError("listener endpoint unreachable: " + sub.host + ":" +
                         std::to_string(sub.port));
  }
  auto listener = std::make_unique<Listener>();
  listener->sub = sub;
  listener->id = "sub-" + std::to_string(next_listener_seq_.fetch_add(1));
  listener->fd = fd;
  Listener* raw = listener.get();
  listener->worker = std::thread([this, raw] { writer_loop(raw); });

  std::lock_guard lock(mutex_);
  listeners_.push_back(std::move(listener));
  return raw->id;
}

void EventBus::publish(const std::string& topic, const Json& body) {
  Json envelope;
  envelope["topic"] = topic;
  envelope["seq"] = next_event_seq_.fetch_add(1);
  envelope["body"] = body;
  const std::string frame = encode_frame(envelope.dump());

  std::lock_guard lock(mutex_);
  for (auto& listener : listeners_) {
    if (listener->dead || !listener->sub.topics.contains(topic)) continue;
    {
      std::lock_guard qlock(listener->mutex);
      if (listener->queue.size() >= queue_capacity_) {
        listener->queue.pop_front();
        dropped_.fetch_add(1);
      }
      listener->queue.push_back(frame);
    }
    listener->cv.notify_one();
  }
}

void EventBus::writer_loop(Listener* listener) {
  for (;;) {
    std::string frame;
    {
      std::unique_lock lock(listener->mutex);
      listener->cv.wait(lock, [&] {
        return listener->stopping || !listener->queue.empty();
      });
      if (listener->queue.empty()) {
        if (listener->stopping) return;
        continue;
      }
      frame = std::move(listener->queue.front());
      listener->queue.pop_front();
    }
    if (listener->dead) {
      dropped_.fetch_add(1);
      continue;
    }
    if (send_all(listener->fd, frame)) {
      delivered_.fetch_add(1);
    } else {
      listener->dead = true;
      dropped_.fetch_add(1);
      close(listener->fd);
      listener->fd = -1;
    }
  }
}

EventBus::Counters EventBus::counters() const {
  return Counters{delivered_.load(), dropped_.load()};
}

std::size_t EventBus::listener_count() const {
  std::lock_guard lock(mutex_);
  return listeners_.size();
}

void EventBus::stop() {
  if (stopped_.exchange(true)) return;
  std::lock_guard lock(mutex_);
  for (auto& listener : listeners_) {
    {
      std::lock_guard qlock(listener->mutex);
      listener->stopping = true;
    }
    listener->cv.notify_one();
  }
  for (auto& listener : listeners_) {
    if (listener->worker.joinable()) listener->worker.join();
    if (listener->fd >= 0) close(listener->fd);
  }
}

FrameReceiver::FrameReceiver() {
  listen_fd_ = socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("frame receiver: socket() failed");
  const int one = 1;
  setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      listen(listen_fd_, 8) != 0) {
    close(listen_fd_);
    throw TransportError("frame receiver: bind/listen failed");
  }
  socklen_t len = sizeof(addr);
  getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

FrameReceiver::~FrameReceiver() { stop(); }

void FrameReceiver::accept_loop() {
  std::vector<std::thread> readers;
  while (!stopping_.load()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int rc = poll(&pfd, 1, 100);
    if (rc <= 0) continue;
    const int conn = accept(listen_fd_, nullptr, nullptr);
    if (conn < 0) continue;
    timeval tv{0, 200000};
    setsockopt(conn, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    readers.emplace_back([this, conn] {
      char header[4];
      while (!stopping_.load()) {
        if (!recv_exact(conn, header, 4, stopping_)) break;
        const std::uint32_t len =
            (static_cast<std::uint32_t>(static_cast<unsigned char>(header[0])) << 24) |
            (static_cast<std::uint32_t>(static_cast<unsigned char>(header[1])) << 16) |
            (static_cast<std::uint32_t>(static_cast<unsigned char>(header[2])) << 8) |
            static_cast<std::uint32_t>(static_cast<unsigned char>(header[3]));
        if (len > (1u << 24)) break;
        std::string body(len, '\0');
        if (!recv_exact(conn, body.data(), len, stopping_)) break;
        try {
          Json frame = Json::parse(body);
          std::lock_guard lock(mutex_);
          frames_.push_back(std::move(frame));
          cv_.notify_all();
        } catch (const Json::exception&) {
          break;
        }
      }
      close(conn);
    });
  }
  for (auto& r : readers) {
    if (r.joinable()) r.join();
  }
}

std::vector<Json> FrameReceiver::frames() const {
  std::lock_guard lock(mutex_);
  return frames_;
}

std::size_t FrameReceiver::frame_count() const {
  std::lock_guard lock(mutex_);
  return frames_.size();
}

bool FrameReceiver::wait_for_frames(std::size_t n, int timeout_ms) const {
  std::unique_lock lock(mutex_);
  return cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                      [&] { return frames_.size() >= n; });
}

void FrameReceiver::stop() {
  if (stopping_.exchange(true)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  if (listen_fd_ >= 0) {
    close(listen_fd_);
    listen_fd_ = -1;
  }
}

}  // namespace wsn::dash
